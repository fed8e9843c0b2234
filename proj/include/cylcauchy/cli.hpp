#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cylcauchy::cli {

enum class Subcommand { Spectrum, Oracle, Asymptotics, Criterion, Solve, Hadamard };
enum class Format { Json, Csv };

/// Resolved command line. Defaults live here and nowhere else.
struct RunConfig {
  Subcommand subcommand = Subcommand::Spectrum;
  std::optional<double> mu;
  std::pair<std::size_t, std::size_t> k_range{0, 0};  ///< inclusive; {0,0} = subcommand default
  std::size_t count = 5;
  std::size_t grid_size = 400;
  std::optional<double> lambda_max;
  std::size_t K = 0;  ///< 0 = from input
  std::size_t M = 8;
  std::string input;
  std::string output;
  std::string spectrum;  ///< external spectrum file; empty = built-in 1-D Dirichlet
  Format format = Format::Json;
  double tol = 1e-12;
  std::size_t quadrature_panels = 2048;
  double epsilon = 1e-3;
  std::optional<std::size_t> cutoff_p;
  bool allow_ill_posed = false;
  std::uint64_t seed = 0;
};

/// Parses "a..b" (inclusive, a <= b).
std::pair<std::size_t, std::size_t> parse_range(const std::string& text);

/// Exit status: 0 success, 1 computational refusal or failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

}  // namespace cylcauchy::cli
