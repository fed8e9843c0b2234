#pragma once

// Spectral solution of the Cauchy problem
//
//   u_tt - L_x u = f  in Omega x (0, 1),   u(x, 0) = u_t(x, 0) = 0,
//
// in the eigenbasis u_km(x, t) = u_k(x) v_km(t) of the reflected operator,
// which satisfies (u_km)_tt - L_x u_km = lambda_km u_km(x, 1 - t). With
// f~_km = (f(x, 1 - t), u_km(x, t)) the solution coefficients are
// a_km = f~_km / lambda_km, and a strong solution exists iff
// sum_k |f~_k1 / lambda_k1|^2 < infinity. Everything here works in
// truncated coefficient space k <= K, m <= M.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cylcauchy/deviating_spectrum.hpp"
#include "cylcauchy/operator_model.hpp"

namespace cylcauchy {

/// Deviating-problem modes for every k <= K, m <= M of a spectrum.
class ModeTable {
 public:
  ModeTable(std::size_t K, std::size_t M, std::vector<DeviatingMode> modes);

  std::size_t K() const noexcept { return K_; }
  std::size_t M() const noexcept { return M_; }
  const DeviatingMode& at(std::size_t k, std::size_t m) const;
  double lambda(std::size_t k, std::size_t m) const { return at(k, m).lambda; }
  std::vector<double> lambda1() const;

 private:
  std::size_t K_;
  std::size_t M_;
  std::vector<DeviatingMode> modes_;  // k-major
};

ModeTable compute_modes(const OperatorSpectrum& spectrum, std::size_t K, std::size_t M,
                        double tol = 1e-12);

enum class Provenance { GridProjected, FileLoaded, Synthetic };

/// Dense f~_km for k <= K, m <= M (1-based accessors).
class ModeCoefficients {
 public:
  ModeCoefficients(std::shared_ptr<const OperatorSpectrum> spectrum, std::size_t K, std::size_t M,
                   Provenance provenance);

  std::size_t K() const noexcept { return K_; }
  std::size_t M() const noexcept { return M_; }
  Provenance provenance() const noexcept { return provenance_; }
  const std::shared_ptr<const OperatorSpectrum>& spectrum() const noexcept { return spectrum_; }

  double operator()(std::size_t k, std::size_t m) const { return values_[index(k, m)]; }
  /// Rejects non-finite values.
  void set(std::size_t k, std::size_t m, double value);
  std::span<const double> values() const noexcept { return values_; }
  double norm() const noexcept;

 private:
  std::size_t index(std::size_t k, std::size_t m) const;

  std::shared_ptr<const OperatorSpectrum> spectrum_;
  std::size_t K_;
  std::size_t M_;
  Provenance provenance_;
  std::vector<double> values_;
};

/// Samples on the uniform grid x_i = pi i/(nx-1), t_j = j/(nt-1); values[i*nt + j].
struct GridSamples {
  std::size_t nx = 0;
  std::size_t nt = 0;
  std::vector<double> values;

  double x(std::size_t i) const;
  double t(std::size_t j) const;
};

/// f~_km = \iint f(x, 1-t) u_k(x) v_km(t) dx dt by composite Simpson on the
/// sample grid. Only for the built-in 1-D basis; needs >= 64 points per axis
/// and >= 8 points per oscillation of every basis function involved.
ModeCoefficients project_f(const GridSamples& f, std::shared_ptr<const OperatorSpectrum> spectrum,
                           const ModeTable& modes);

enum class Verdict { Convergent, Divergent, Indeterminate, InsufficientData };

std::string_view to_string(Verdict v) noexcept;

struct SolvabilityReport {
  std::vector<double> partial_sums;    ///< S_K for K = 1..K
  std::vector<double> amplifications;  ///< 1/lambda_k1
  Verdict verdict = Verdict::Indeterminate;
  double tail_ratio = 0.0;  ///< exp(-rho) of the geometric fit over the window
  double decay_exponent = 0.0;  ///< p of the power-law fit d_k ~ k^-p
  std::size_t window = 0;
};

/// Finite-truncation reading of sum_k |f~_k1/lambda_k1|^2 < infinity, with
/// d_k = |f~_k1/lambda_k1|^2 over the last W = max(5, K/4) terms:
///   (a) max d_k < 1e-14 S_K                    -> convergent
///   (b) d_k nondecreasing and d_K > 1e-12      -> divergent
///   (c) log d_k ~ -rho k: rho > 0.1 convergent, rho < -0.1 divergent
///   (d) log d_k ~ -p log k: p > 1.5 convergent, p < 0.9 divergent
///   otherwise indeterminate. K < 5 gives InsufficientData.
SolvabilityReport criterion(const ModeCoefficients& coeffs, std::span<const double> lambda1);

struct SolutionField {
  std::shared_ptr<const OperatorSpectrum> spectrum;
  std::size_t K = 0;
  std::size_t M = 0;
  std::vector<double> coefficients;  ///< a_km, k-major
  std::vector<double> lambdas;       ///< lambda_km, k-major
  double norm_sq = 0.0;              ///< sum of a_km^2
  double norm_sq_first = 0.0;        ///< m = 1 part
  double norm_sq_rest = 0.0;         ///< m >= 2 part
  std::vector<DeviatingMode> modes;

  double coefficient(std::size_t k, std::size_t m) const { return coefficients[(k - 1) * M + (m - 1)]; }
  bool evaluable() const noexcept { return spectrum && spectrum->has_evaluable_basis(); }
  /// u(x, t) = sum a_km u_k(x) v_km(t); built-in 1-D basis only.
  double evaluate(double x, double t) const;
};

struct SolveOptions {
  bool allow_ill_posed = false;
};

/// a_km = f~_km / lambda_km. Refuses a divergent criterion verdict unless
/// allowed; any |lambda_km| < 1e-290 is an AmplificationOverflow.
SolutionField solve(const ModeCoefficients& coeffs, const ModeTable& modes, const SolveOptions& opts = {});

struct SubspaceSplit {
  std::size_t p = 0;
  ModeCoefficients tilde_part;  ///< (k, 1) for k > p
  ModeCoefficients hat_part;    ///< everything else
};

SubspaceSplit split_subspace(const ModeCoefficients& coeffs, std::size_t p);

/// Relative l2 norm of lambda_km a_km - f~_km over ||f~|| (absolute when f~ = 0).
double residual(const SolutionField& u, const ModeCoefficients& coeffs);

struct HadamardRow {
  std::size_t k = 0;
  double mu = 0.0;
  std::optional<double> lambda_k1;  ///< empty when unrepresentable
  double amplification = 0.0;
  double solution_norm = 0.0;
};

/// Data with a single component f~_k1 = epsilon gives ||u|| = epsilon/lambda_k1.
std::vector<HadamardRow> hadamard_amplification(const OperatorSpectrum& spectrum,
                                                std::span<const std::size_t> k_list, double epsilon,
                                                double tol = 1e-12);

}  // namespace cylcauchy
