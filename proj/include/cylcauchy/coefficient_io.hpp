#pragma once

// Text formats for data f:
//   coefficient file   `k,m,value` per line, `#` comments
//   grid sample file   `# nx=..,nt=..` comment, header `x,t,value`, rows with
//                      x outer and t inner on the uniform grid of GridSamples

#include <filesystem>
#include <memory>
#include <string>

#include "cylcauchy/cauchy_solver.hpp"

namespace cylcauchy {

/// K or M of 0 means "largest index present in the file"; entries outside an
/// explicit truncation are dropped, absent entries are zero.
ModeCoefficients parse_coefficients(const std::string& text, std::shared_ptr<const OperatorSpectrum> spectrum,
                                    std::size_t K = 0, std::size_t M = 0);
std::string format_coefficients(const ModeCoefficients& coeffs);

GridSamples parse_grid(const std::string& text);
std::string format_grid(const GridSamples& grid);

/// True when the text carries the `x,t,value` grid header.
bool looks_like_grid(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

/// 17 significant digits.
std::string format_double(double v);

}  // namespace cylcauchy
