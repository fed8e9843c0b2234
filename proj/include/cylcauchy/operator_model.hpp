#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace cylcauchy {

/// One eigenpair label of the transverse operator. `label` holds the
/// generating multi-index for tensor spectra and is empty otherwise.
struct SpectrumEntry {
  std::size_t k = 0;
  double mu = 0.0;
  std::vector<int> label;
};

/// Eigenvalues of the transverse operator, sorted nondecreasing, all >= 1.
/// Immutable once built; construct through the factory functions below.
class OperatorSpectrum {
 public:
  /// Validates the invariants (k = 1..n consecutive, mu >= 1, nondecreasing).
  OperatorSpectrum(std::vector<SpectrumEntry> entries, std::string domain_descriptor);

  const std::vector<SpectrumEntry>& entries() const noexcept { return entries_; }
  const std::string& domain_descriptor() const noexcept { return domain_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// 1-based access by index k.
  double mu(std::size_t k) const;

  /// True when u_k(x) can be evaluated pointwise (built-in 1-D Laplacian only).
  bool has_evaluable_basis() const noexcept { return domain_ == "dirichlet-1d"; }

 private:
  std::vector<SpectrumEntry> entries_;
  std::string domain_;
};

/// -d^2/dx^2 on (0, pi) with Dirichlet ends: mu_k = k^2.
OperatorSpectrum dirichlet_spectrum_1d(std::size_t k_max);

/// Dirichlet Laplacian on (0, pi)^dim: mu = |k|^2 over multi-indices in the
/// box [1, k_max_per_dim]^dim, sorted by mu then lexicographically, first
/// `count` entries kept.
OperatorSpectrum tensor_spectrum(int dim, int k_max_per_dim, std::size_t count);

/// Reads `k,mu[,label]` lines; `#` starts a comment. A label is a
/// whitespace- or colon-separated integer tuple.
OperatorSpectrum load_spectrum(const std::filesystem::path& path);
OperatorSpectrum parse_spectrum(const std::string& text);

/// sqrt(2/pi) sin(kx), orthonormal on [0, pi].
double eval_basis_1d(std::size_t k, double x);

}  // namespace cylcauchy
