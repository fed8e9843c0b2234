#pragma once

// Brute-force check on the reflected problem: v = lambda * K v with
// K = L_C^{-1} P, whose kernel is m(t, s) = sinh(sqrt(mu)(t + s - 1))/sqrt(mu)
// on t + s > 1 and zero elsewhere. K is symmetric, so a midpoint Nystrom
// matrix is exactly symmetric and cyclic Jacobi diagonalizes it; matrix
// eigenvalues nu give lambda = 1/nu.

#include <cstddef>
#include <span>
#include <vector>

namespace cylcauchy {

/// Dense row-major symmetric matrix.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }

  double frobenius_norm() const noexcept;
  bool is_symmetric() const noexcept;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

inline constexpr double kOracleMaxSqrtMu = 40.0;

double composed_kernel(double mu, double t, double s);

struct KernelMatrix {
  double mu = 0.0;
  std::size_t n = 0;
  double h = 0.0;
  std::vector<double> nodes;  ///< t_i = (i - 1/2) h
  SymmetricMatrix entries;    ///< h * m(t_i, t_j)
};

/// 16 <= n <= 4096.
KernelMatrix build_matrix(double mu, std::size_t n);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  ///< sorted by decreasing |nu|
  SymmetricMatrix eigenvectors;     ///< column j belongs to eigenvalues[j]; empty if not requested
  double offdiag_norm = 0.0;
  int sweeps = 0;
};

struct JacobiOptions {
  double tol = 1e-13;  ///< relative off-diagonal Frobenius tolerance
  int max_sweeps = 50;
  bool vectors = true;
};

/// Cyclic Jacobi. Throws ConvergenceError if the sweep budget runs out.
EigenDecomposition jacobi_eigen(const SymmetricMatrix& a, const JacobiOptions& opts = {});

struct OracleMode {
  double lambda = 0.0;
  std::vector<double> vector;  ///< on the midpoint nodes, sum v_i^2 h = 1, last value > 0
};

struct OracleResult {
  std::vector<OracleMode> modes;  ///< increasing |lambda|
  bool truncated = false;         ///< fewer trustworthy eigenvalues than requested
};

/// Smallest-|lambda| eigenpairs of the Nystrom matrix. Eigenvalues below
/// 1e-12 max|nu| are discarded as noise; if that leaves fewer than `count`
/// the result is flagged truncated.
OracleResult oracle_lambdas(double mu, std::size_t n, std::size_t count, bool vectors = true);

}  // namespace cylcauchy
