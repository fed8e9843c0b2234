#include "cylcauchy/discrete_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cylcauchy/error.hpp"

namespace cylcauchy {

double SymmetricMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool SymmetricMatrix::is_symmetric() const noexcept {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

double composed_kernel(double mu, double t, double s) {
  if (!(mu > 0.0) || std::sqrt(mu) > kOracleMaxSqrtMu)
    throw Error(ErrorCode::OracleRangeError, "oracle needs 0 < sqrt(mu) <= 40");
  if (!(t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "kernel arguments outside [0, 1]");
  const double w = t + s - 1.0;
  if (w <= 0.0) return 0.0;
  const double r = std::sqrt(mu);
  return std::sinh(r * w) / r;
}

KernelMatrix build_matrix(double mu, std::size_t n) {
  if (n < 16 || n > 4096) throw Error(ErrorCode::InvalidArgument, "grid size must be in [16, 4096]");
  KernelMatrix k;
  k.mu = mu;
  k.n = n;
  k.h = 1.0 / static_cast<double>(n);
  k.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) k.nodes[i] = (static_cast<double>(i) + 0.5) * k.h;
  k.entries = SymmetricMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = k.h * composed_kernel(mu, k.nodes[i], k.nodes[j]);
      k.entries(i, j) = v;
      k.entries(j, i) = v;
    }
  }
  return k;
}

namespace {

double offdiag_norm(const SymmetricMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(const SymmetricMatrix& input, const JacobiOptions& opts) {
  if (!(opts.tol >= 1e-14)) throw Error(ErrorCode::InvalidArgument, "jacobi tol must be >= 1e-14");
  if (opts.max_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "max_sweeps must be >= 1");
  if (!input.is_symmetric()) throw Error(ErrorCode::InvalidArgument, "jacobi needs a symmetric matrix");

  const std::size_t n = input.size();
  SymmetricMatrix a = input;
  // Rows of vt are eigenvectors, so rotations touch contiguous memory.
  SymmetricMatrix vt(opts.vectors ? n : 0);
  for (std::size_t i = 0; i < vt.size(); ++i) vt(i, i) = 1.0;

  const double target = opts.tol * input.frobenius_norm();
  double off = offdiag_norm(a);
  int sweep = 0;
  while (off > target) {
    if (sweep == opts.max_sweeps)
      throw Error(ErrorCode::ConvergenceError,
                  "off-diagonal norm " + std::to_string(off) + " after " + std::to_string(sweep) +
                      " sweeps (target " + std::to_string(target) + ")");
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Negligible against both diagonal entries: drop it.
        if (sweep > 3 && std::abs(app) + 100.0 * std::abs(apq) == std::abs(app) &&
            std::abs(aqq) + 100.0 * std::abs(apq) == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double np = c * akp - s * akq;
          const double nq = s * akp + c * akq;
          a(k, p) = np;
          a(p, k) = np;
          a(k, q) = nq;
          a(q, k) = nq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        if (opts.vectors) {
          double* vp = &vt(p, 0);
          double* vq = &vt(q, 0);
          for (std::size_t k = 0; k < n; ++k) {
            const double x = vp[k];
            const double y = vq[k];
            vp[k] = c * x - s * y;
            vq[k] = s * x + c * y;
          }
        }
      }
    }
    off = offdiag_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(a(i, i)) > std::abs(a(j, j));
  });

  EigenDecomposition out;
  out.offdiag_norm = off;
  out.sweeps = sweep;
  out.eigenvalues.reserve(n);
  for (std::size_t i : order) out.eigenvalues.push_back(a(i, i));
  if (opts.vectors) {
    out.eigenvectors = SymmetricMatrix(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, j) = vt(order[j], k);
  }
  return out;
}

OracleResult oracle_lambdas(double mu, std::size_t n, std::size_t count, bool vectors) {
  if (count == 0 || count > n) throw Error(ErrorCode::InvalidArgument, "count must be in [1, n]");
  const auto km = build_matrix(mu, n);
  JacobiOptions opts;
  opts.vectors = vectors;
  const auto eig = jacobi_eigen(km.entries, opts);

  const double floor = 1e-12 * std::abs(eig.eigenvalues.front());
  OracleResult result;
  for (std::size_t j = 0; j < n && result.modes.size() < count; ++j) {
    const double nu = eig.eigenvalues[j];
    if (!(std::abs(nu) > floor)) break;
    OracleMode mode;
    mode.lambda = 1.0 / nu;
    if (vectors) {
      mode.vector.resize(n);
      const double scale = 1.0 / std::sqrt(km.h);
      const double sign = eig.eigenvectors(n - 1, j) < 0.0 ? -1.0 : 1.0;
      for (std::size_t i = 0; i < n; ++i) mode.vector[i] = sign * scale * eig.eigenvectors(i, j);
    }
    result.modes.push_back(std::move(mode));
  }
  result.truncated = result.modes.size() < count;
  return result;
}

}  // namespace cylcauchy
