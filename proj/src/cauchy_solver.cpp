#include "cylcauchy/cauchy_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cylcauchy/error.hpp"
#include "cylcauchy/parallel.hpp"
#include "cylcauchy/quadrature.hpp"

namespace cylcauchy {

ModeTable::ModeTable(std::size_t K, std::size_t M, std::vector<DeviatingMode> modes)
    : K_(K), M_(M), modes_(std::move(modes)) {
  if (K_ == 0 || M_ == 0 || modes_.size() != K_ * M_)
    throw Error(ErrorCode::InvalidArgument, "mode table needs K*M modes");
}

const DeviatingMode& ModeTable::at(std::size_t k, std::size_t m) const {
  if (k == 0 || k > K_ || m == 0 || m > M_)
    throw Error(ErrorCode::InvalidArgument,
                "mode (" + std::to_string(k) + "," + std::to_string(m) + ") outside table");
  return modes_[(k - 1) * M_ + (m - 1)];
}

std::vector<double> ModeTable::lambda1() const {
  std::vector<double> out(K_);
  for (std::size_t k = 1; k <= K_; ++k) out[k - 1] = lambda(k, 1);
  return out;
}

ModeTable compute_modes(const OperatorSpectrum& spectrum, std::size_t K, std::size_t M, double tol) {
  if (K == 0 || M == 0) throw Error(ErrorCode::InvalidArgument, "K and M must be >= 1");
  if (K > spectrum.size())
    throw Error(ErrorCode::InvalidArgument,
                "K=" + std::to_string(K) + " exceeds spectrum size " + std::to_string(spectrum.size()));
  std::vector<DeviatingMode> modes(K * M);
  parallel_for(K, [&](std::size_t i) {
    const double mu = spectrum.mu(i + 1);
    if (M == 1) {
      modes[i] = smallest_eigenvalue(mu, tol);
      return;
    }
    auto row = first_modes(mu, M, tol);
    std::copy_n(row.begin(), M, modes.begin() + static_cast<std::ptrdiff_t>(i * M));
  });
  return {K, M, std::move(modes)};
}

ModeCoefficients::ModeCoefficients(std::shared_ptr<const OperatorSpectrum> spectrum, std::size_t K,
                                   std::size_t M, Provenance provenance)
    : spectrum_(std::move(spectrum)), K_(K), M_(M), provenance_(provenance), values_(K * M, 0.0) {
  if (K_ == 0 || M_ == 0) throw Error(ErrorCode::InvalidArgument, "K and M must be >= 1");
  if (spectrum_ && K_ > spectrum_->size())
    throw Error(ErrorCode::InvalidArgument, "K exceeds spectrum size");
}

std::size_t ModeCoefficients::index(std::size_t k, std::size_t m) const {
  if (k == 0 || k > K_ || m == 0 || m > M_)
    throw Error(ErrorCode::InvalidArgument,
                "coefficient (" + std::to_string(k) + "," + std::to_string(m) + ") outside truncation");
  return (k - 1) * M_ + (m - 1);
}

void ModeCoefficients::set(std::size_t k, std::size_t m, double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidArgument, "coefficient must be finite");
  values_[index(k, m)] = value;
}

double ModeCoefficients::norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double GridSamples::x(std::size_t i) const {
  if (i + 1 == nx) return std::numbers::pi;
  return std::numbers::pi * static_cast<double>(i) / static_cast<double>(nx - 1);
}

double GridSamples::t(std::size_t j) const {
  if (j + 1 == nt) return 1.0;
  return static_cast<double>(j) / static_cast<double>(nt - 1);
}

ModeCoefficients project_f(const GridSamples& f, std::shared_ptr<const OperatorSpectrum> spectrum,
                           const ModeTable& modes) {
  if (!spectrum || !spectrum->has_evaluable_basis())
    throw Error(ErrorCode::Unsupported, "grid projection needs the built-in 1-D basis");
  if (f.nx < 64 || f.nt < 64)
    throw Error(ErrorCode::ResolutionError, "grid needs at least 64 points per axis");
  if (f.values.size() != f.nx * f.nt)
    throw Error(ErrorCode::InvalidArgument, "grid sample count does not match nx*nt");
  const std::size_t K = modes.K();
  const std::size_t M = modes.M();
  if (K > spectrum->size()) throw Error(ErrorCode::InvalidArgument, "K exceeds spectrum size");

  constexpr double kMinPointsPerWave = 8.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double per_wave_x = 2.0 * static_cast<double>(f.nx - 1) / static_cast<double>(k);
    if (per_wave_x < kMinPointsPerWave)
      throw Error(ErrorCode::ResolutionError,
                  "nx=" + std::to_string(f.nx) + " too coarse for u_" + std::to_string(k));
    for (std::size_t m = 1; m <= M; ++m) {
      const auto& md = modes.at(k, m);
      const double omega = std::sqrt(std::max({0.0, -(md.mu + md.lambda), -(md.mu - md.lambda)}));
      if (omega > 0.0 &&
          static_cast<double>(f.nt - 1) * 2.0 * std::numbers::pi / omega < kMinPointsPerWave)
        throw Error(ErrorCode::ResolutionError,
                    "nt=" + std::to_string(f.nt) + " too coarse for v_" + std::to_string(k) + "," +
                        std::to_string(m));
    }
  }

  const double hx = std::numbers::pi / static_cast<double>(f.nx - 1);
  const double ht = 1.0 / static_cast<double>(f.nt - 1);
  ModeCoefficients out(spectrum, K, M, Provenance::GridProjected);
  std::vector<double> results(K * M, 0.0);
  parallel_for(K, [&](std::size_t ki) {
    const std::size_t k = ki + 1;
    std::vector<double> basis(f.nx);
    for (std::size_t i = 0; i < f.nx; ++i) basis[i] = eval_basis_1d(k, f.x(i));
    // g(t_j) = \int f(x, 1 - t_j) u_k(x) dx; the grid is symmetric so 1 - t_j = t_{nt-1-j}.
    std::vector<double> g(f.nt);
    std::vector<double> row(f.nx);
    for (std::size_t j = 0; j < f.nt; ++j) {
      const std::size_t jr = f.nt - 1 - j;
      for (std::size_t i = 0; i < f.nx; ++i) row[i] = f.values[i * f.nt + jr] * basis[i];
      g[j] = simpson_samples(row, hx);
    }
    std::vector<double> integrand(f.nt);
    for (std::size_t m = 1; m <= M; ++m) {
      const auto& md = modes.at(k, m);
      for (std::size_t j = 0; j < f.nt; ++j) integrand[j] = g[j] * eigenfunction(md, f.t(j));
      results[ki * M + (m - 1)] = simpson_samples(integrand, ht);
    }
  });
  for (std::size_t k = 1; k <= K; ++k)
    for (std::size_t m = 1; m <= M; ++m) out.set(k, m, results[(k - 1) * M + (m - 1)]);
  return out;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Convergent: return "convergent";
    case Verdict::Divergent: return "divergent";
    case Verdict::Indeterminate: return "indeterminate";
    case Verdict::InsufficientData: return "insufficient-data";
  }
  return "indeterminate";
}

namespace {

// Least-squares slope of y on x.
double fit_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

SolvabilityReport criterion(const ModeCoefficients& coeffs, std::span<const double> lambda1) {
  const std::size_t K = coeffs.K();
  if (lambda1.size() < K)
    throw Error(ErrorCode::InvalidArgument, "need lambda_k1 for every k <= K");

  SolvabilityReport report;
  std::vector<double> d(K);
  double sum = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double lam = lambda1[k - 1];
    if (lam == 0.0 || !std::isfinite(lam))
      throw Error(ErrorCode::InvalidArgument, "lambda_" + std::to_string(k) + "1 must be nonzero");
    const double ratio = coeffs(k, 1) / lam;
    d[k - 1] = ratio * ratio;
    sum += d[k - 1];
    report.partial_sums.push_back(sum);
    report.amplifications.push_back(1.0 / lam);
  }
  if (K < 5) {
    report.verdict = Verdict::InsufficientData;
    return report;
  }

  const std::size_t W = std::min(K, std::max<std::size_t>(5, K / 4));
  report.window = W;
  const std::size_t first = K - W;  // 0-based start of the window
  const double s_K = report.partial_sums.back();
  const double max_d = *std::max_element(d.begin() + static_cast<std::ptrdiff_t>(first), d.end());

  std::vector<double> ks, logks, logds;
  for (std::size_t i = first; i < K; ++i) {
    if (d[i] > 0.0) {
      ks.push_back(static_cast<double>(i + 1));
      logks.push_back(std::log(static_cast<double>(i + 1)));
      logds.push_back(std::log(d[i]));
    }
  }
  if (ks.size() >= 3) {
    report.tail_ratio = std::exp(fit_slope(ks, logds));
    report.decay_exponent = -fit_slope(logks, logds);
  }

  if (max_d < 1e-14 * s_K || s_K == 0.0) {
    report.verdict = Verdict::Convergent;
    return report;
  }
  bool nondecreasing = true;
  for (std::size_t i = first + 1; i < K; ++i) nondecreasing = nondecreasing && d[i] >= d[i - 1];
  if (nondecreasing && d[K - 1] > 1e-12) {
    report.verdict = Verdict::Divergent;
    return report;
  }
  if (ks.size() < 3) {
    report.verdict = Verdict::Indeterminate;
    return report;
  }
  const double rho = -std::log(report.tail_ratio);
  if (rho > 0.1) {
    report.verdict = Verdict::Convergent;
  } else if (rho < -0.1) {
    report.verdict = Verdict::Divergent;
  } else if (report.decay_exponent > 1.5) {
    report.verdict = Verdict::Convergent;
  } else if (report.decay_exponent < 0.9) {
    report.verdict = Verdict::Divergent;
  } else {
    report.verdict = Verdict::Indeterminate;
  }
  return report;
}

double SolutionField::evaluate(double x, double t) const {
  if (!evaluable()) throw Error(ErrorCode::Unsupported, "pointwise evaluation needs the built-in 1-D basis");
  double u = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double uk = eval_basis_1d(k, x);
    for (std::size_t m = 1; m <= M; ++m) {
      const double a = coefficient(k, m);
      if (a != 0.0) u += a * uk * eigenfunction(modes[(k - 1) * M + (m - 1)], t);
    }
  }
  return u;
}

SolutionField solve(const ModeCoefficients& coeffs, const ModeTable& modes, const SolveOptions& opts) {
  const std::size_t K = coeffs.K();
  const std::size_t M = coeffs.M();
  if (modes.K() < K || modes.M() < M)
    throw Error(ErrorCode::InvalidArgument, "mode table smaller than the coefficient truncation");

  for (std::size_t k = 1; k <= K; ++k)
    for (std::size_t m = 1; m <= M; ++m)
      if (!(std::abs(modes.lambda(k, m)) >= 1e-290))
        throw Error(ErrorCode::AmplificationOverflow,
                    "|lambda_" + std::to_string(k) + "," + std::to_string(m) + "| below 1e-290");

  if (!opts.allow_ill_posed) {
    const auto report = criterion(coeffs, modes.lambda1());
    if (report.verdict == Verdict::Divergent)
      throw Error(ErrorCode::RefusedIllPosed,
                  "criterion sum diverges at K=" + std::to_string(K) + " (S_K=" +
                      std::to_string(report.partial_sums.back()) + "); pass allow-ill-posed to override");
  }

  SolutionField u;
  u.spectrum = coeffs.spectrum();
  u.K = K;
  u.M = M;
  u.coefficients.resize(K * M);
  u.lambdas.resize(K * M);
  u.modes.reserve(K * M);
  for (std::size_t k = 1; k <= K; ++k) {
    for (std::size_t m = 1; m <= M; ++m) {
      const std::size_t i = (k - 1) * M + (m - 1);
      const double lam = modes.lambda(k, m);
      const double a = coeffs(k, m) / lam;
      u.coefficients[i] = a;
      u.lambdas[i] = lam;
      u.modes.push_back(modes.at(k, m));
      (m == 1 ? u.norm_sq_first : u.norm_sq_rest) += a * a;
    }
  }
  u.norm_sq = u.norm_sq_first + u.norm_sq_rest;
  return u;
}

SubspaceSplit split_subspace(const ModeCoefficients& coeffs, std::size_t p) {
  if (p < 1 || p > coeffs.K())
    throw Error(ErrorCode::InvalidArgument, "cutoff p must be in [1, K]");
  SubspaceSplit split{p, ModeCoefficients(coeffs.spectrum(), coeffs.K(), coeffs.M(), coeffs.provenance()),
                      ModeCoefficients(coeffs.spectrum(), coeffs.K(), coeffs.M(), coeffs.provenance())};
  for (std::size_t k = 1; k <= coeffs.K(); ++k) {
    for (std::size_t m = 1; m <= coeffs.M(); ++m) {
      auto& target = (m == 1 && k > p) ? split.tilde_part : split.hat_part;
      target.set(k, m, coeffs(k, m));
    }
  }
  return split;
}

double residual(const SolutionField& u, const ModeCoefficients& coeffs) {
  if (u.K != coeffs.K() || u.M != coeffs.M())
    throw Error(ErrorCode::InvalidArgument, "solution and data truncations differ");
  double r2 = 0.0;
  for (std::size_t k = 1; k <= u.K; ++k) {
    for (std::size_t m = 1; m <= u.M; ++m) {
      const std::size_t i = (k - 1) * u.M + (m - 1);
      const double r = u.lambdas[i] * u.coefficients[i] - coeffs(k, m);
      r2 += r * r;
    }
  }
  const double fn = coeffs.norm();
  return fn > 0.0 ? std::sqrt(r2) / fn : std::sqrt(r2);
}

std::vector<HadamardRow> hadamard_amplification(const OperatorSpectrum& spectrum,
                                                std::span<const std::size_t> k_list, double epsilon,
                                                double tol) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  std::vector<HadamardRow> rows(k_list.size());
  parallel_for(k_list.size(), [&](std::size_t i) {
    HadamardRow& row = rows[i];
    row.k = k_list[i];
    row.mu = spectrum.mu(row.k);
    try {
      const double lam = smallest_eigenvalue(row.mu, tol).lambda;
      row.lambda_k1 = lam;
      row.amplification = 1.0 / std::abs(lam);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnderflowError) throw;
      row.amplification = std::numeric_limits<double>::infinity();
    }
    row.solution_norm = epsilon * row.amplification;
  });
  return rows;
}

}  // namespace cylcauchy
