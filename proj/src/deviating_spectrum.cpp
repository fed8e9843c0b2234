#include "cylcauchy/deviating_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "cylcauchy/error.hpp"

namespace cylcauchy {

namespace {

constexpr double kOverflowGuard = 700.0;

void require_mu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw Error(ErrorCode::InvalidArgument, "mu must be positive and finite");
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

// ln coth(sqrt(a)/2) for a > 0, stable for large and small a.
double log_coth_half_sqrt(double a) {
  const double r = std::sqrt(a);
  const double q = std::exp(-r);
  const double log_one_minus_q = q < 0.5 ? std::log1p(-q) : std::log(-std::expm1(-r));
  return std::log1p(q) - log_one_minus_q;
}

// d/da of ln coth(sqrt(a)/2) = -1/(2 sqrt(a) sinh(sqrt(a))).
double log_coth_half_sqrt_da(double a) {
  const double r = std::sqrt(a);
  const double q = std::exp(-r);
  return -q / (r * -std::expm1(-2.0 * r));
}

double varpi_unchecked(double mu, double lambda) {
  return log_coth_half_sqrt(mu + lambda) + log_coth_half_sqrt(mu - lambda) - std::atanh(lambda / mu);
}

double varpi_derivative_unchecked(double mu, double lambda) {
  const double a = mu + lambda;
  const double b = mu - lambda;
  return log_coth_half_sqrt_da(a) - log_coth_half_sqrt_da(b) - mu / (a * b);
}

// \int_{-1/2}^{1/2} E(a, s)^2 ds
double even_sq_integral(double a) { return 0.5 * (1.0 + odd_fn(a, 1.0)); }

// \int_{-1/2}^{1/2} O(b, s)^2 ds = (O(b, 1) - 1)/(2b), series near b = 0
double odd_sq_integral(double b) {
  if (std::abs(b) < 0.5) {
    double term = 1.0 / 6.0;  // b^(n-1)/(2n+1)! at n = 1
    double sum = 0.0;
    for (int n = 1; n <= 14; ++n) {
      sum += term;
      term *= b / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
    }
    return 0.5 * sum;
  }
  return (odd_fn(b, 1.0) - 1.0) / (2.0 * b);
}

// Bisection on a sign change of f down to adjacent doubles.
template <typename F>
double bisect(F&& f, double lo, double hi, double f_lo) {
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

// Root of varpi on [lo, hi] with varpi(lo) > 0 > varpi(hi), 0 < lo < hi < mu.
// Geometric bisection first (roots can be exponentially small), Newton polish last.
double solve_varpi(double mu, double lo, double hi, double tol) {
  auto f = [mu](double x) { return varpi_unchecked(mu, x); };
  while (hi - lo > 1e-4 * hi) {
    const double mid = hi > 4.0 * lo ? std::sqrt(lo * hi) : lo + 0.5 * (hi - lo);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    (fm > 0.0 ? lo : hi) = mid;
  }
  double x = lo + 0.5 * (hi - lo);
  for (int it = 0; it < 50; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    (fx > 0.0 ? lo : hi) = x;
    double next = x - fx / varpi_derivative_unchecked(mu, x);
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 0.25 * std::numeric_limits<double>::epsilon() * x) break;
    if (step <= tol * 1e-4 * x && it > 3) break;
  }
  return x;
}

// Refines a sign change of Phi on [lo, hi]. Inside (0, mu) the log form is
// used: Phi loses e^{-sqrt(mu)} relative accuracy there from cancellation.
double refine_root(double mu, double lo, double hi, double f_lo, double tol) {
  if (lo >= 0.0 && hi < mu) {
    if (std::sqrt(mu) > kMaxSqrtMu)
      throw Error(ErrorCode::UnderflowError,
                  "smallest eigenvalue for mu=" + fmt(mu) + " underflows double precision");
    double l = lo;
    if (!(l > 0.0)) {
      l = std::min(0.5 * hi, 0.25 * asymptotic_lambda1(mu).refined);
      while (l > 0.0 && !(varpi_unchecked(mu, l) > 0.0)) l *= 1.0 / 16.0;
    }
    if (l > 0.0 && varpi_unchecked(mu, l) > 0.0 && varpi_unchecked(mu, hi) < 0.0)
      return solve_varpi(mu, l, hi, tol);
  }
  return bisect([mu](double x) { return char_fn(mu, x); }, lo, hi, f_lo);
}

}  // namespace

double even_fn(double a, double tau) {
  if (a >= 0.0) return std::cosh(std::sqrt(a) * tau);
  return std::cos(std::sqrt(-a) * tau);
}

double odd_fn(double a, double tau) {
  if (a > 0.0) {
    const double r = std::sqrt(a);
    return std::sinh(r * tau) / r;
  }
  if (a < 0.0) {
    const double r = std::sqrt(-a);
    return std::sin(r * tau) / r;
  }
  return tau;
}

namespace {

// Phi = first - second. For a, b > 0 with A = sqrt(a)/2, B = sqrt(b)/2 and
// r = sqrt(a/b), the product form cosh A cosh B - r sinh A sinh B is
// rewritten as (1+r)/2 cosh(A-B) - lambda cosh(A+B)/(b + sqrt(ab)), which
// is exactly 1 at lambda = 0 and free of the e^{A+B} cancellation.
// Near b = 0 and on the trigonometric branches the product form is used.
std::pair<double, double> char_terms(double mu, double lambda) {
  require_mu(mu);
  const double a = mu + lambda;
  const double b = mu - lambda;
  const double growth = 0.5 * (std::sqrt(std::max(a, 0.0)) + std::sqrt(std::max(b, 0.0)));
  if (growth > kOverflowGuard)
    throw Error(ErrorCode::RangeError, "Phi(" + fmt(mu) + ", " + fmt(lambda) +
                                           ") overflows; use the log-scaled path (varpi)");
  if (a > 0.0 && b >= 1.0) {
    const double sa = std::sqrt(a);
    const double sb = std::sqrt(b);
    const double r = sa / sb;
    return {0.5 * (1.0 + r) * std::cosh(0.5 * (sa - sb)), lambda * std::cosh(0.5 * (sa + sb)) / (b + sa * sb)};
  }
  return {even_fn(a, 0.5) * even_fn(b, 0.5), a * odd_fn(a, 0.5) * odd_fn(b, 0.5)};
}

}  // namespace

double char_fn(double mu, double lambda) {
  const auto [first, second] = char_terms(mu, lambda);
  return first - second;
}

double char_fn_relative(double mu, double lambda) {
  const auto [first, second] = char_terms(mu, lambda);
  return std::abs(first - second) /
         std::max(std::abs(first) + std::abs(second), std::numeric_limits<double>::min());
}

double varpi(double mu, double lambda) {
  require_mu(mu);
  if (!(lambda > 0.0 && lambda < mu))
    throw Error(ErrorCode::DomainError, "varpi needs 0 < lambda < mu, got lambda=" + fmt(lambda));
  if (std::sqrt(mu) > kMaxSqrtMu)
    throw Error(ErrorCode::UnderflowError, "sqrt(mu) > 600");
  return varpi_unchecked(mu, lambda);
}

double varpi_derivative(double mu, double lambda) {
  varpi(mu, lambda);
  return varpi_derivative_unchecked(mu, lambda);
}

AsymptoticLambda1 asymptotic_lambda1(double mu) {
  require_mu(mu);
  const double r = std::sqrt(mu);
  if (r > kMaxSqrtMu) throw Error(ErrorCode::UnderflowError, "sqrt(mu) > 600");
  return {4.0 * mu * std::exp(-r), 2.0 * mu * log_coth_half_sqrt(mu)};
}

double monotonicity_bound(double mu) { return mu / (4.0 * mu + 0.5); }

DeviatingMode make_mode(double mu, double lambda, std::size_t m) {
  require_mu(mu);
  const double a = mu + lambda;
  const double b = mu - lambda;
  DeviatingMode mode{mu, m, lambda, odd_fn(b, 0.5), even_fn(a, 0.5), 1.0};

  const double ie = even_sq_integral(a);
  const double io = odd_sq_integral(b);
  if (!std::isfinite(ie) || !std::isfinite(io) || !std::isfinite(mode.c1) || !std::isfinite(mode.c2))
    throw Error(ErrorCode::RangeError, "eigenfunction normalization overflows at mu=" + fmt(mu));
  const double scale = std::max(std::abs(mode.c1), std::abs(mode.c2));
  const double r1 = mode.c1 / scale;
  const double r2 = mode.c2 / scale;
  mode.norm = scale * std::sqrt(r1 * r1 * ie + r2 * r2 * io);

  // Before any flip v(1) = 2 c1 c2 / norm; negating both coefficients negates v.
  if (mode.c1 * mode.c2 < 0.0) {
    mode.c1 = -mode.c1;
    mode.c2 = -mode.c2;
  }
  return mode;
}

double eigenfunction(const DeviatingMode& mode, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::DomainError, "t outside [0, 1]");
  const double s = t - 0.5;
  return (mode.c1 * even_fn(mode.mu + mode.lambda, s) + mode.c2 * odd_fn(mode.mu - mode.lambda, s)) /
         mode.norm;
}

DeviatingMode smallest_eigenvalue(double mu, double tol) {
  require_mu(mu);
  if (!(tol >= 1e-14)) throw Error(ErrorCode::InvalidArgument, "tol must be >= 1e-14");
  const auto asym = asymptotic_lambda1(mu);  // throws past the underflow cap

  if (asym.refined < mu / 5.0) {
    const double lo = 0.5 * asym.refined;
    const double hi = std::min(2.0 * asym.refined, 0.5 * mu);
    if (varpi_unchecked(mu, lo) > 0.0 && varpi_unchecked(mu, hi) < 0.0)
      return make_mode(mu, solve_varpi(mu, lo, hi, tol), 1);
  }

  // Outward scan from lambda = 0, where Phi = 1.
  constexpr double kStep = 0.125;
  constexpr double kScanLimit = 1.0e4;
  const auto steps = static_cast<std::size_t>(kScanLimit / kStep);
  double best = std::numeric_limits<double>::infinity();
  for (const double dir : {1.0, -1.0}) {
    double prev_x = 0.0;
    double prev_f = 1.0;
    for (std::size_t i = 1; i <= steps; ++i) {
      const double x = dir * kStep * static_cast<double>(i);
      if (std::abs(x) > std::abs(best)) break;
      const double fx = char_fn(mu, x);
      if (fx == 0.0) {
        best = x;
        break;
      }
      if ((fx > 0.0) != (prev_f > 0.0)) {
        const double lo = std::min(prev_x, x);
        const double hi = std::max(prev_x, x);
        const double root = refine_root(mu, lo, hi, lo == prev_x ? prev_f : fx, tol);
        if (std::abs(root) < std::abs(best)) best = root;
        break;
      }
      prev_x = x;
      prev_f = fx;
    }
  }
  if (!std::isfinite(best))
    throw Error(ErrorCode::NotFound, "no sign change of Phi for mu=" + fmt(mu) +
                                         " within |lambda| <= " + fmt(kScanLimit) +
                                         " (step " + fmt(kStep) + ")");
  return make_mode(mu, best, 1);
}

std::vector<DeviatingMode> eigenvalues(double mu, double lambda_abs_max, std::size_t max_count,
                                       const ScanOptions& opts) {
  require_mu(mu);
  if (!(lambda_abs_max > 0.0) || !std::isfinite(lambda_abs_max))
    throw Error(ErrorCode::InvalidArgument, "lambda_abs_max must be positive");
  if (max_count == 0) throw Error(ErrorCode::InvalidArgument, "max_count must be >= 1");
  const double step = opts.step > 0.0 ? opts.step : std::min(1.0, lambda_abs_max / 2048.0);
  const double intervals = std::ceil(2.0 * lambda_abs_max / step);
  if (intervals + 1.0 > static_cast<double>(opts.max_evaluations))
    throw Error(ErrorCode::BudgetError, "scan of [-" + fmt(lambda_abs_max) + ", " +
                                            fmt(lambda_abs_max) + "] with step " + fmt(step) +
                                            " exceeds " + std::to_string(opts.max_evaluations) +
                                            " evaluations");
  const auto n = static_cast<std::size_t>(intervals);

  std::vector<double> roots;
  double prev_x = -lambda_abs_max;
  double prev_f = char_fn(mu, prev_x);
  if (prev_f == 0.0) roots.push_back(prev_x);
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = i == n ? lambda_abs_max : -lambda_abs_max + step * static_cast<double>(i);
    const double fx = char_fn(mu, x);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if (prev_f != 0.0 && (fx > 0.0) != (prev_f > 0.0)) {
      roots.push_back(refine_root(mu, prev_x, x, prev_f, opts.tol));
    }
    prev_x = x;
    prev_f = fx;
  }

  std::sort(roots.begin(), roots.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (roots.size() > max_count) roots.resize(max_count);
  std::vector<DeviatingMode> modes;
  modes.reserve(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) modes.push_back(make_mode(mu, roots[i], i + 1));
  return modes;
}

std::vector<DeviatingMode> first_modes(double mu, std::size_t count, double tol) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  ScanOptions opts;
  opts.tol = tol;
  for (double range = 64.0;; range *= 2.0) {
    auto modes = eigenvalues(mu, range, count, opts);
    if (modes.size() >= count) return modes;
    if (range > 2.5e5)
      throw Error(ErrorCode::NotFound, "only " + std::to_string(modes.size()) + " of " +
                                           std::to_string(count) + " modes within |lambda| <= " +
                                           fmt(range) + " for mu=" + fmt(mu));
  }
}

}  // namespace cylcauchy
