#pragma once

// Spectrum of the one-dimensional reflected Cauchy problem
//
//   v''(t) - mu v(t) = lambda v(1 - t),   0 < t < 1,   v(0) = v'(0) = 0.
//
// Writing s = t - 1/2, the even part of v in s solves e'' = (mu + lambda) e
// and the odd part solves o'' = (mu - lambda) o, so
//
//   v(t) = c1 E(mu + lambda, s) + c2 O(mu - lambda, s)
//
// with the entire functions E(a, s) = cosh(sqrt(a) s), O(a, s) = sinh(sqrt(a) s)/sqrt(a)
// (continued to cos/sin for a < 0). The initial conditions give the
// characteristic function
//
//   Phi(mu, lambda) = E(a, 1/2) E(b, 1/2) - a O(a, 1/2) O(b, 1/2),   a = mu + lambda, b = mu - lambda,
//
// which is smooth in lambda, equals 1 at lambda = 0 and has no spurious root
// at lambda = +-mu. For 0 < lambda < mu its sign agrees with the log form
// varpi(mu, lambda), used to resolve the exponentially small eigenvalue.

#include <cstddef>
#include <vector>

namespace cylcauchy {

/// Even evolution function: cosh(sqrt(a) tau), cos(sqrt(-a) tau) for a < 0.
double even_fn(double a, double tau);
/// Odd evolution function: sinh(sqrt(a) tau)/sqrt(a), tau at a = 0, sin(sqrt(-a) tau)/sqrt(-a) for a < 0.
double odd_fn(double a, double tau);

/// Characteristic function. Throws RangeError when the hyperbolic factors
/// would overflow, i.e. (sqrt(max(a,0)) + sqrt(max(b,0)))/2 > 700.
double char_fn(double mu, double lambda);

/// |Phi| divided by the magnitude of its two terms; a scale-free root residual.
double char_fn_relative(double mu, double lambda);

/// ln coth(sqrt(mu+lambda)/2) + ln coth(sqrt(mu-lambda)/2) - atanh(lambda/mu),
/// for 0 < lambda < mu and sqrt(mu) <= 600.
double varpi(double mu, double lambda);
/// Derivative of varpi in lambda.
double varpi_derivative(double mu, double lambda);

/// Cap on sqrt(mu) past which the smallest eigenvalue is not representable.
inline constexpr double kMaxSqrtMu = 600.0;

struct AsymptoticLambda1 {
  double leading;  ///< 4 mu exp(-sqrt(mu))
  double refined;  ///< 2 mu ln coth(sqrt(mu)/2), zero of the linearized varpi
};

AsymptoticLambda1 asymptotic_lambda1(double mu);

/// Right end of the monotonicity interval of varpi, mu/(4 mu + theta) with theta = 1/2.
double monotonicity_bound(double mu);

/// One eigenpair of the reflected problem. The eigenfunction is
/// v(t) = (c1 E(mu+lambda, t-1/2) + c2 O(mu-lambda, t-1/2)) / norm with
/// c1 = O(mu-lambda, 1/2), c2 = E(mu+lambda, 1/2) (sign-flipped so v(1) > 0).
struct DeviatingMode {
  double mu = 0.0;
  std::size_t m = 0;
  double lambda = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double norm = 1.0;
};

/// Builds c1, c2 and the exact L2(0,1) norm for a root lambda.
DeviatingMode make_mode(double mu, double lambda, std::size_t m);

/// v(t) for t in [0, 1].
double eigenfunction(const DeviatingMode& mode, double t);

/// Smallest-|lambda| eigenvalue. Uses a varpi bracket around the refined
/// asymptotic value when it is well inside (0, mu), otherwise scans Phi
/// outward from 0. `tol` is the relative root tolerance (>= 1e-14).
DeviatingMode smallest_eigenvalue(double mu, double tol = 1e-12);

struct ScanOptions {
  double step = 0.0;                 ///< 0 selects min(1, lambda_abs_max/2048)
  std::size_t max_evaluations = 1'000'000;
  double tol = 1e-12;
};

/// All sign changes of Phi on [-lambda_abs_max, lambda_abs_max], refined and
/// sorted by |lambda|, at most max_count modes. Pairs of roots closer than
/// one scan step are not resolved.
std::vector<DeviatingMode> eigenvalues(double mu, double lambda_abs_max, std::size_t max_count,
                                       const ScanOptions& opts = {});

/// The first `count` modes by |lambda|, widening the scan range until enough
/// roots are found.
std::vector<DeviatingMode> first_modes(double mu, std::size_t count, double tol = 1e-12);

}  // namespace cylcauchy
