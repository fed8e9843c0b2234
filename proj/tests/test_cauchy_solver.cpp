#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "cylcauchy/cauchy_solver.hpp"
#include "cylcauchy/coefficient_io.hpp"
#include "cylcauchy/error.hpp"

using namespace cylcauchy;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

std::shared_ptr<const OperatorSpectrum> dirichlet(std::size_t k_max) {
  return std::make_shared<const OperatorSpectrum>(dirichlet_spectrum_1d(k_max));
}

template <class F>
GridSamples sample(std::size_t nx, std::size_t nt, F&& f) {
  GridSamples g{nx, nt, std::vector<double>(nx * nt)};
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nt; ++j) g.values[i * nt + j] = f(g.x(i), g.t(j));
  return g;
}

// f~_k1 = value(k) for k <= K, everything else zero.
template <class F>
ModeCoefficients first_column(std::shared_ptr<const OperatorSpectrum> s, std::size_t K, F&& value) {
  ModeCoefficients c(s, K, 1, Provenance::Synthetic);
  for (std::size_t k = 1; k <= K; ++k) c.set(k, 1, value(k));
  return c;
}

}  // namespace

TEST_CASE("projection of a single reflected mode") {
  const auto s = dirichlet(3);
  const auto modes = compute_modes(*s, 3, 3);
  const auto& v11 = modes.at(1, 1);
  const auto f = sample(129, 129, [&](double x, double t) {
    return v11.lambda * eval_basis_1d(1, x) * eigenfunction(v11, 1.0 - t);
  });
  const auto c = project_f(f, s, modes);
  CHECK(c.provenance() == Provenance::GridProjected);
  CHECK(c(1, 1) == doctest::Approx(v11.lambda).epsilon(1e-6));
  for (std::size_t k = 1; k <= 3; ++k)
    for (std::size_t m = 1; m <= 3; ++m)
      if (k != 1 || m != 1) CHECK(std::abs(c(k, m)) <= 1e-6);

  const auto zero = project_f(sample(64, 64, [](double, double) { return 0.0; }), s, modes);
  for (double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("reflection convention regression") {
  const auto s = dirichlet(3);
  const auto modes = compute_modes(*s, 3, 4);
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::size_t m = 1; m <= 4; ++m) {
      const auto& md = modes.at(k, m);
      const auto reflected = project_f(
          sample(129, 257, [&](double x, double t) { return eval_basis_1d(k, x) * eigenfunction(md, 1.0 - t); }), s,
          modes);
      CHECK(reflected(k, m) == doctest::Approx(1.0).epsilon(1e-6));
      double others = 0.0;
      for (std::size_t kk = 1; kk <= 3; ++kk)
        for (std::size_t mm = 1; mm <= 4; ++mm)
          if (kk != k || mm != m) others = std::max(others, std::abs(reflected(kk, mm)));
      CHECK(others <= 1e-6);
    }
  }
  // without the reflection in f the mass is not on (1,1)
  const auto& v11 = modes.at(1, 1);
  const auto plain = project_f(
      sample(129, 257, [&](double x, double t) { return eval_basis_1d(1, x) * eigenfunction(v11, t); }), s, modes);
  CHECK(std::abs(plain(1, 1) - 1.0) > 0.1);
}

TEST_CASE("Bessel/Parseval limit for u_1(x) t^2") {
  const auto s = dirichlet(1);
  const auto f = sample(129, 1025, [](double x, double t) { return eval_basis_1d(1, x) * t * t; });
  // f~_1m decays like 1/m here, so the gap to int t^4 = 0.2 closes like 1/M
  std::vector<double> sums;
  for (std::size_t M : {8, 16, 32}) {
    const auto c = project_f(f, s, compute_modes(*s, 1, M));
    double sum = 0.0;
    for (std::size_t m = 1; m <= M; ++m) sum += c(1, m) * c(1, m);
    CHECK(sum <= 0.2 + 1e-9);
    if (!sums.empty()) CHECK(sum > sums.back());
    sums.push_back(sum);
  }
  const double gap_ratio = (0.2 - sums[1]) / (0.2 - sums[2]);
  CHECK(gap_ratio > 1.8);
  CHECK(gap_ratio < 2.2);
  CHECK(2.0 * sums[2] - sums[1] == doctest::Approx(0.2).epsilon(5e-3));
}

TEST_CASE("criterion families") {
  const std::size_t K = 40;
  const auto s = dirichlet(K);
  const auto lambda1 = compute_modes(*s, K, 1).lambda1();

  SUBCASE("p-series is convergent") {
    const auto c = first_column(s, K, [&](std::size_t k) { return lambda1[k - 1] / static_cast<double>(k); });
    const auto r = criterion(c, lambda1);
    CHECK(r.verdict == Verdict::Convergent);
    CHECK(r.window == 10);
    CHECK(r.partial_sums.back() == doctest::Approx(1.6202439630069352).epsilon(1e-12));  // sum_{k<=40} 1/k^2
    CHECK(r.partial_sums.back() < std::numbers::pi * std::numbers::pi / 6.0);
    CHECK(r.decay_exponent == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("constant terms are divergent") {
    const auto c = first_column(s, K, [&](std::size_t k) { return lambda1[k - 1]; });
    const auto r = criterion(c, lambda1);
    CHECK(r.verdict == Verdict::Divergent);
    for (std::size_t k = 1; k <= K; ++k) CHECK(r.partial_sums[k - 1] == doctest::Approx(k).epsilon(1e-14));
  }
  SUBCASE("exponentially small data can be admissible") {
    const auto c = first_column(s, K, [](std::size_t k) { return std::exp(-static_cast<double>(k)); });
    const auto r = criterion(c, lambda1);
    CHECK(r.verdict == Verdict::Convergent);
    // d_k ~ 1/(16 k^4)
    const double d40 = std::pow(std::exp(-40.0) / lambda1[39], 2);
    CHECK(d40 * 16.0 * std::pow(40.0, 4) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.decay_exponent == doctest::Approx(4.0).epsilon(1e-2));
  }
  SUBCASE("geometric family stabilizes") {
    const auto c = first_column(s, K, [&](std::size_t k) { return lambda1[k - 1] * std::pow(0.5, k); });
    const auto r = criterion(c, lambda1);
    CHECK(r.verdict == Verdict::Convergent);
    CHECK(r.tail_ratio == doctest::Approx(0.25).epsilon(1e-9));
    const double sK = r.partial_sums.back();
    CHECK(sK - r.partial_sums[K - 1 - r.window] <= 1e-10 * sK);
  }
  SUBCASE("exponential growth is divergent, flat noise is indeterminate") {
    const auto grow = first_column(s, K, [&](std::size_t k) {
      return lambda1[k - 1] * std::pow(1.2, k) * (k % 2 == 0 ? 1.0 : 0.9);
    });
    CHECK(criterion(grow, lambda1).verdict == Verdict::Divergent);
    const auto flat = first_column(s, K, [&](std::size_t k) {
      return lambda1[k - 1] / std::pow(static_cast<double>(k), 0.6);
    });
    CHECK(criterion(flat, lambda1).verdict == Verdict::Indeterminate);
  }
  SUBCASE("partial sums are nondecreasing") {
    std::mt19937_64 rng(0);
    std::normal_distribution<double> n01;
    const auto c = first_column(s, K, [&](std::size_t) { return n01(rng); });
    const auto r = criterion(c, lambda1);
    for (std::size_t k = 1; k < K; ++k) CHECK(r.partial_sums[k] >= r.partial_sums[k - 1]);
    for (std::size_t k = 0; k < K; ++k) CHECK(r.amplifications[k] == 1.0 / lambda1[k]);
  }

  const auto small = first_column(dirichlet(4), 4, [](std::size_t) { return 1.0; });
  const auto r4 = criterion(small, lambda1);
  CHECK(r4.verdict == Verdict::InsufficientData);
  CHECK(r4.partial_sums.size() == 4);
  std::vector<double> with_zero(lambda1.begin(), lambda1.begin() + 5);
  with_zero[2] = 0.0;
  CHECK(code_of([&] { criterion(first_column(s, 5, [](std::size_t) { return 1.0; }), with_zero); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("solve: identity and manufactured data") {
  const auto s = dirichlet(6);
  const auto modes = compute_modes(*s, 6, 4);

  ModeCoefficients one(s, 6, 4, Provenance::Synthetic);
  one.set(1, 1, modes.lambda(1, 1));
  const auto u1 = solve(one, modes);
  CHECK(u1.coefficient(1, 1) == 1.0);
  CHECK(u1.norm_sq == 1.0);
  CHECK(u1.evaluate(std::numbers::pi / 2, 0.7) ==
        doctest::Approx(eval_basis_1d(1, std::numbers::pi / 2) * eigenfunction(modes.at(1, 1), 0.7)).epsilon(1e-15));

  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> a(24);
  ModeCoefficients f(s, 6, 4, Provenance::Synthetic);
  for (std::size_t k = 1; k <= 6; ++k)
    for (std::size_t m = 1; m <= 4; ++m) {
      a[(k - 1) * 4 + m - 1] = d(rng) * std::pow(0.1, k);
      f.set(k, m, modes.lambda(k, m) * a[(k - 1) * 4 + m - 1]);
    }
  const auto u = solve(f, modes);
  for (std::size_t i = 0; i < 24; ++i) CHECK(u.coefficients[i] == doctest::Approx(a[i]).epsilon(1e-15));
  CHECK(residual(u, f) <= 1e-14);

  // Parseval bookkeeping
  double first = 0.0, rest = 0.0;
  for (std::size_t k = 1; k <= 6; ++k)
    for (std::size_t m = 1; m <= 4; ++m) {
      const double q = f(k, m) / modes.lambda(k, m);
      (m == 1 ? first : rest) += q * q;
    }
  CHECK(u.norm_sq_first == first);
  CHECK(u.norm_sq_rest == rest);
  CHECK(u.norm_sq == first + rest);
}

TEST_CASE("solve: end-to-end reconstruction through a sampled grid") {
  const auto s = dirichlet(2);
  const auto modes = compute_modes(*s, 2, 4);
  const auto& v11 = modes.at(1, 1);
  const auto& v12 = modes.at(1, 2);
  // L u* sampled through L u_km(x, t) = lambda_km u_km(x, 1 - t)
  const auto f = sample(256, 256, [&](double x, double t) {
    return eval_basis_1d(1, x) *
           (v11.lambda * eigenfunction(v11, 1.0 - t) + 0.5 * v12.lambda * eigenfunction(v12, 1.0 - t));
  });
  const auto u = solve(project_f(f, s, modes), modes);
  double err = 0.0;
  for (std::size_t k = 1; k <= 2; ++k)
    for (std::size_t m = 1; m <= 4; ++m) {
      const double expect = (k == 1 && m == 1) ? 1.0 : (k == 1 && m == 2) ? 0.5 : 0.0;
      err += std::pow(u.coefficient(k, m) - expect, 2);
    }
  CHECK(std::sqrt(err / 1.25) <= 1e-6);

  // the grid file format carries the same data
  const auto reparsed = parse_grid(format_grid(f));
  CHECK(reparsed.nx == 256);
  const auto u2 = solve(project_f(reparsed, s, modes), modes);
  CHECK(u2.coefficient(1, 2) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("solve is linear") {
  const auto s = dirichlet(8);
  const auto modes = compute_modes(*s, 8, 3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ModeCoefficients f(s, 8, 3, Provenance::Synthetic), g(s, 8, 3, Provenance::Synthetic),
      h(s, 8, 3, Provenance::Synthetic);
  const double alpha = 0.7, beta = -2.5;
  for (std::size_t k = 1; k <= 8; ++k)
    for (std::size_t m = 1; m <= 3; ++m) {
      const double scale = std::pow(0.05, k);
      f.set(k, m, d(rng) * scale);
      g.set(k, m, d(rng) * scale);
      h.set(k, m, alpha * f(k, m) + beta * g(k, m));
    }
  const auto uf = solve(f, modes), ug = solve(g, modes), uh = solve(h, modes);
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < uh.coefficients.size(); ++i) {
    diff += std::pow(uh.coefficients[i] - (alpha * uf.coefficients[i] + beta * ug.coefficients[i]), 2);
    ref += uh.coefficients[i] * uh.coefficients[i];
  }
  CHECK(std::sqrt(diff / ref) <= 1e-13);
}

TEST_CASE("subspace split") {
  const std::size_t K = 10, M = 4;
  const auto s = dirichlet(K);
  const auto modes = compute_modes(*s, K, M);
  std::mt19937_64 rng(0);
  std::normal_distribution<double> n01;
  ModeCoefficients f(s, K, M, Provenance::Synthetic);
  for (std::size_t k = 1; k <= K; ++k)
    for (std::size_t m = 1; m <= M; ++m) f.set(k, m, n01(rng));

  const auto all = split_subspace(f, K);
  CHECK(all.tilde_part.norm() == 0.0);
  for (std::size_t i = 0; i < K * M; ++i) CHECK(all.hat_part.values()[i] == f.values()[i]);

  const auto one = split_subspace(f, 1);
  for (std::size_t k = 1; k <= K; ++k)
    for (std::size_t m = 1; m <= M; ++m) {
      const bool tilde = m == 1 && k >= 2;
      CHECK(one.tilde_part(k, m) == (tilde ? f(k, m) : 0.0));
      CHECK(one.hat_part(k, m) == (tilde ? 0.0 : f(k, m)));
      CHECK(one.tilde_part(k, m) + one.hat_part(k, m) == f(k, m));
    }

  // stability on the hat subspace, p = 3
  const std::size_t p = 3;
  double c_p = 4.0;
  for (std::size_t k = 1; k <= p; ++k) c_p = std::max(c_p, 1.0 / std::abs(modes.lambda(k, 1)));
  for (int trial = 0; trial < 20; ++trial) {
    ModeCoefficients r(s, K, M, Provenance::Synthetic);
    for (std::size_t k = 1; k <= K; ++k)
      for (std::size_t m = 1; m <= M; ++m) r.set(k, m, n01(rng));
    const auto hat = split_subspace(r, p).hat_part;
    const auto u = solve(hat, modes, {.allow_ill_posed = true});
    CHECK(std::sqrt(u.norm_sq) <= c_p * hat.norm());
    for (std::size_t k = p + 1; k <= K; ++k) CHECK(u.coefficient(k, 1) == 0.0);
  }

  CHECK(code_of([&] { split_subspace(f, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { split_subspace(f, K + 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("residual") {
  const auto s = dirichlet(5);
  const auto modes = compute_modes(*s, 5, 2);
  ModeCoefficients f(s, 5, 2, Provenance::Synthetic);
  for (std::size_t k = 1; k <= 5; ++k)
    for (std::size_t m = 1; m <= 2; ++m) f.set(k, m, std::pow(0.3, k) / m);
  auto u = solve(f, modes);
  CHECK(residual(u, f) <= 1e-14);

  const double delta = 1e-3;
  u.coefficients[1 * 2 + 1] += delta;  // (2, 2)
  CHECK(residual(u, f) == doctest::Approx(std::abs(modes.lambda(2, 2)) * delta / f.norm()).epsilon(1e-9));

  std::fill(u.coefficients.begin(), u.coefficients.end(), 0.0);
  CHECK(residual(u, f) == doctest::Approx(1.0).epsilon(1e-15));

  ModeCoefficients other(s, 4, 2, Provenance::Synthetic);
  CHECK(code_of([&] { residual(u, other); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Hadamard amplification") {
  const auto s = dirichlet(12);
  std::vector<std::size_t> ks;
  for (std::size_t k = 2; k <= 12; ++k) ks.push_back(k);
  const auto rows = hadamard_amplification(*s, ks, 1.0);
  REQUIRE(rows.size() == ks.size());
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].amplification > rows[i - 1].amplification);
  const auto& r10 = rows[8];
  CHECK(r10.k == 10);
  CHECK(r10.mu == 100.0);
  CHECK(r10.amplification == doctest::Approx(55.07).epsilon(1e-3));
  CHECK(r10.solution_norm == r10.amplification);

  const auto& r5 = rows[3];
  CHECK(r10.amplification / r5.amplification == doctest::Approx(std::exp(5.0) / 4.0).epsilon(0.05));

  // epsilon_k = lambda_k1: vanishing data, unit solution
  for (std::size_t k : {4, 8, 12}) {
    const std::size_t one[] = {k};
    const double eps = *hadamard_amplification(*s, one, 1.0).front().lambda_k1;
    const auto row = hadamard_amplification(*s, one, eps).front();
    CHECK(row.solution_norm == doctest::Approx(1.0).epsilon(1e-15));
  }

  const auto huge = parse_spectrum("1,1\n2,400000\n");
  const std::size_t both[] = {1, 2};
  const auto hr = hadamard_amplification(huge, both, 1.0);
  CHECK(hr[0].lambda_k1.has_value());
  CHECK_FALSE(hr[1].lambda_k1.has_value());
  CHECK(std::isinf(hr[1].amplification));

  CHECK(code_of([&] { hadamard_amplification(*s, ks, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("solver error paths") {
  const auto tensor = std::make_shared<const OperatorSpectrum>(tensor_spectrum(2, 4, 3));
  const auto tmodes = compute_modes(*tensor, 3, 2);
  const auto grid = sample(64, 64, [](double, double) { return 1.0; });
  CHECK(code_of([&] { project_f(grid, tensor, tmodes); }) == ErrorCode::Unsupported);

  const auto s = dirichlet(20);
  const auto modes = compute_modes(*s, 20, 2);
  CHECK(code_of([&] { project_f(sample(32, 64, [](double, double) { return 1.0; }), s, modes); }) ==
        ErrorCode::ResolutionError);
  // 63 panels carry 8 points per wave only up to k = 15
  CHECK(code_of([&] { project_f(grid, s, modes); }) == ErrorCode::ResolutionError);
  CHECK_NOTHROW(project_f(grid, s, compute_modes(*s, 15, 2)));

  const auto divergent = first_column(s, 20, [&](std::size_t k) { return modes.lambda(k, 1) * k; });
  const ModeTable m1 = compute_modes(*s, 20, 1);
  CHECK(code_of([&] { solve(divergent, m1); }) == ErrorCode::RefusedIllPosed);
  const auto forced = solve(divergent, m1, {.allow_ill_posed = true});
  CHECK(forced.coefficient(20, 1) == doctest::Approx(20.0).epsilon(1e-14));

  auto tiny = smallest_eigenvalue(1.0);
  tiny.lambda = 1e-300;
  const ModeTable broken(1, 1, {tiny});
  ModeCoefficients c(s, 1, 1, Provenance::Synthetic);
  c.set(1, 1, 1.0);
  CHECK(code_of([&] { solve(c, broken); }) == ErrorCode::AmplificationOverflow);

  CHECK(code_of([&] { c.set(1, 1, std::nan("")); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { c.set(2, 1, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { compute_modes(*s, 21, 1); }) == ErrorCode::InvalidArgument);

  const auto ext = std::make_shared<const OperatorSpectrum>(parse_spectrum("1,1\n2,4\n"));
  const auto u = solve(first_column(ext, 2, [](std::size_t) { return 1.0; }), compute_modes(*ext, 2, 1),
                       {.allow_ill_posed = true});
  CHECK_FALSE(u.evaluable());
  CHECK(code_of([&] { u.evaluate(1.0, 0.5); }) == ErrorCode::Unsupported);
}
