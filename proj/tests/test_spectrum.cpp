#include <cmath>

#include "doctest.h"
#include "ipmala/spectrum.hpp"
#include "test_util.hpp"

using namespace ipmala;

TEST_CASE("make_spectrum evaluates i^-k") {
  const Spectrum s = make_spectrum(4, 2.0);
  CHECK(s.lambda[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.lambda[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s.lambda[2] == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(s.lambda[3] == doctest::Approx(0.0625).epsilon(1e-15));

  const Spectrum one = make_spectrum(1, 1.0);
  CHECK(one.lambda[0] == 1.0);

  // partial sum of i^-4, summed independently
  double expect = 0.0;
  for (int i = 1; i <= 10; ++i) expect += std::pow(static_cast<double>(i), -4.0);
  CHECK(make_spectrum(10, 2.0).trace() == doctest::Approx(expect).epsilon(1e-14));
  CHECK(expect == doctest::Approx(1.0820366).epsilon(1e-7));
}

TEST_CASE("make_spectrum rejects bad arguments") {
  CHECK_THROWS_AS(make_spectrum(0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_spectrum(10, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_spectrum(10, 0.3), std::invalid_argument);
}

TEST_CASE("sample_stationary matches the target moments") {
  const Spectrum s = make_spectrum(10, 2.0);
  Rng rng(2024);
  const int m = 100000;
  double norm_mean = 0.0;
  std::vector<double> coord_sum(10, 0.0), coord_sq(10, 0.0);
  for (int rep = 0; rep < m; ++rep) {
    const StateVector x = sample_stationary(s, rng);
    double n2 = 0.0;
    for (int i = 0; i < 10; ++i) {
      n2 += x[i] * x[i];
      coord_sum[i] += x[i];
      coord_sq[i] += x[i] * x[i];
    }
    norm_mean += n2;
  }
  norm_mean /= m;
  // Var(||x||^2) = 2 sum lambda_i^4
  double var = 0.0;
  for (double l2 : s.lambda_sq) var += 2.0 * l2 * l2;
  const double se = std::sqrt(var / m);
  CHECK(std::abs(norm_mean - s.trace()) < 3.0 * se);
  for (int i = 0; i < 10; ++i) {
    const double mean_i = coord_sum[i] / m;
    const double se_i = s.lambda[i] / std::sqrt(static_cast<double>(m));
    CHECK(std::abs(mean_i) < 3.0 * se_i);
    // empirical variance converges to lambda_i^2 (4 se)
    const double var_i = coord_sq[i] / m - mean_i * mean_i;
    const double se_var = s.lambda_sq[i] * std::sqrt(2.0 / m);
    CHECK(std::abs(var_i - s.lambda_sq[i]) < 4.0 * se_var);
  }
}

TEST_CASE("sample_stationary is deterministic under a fixed seed") {
  const Spectrum s = make_spectrum(8, 1.0);
  Rng a(77), b(77);
  const StateVector xa = sample_stationary(s, a);
  const StateVector xb = sample_stationary(s, b);
  CHECK(xa == xb);
}

TEST_CASE("weighted norm and log density") {
  const Spectrum s10 = make_spectrum(10, 2.0);
  StateVector x(s10.lambda);  // x_i = lambda_i, every term is 1
  CHECK(weighted_norm_sq(s10, x) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(log_density(s10, x) == doctest::Approx(-5.0).epsilon(1e-14));

  StateVector zero(10, 0.0);
  CHECK(weighted_norm_sq(s10, zero) == 0.0);
  CHECK(log_density(s10, zero) == 0.0);

  const Spectrum s2 = make_spectrum(2, 2.0);
  StateVector ones{1.0, 1.0};
  CHECK(weighted_norm_sq(s2, ones) == doctest::Approx(17.0).epsilon(1e-14));

  // differences of log densities reduce to weighted norms
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const StateVector a = test::random_vector(10, rng);
    const StateVector b = test::random_vector(10, rng);
    const double lhs = log_density(s10, a) - log_density(s10, b);
    const double rhs = -0.5 * (weighted_norm_sq(s10, a) - weighted_norm_sq(s10, b));
    CHECK(test::rel_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("log density decreases along rays from the mode") {
  const Spectrum s = make_spectrum(6, 1.0);
  Rng rng(11);
  const StateVector dir = test::random_vector(6, rng);
  double prev = log_density(s, StateVector(6, 0.0));
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    StateVector x(6);
    for (int i = 0; i < 6; ++i) x[i] = t * dir[i];
    const double ld = log_density(s, x);
    CHECK(ld < prev);
    prev = ld;
  }
}

TEST_CASE("covariance application") {
  const Spectrum s2 = make_spectrum(2, 2.0);
  const StateVector v{1.0, 1.0};
  const StateVector half = apply_cov_sqrt(s2, v);
  CHECK(half[0] == doctest::Approx(1.0));
  CHECK(half[1] == doctest::Approx(0.25));

  const Spectrum s = make_spectrum(12, 1.5);
  Rng rng(3);
  const StateVector w = test::random_vector(12, rng);
  const StateVector twice = apply_cov_sqrt(s, apply_cov_sqrt(s, w));
  const StateVector cov = apply_cov(s, w);
  for (int i = 0; i < 12; ++i) CHECK(test::rel_diff(twice[i], cov[i]) < 1e-14);

  // e_1 is fixed when lambda_1 = 1
  StateVector e1(12, 0.0);
  e1[0] = 1.0;
  CHECK(apply_cov(s, e1) == e1);

  // ||C^{1/2} z||_C = ||z||
  for (int rep = 0; rep < 30; ++rep) {
    const StateVector z = test::random_vector(12, rng);
    const double lhs = weighted_norm_sq(s, apply_cov_sqrt(s, z));
    CHECK(test::rel_diff(lhs, test::dot(z, z)) < 1e-12);
  }
}

TEST_CASE("dimension mismatches are rejected") {
  const Spectrum s = make_spectrum(4, 2.0);
  StateVector wrong(3, 0.0);
  CHECK_THROWS_AS(weighted_norm_sq(s, wrong), std::invalid_argument);
  CHECK_THROWS_AS(apply_cov(s, wrong), std::invalid_argument);
}
