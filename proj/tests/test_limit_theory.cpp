#include <cmath>

#include "doctest.h"
#include "ipmala/limit_theory.hpp"
#include "test_util.hpp"

using namespace ipmala;

TEST_CASE("gaussian min-expectation closed form") {
  // 2 Phi(-1/2): the mu + delta^2/2 = 0 case
  CHECK(gaussian_min_expect(-0.5, 1.0) == doctest::Approx(0.6170750774519738).epsilon(1e-12));
  // G > 0 a.s. in the limit
  CHECK(gaussian_min_expect(50.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // deep negative mean, tiny variance: e^{mu + delta^2/2} Phi(990) + Phi(-1000)
  CHECK(gaussian_min_expect(-10.0, 0.01) ==
        doctest::Approx(std::exp(-10.0 + 5e-5)).epsilon(1e-9));
  CHECK_THROWS_AS(gaussian_min_expect(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_min_expect(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("gaussian negative part closed form") {
  CHECK(gaussian_neg_part(-0.5, 1.0) == doctest::Approx(0.3085375387259869).epsilon(1e-12));
  CHECK(gaussian_neg_part(0.0, 1.0) ==
        doctest::Approx(std::exp(0.5) * norm_cdf(-1.0)).epsilon(1e-12));
  CHECK(gaussian_neg_part(0.0, 1.0) == doctest::Approx(0.2615782918651232).epsilon(1e-10));
  // min-expectation = negative part + Phi(mu/delta)
  Rng rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const double mu = 6.0 * (rng.uniform_pos() - 0.5);
    const double delta = 0.05 + 3.0 * rng.uniform_pos();
    const double lhs = gaussian_min_expect(mu, delta);
    const double rhs = gaussian_neg_part(mu, delta) + norm_cdf(mu / delta);
    CHECK(test::rel_diff(lhs, std::min(rhs, 1.0)) < 1e-12);
  }
}

TEST_CASE("closed forms match Monte Carlo") {
  Rng rng(99);
  for (int rep = 0; rep < 5; ++rep) {
    const double mu = 4.0 * (rng.uniform_pos() - 0.5);
    const double delta = 0.2 + 2.0 * rng.uniform_pos();
    const int m = 400000;
    double s1 = 0.0, s1sq = 0.0, s2 = 0.0, s2sq = 0.0;
    for (int i = 0; i < m; ++i) {
      const double g = mu + delta * rng.normal();
      const double v1 = std::min(1.0, std::exp(g));
      const double v2 = g < 0.0 ? std::exp(g) : 0.0;
      s1 += v1;
      s1sq += v1 * v1;
      s2 += v2;
      s2sq += v2 * v2;
    }
    const double m1 = s1 / m, m2 = s2 / m;
    const double se1 = std::sqrt((s1sq / m - m1 * m1) / m);
    const double se2 = std::sqrt((s2sq / m - m2 * m2) / m);
    CHECK(std::abs(gaussian_min_expect(mu, delta) - m1) < 4.0 * se1);
    CHECK(std::abs(gaussian_neg_part(mu, delta) - m2) < 4.0 * se2);
  }
}

TEST_CASE("log_norm_cdf far tail") {
  // against the exact Phi for moderate x, asymptotics beyond
  CHECK(log_norm_cdf(-1.0) == doctest::Approx(std::log(norm_cdf(-1.0))).epsilon(1e-12));
  CHECK(log_norm_cdf(-36.0) == doctest::Approx(std::log(norm_cdf(-36.0))).epsilon(1e-8));
  // continuity across the asymptotic switch
  CHECK(test::rel_diff(log_norm_cdf(-36.9999), log_norm_cdf(-37.0001)) < 1e-6);
  CHECK(std::isfinite(log_norm_cdf(-1e6)));
}

TEST_CASE("zeta rule and regimes") {
  CHECK(zeta_exponent(1.5) == 1.5);
  CHECK(zeta_exponent(2.0) == 2.0);
  CHECK(zeta_exponent(30.0) == 2.0);
  CHECK(make_limit_regime(1.5, 0.5).diffusive == false);
  CHECK(make_limit_regime(2.0, 1.0 / 6.0).diffusive == true);
  CHECK(classify_gamma(1.0 / 6.0) == GammaRegime::EqualOneSixth);
  CHECK(classify_gamma(0.1667) == GammaRegime::EqualOneSixth);
  CHECK(classify_gamma(0.5) == GammaRegime::GreaterThanOneSixth);
  CHECK_THROWS_AS(classify_gamma(0.1), std::invalid_argument);
}

TEST_CASE("a and b constants") {
  const AbConstants zero = ab_constants({0.0, 0.0, 0.0}, 2.0, 1.5);
  CHECK(zero.a == 0.0);
  CHECK(zero.b == 0.0);
  const AbConstants s1 = ab_constants({2.0, 0.0, 0.0}, 4.0, 1.0);
  CHECK(s1.a == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(s1.b == doctest::Approx(8.0).epsilon(1e-14));
  // c2 = c3 = 0 forces b = 2a
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const double c1 = 5.0 * rng.uniform_pos();
    const double alpha = 1.0 + 10.0 * rng.uniform_pos();
    const double ell = 0.1 + 2.0 * rng.uniform_pos();
    const AbConstants ab = ab_constants({c1, 0.0, 0.0}, alpha, ell);
    CHECK(ab.b == 2.0 * ab.a);
  }
}

TEST_CASE("limiting acceptance probability") {
  // a = b = 0 at ell = 2: 2 Phi(-1)
  CHECK(limiting_accept(0.0, 0.0, 2.0, GammaRegime::EqualOneSixth) ==
        doctest::Approx(0.3173105078629141).epsilon(1e-12));
  // b = 2a equals the Jordan form exactly
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const double a = 5.0 * rng.uniform_pos();
    const double ell = 0.1 + 3.0 * rng.uniform_pos();
    const double h1 = limiting_accept(a, 2.0 * a, ell, GammaRegime::EqualOneSixth);
    const double h2 = h_jordan(ell, a);
    CHECK(test::rel_diff(h1, h2) < 1e-12);
  }
  // gamma > 1/6 with b = 0 degenerates to acceptance one
  CHECK(limiting_accept(0.0, 0.0, 1.0, GammaRegime::GreaterThanOneSixth) == 1.0);
}

TEST_CASE("h_jordan basics") {
  CHECK(h_jordan(2.0, 0.0) == doctest::Approx(0.3173105078629141).epsilon(1e-12));
  CHECK(h_jordan(1e-4, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
  // strictly decreasing in ell at fixed a
  for (double a : {0.0, 0.5, 3.0}) {
    double prev = 2.0;
    for (double ell = 0.2; ell < 4.0; ell += 0.2) {
      const double h = h_jordan(ell, a);
      CHECK(h < prev);
      prev = h;
    }
  }
}

TEST_CASE("tau and nu") {
  // b = 2a: tau vanishes exactly and nu = h/2
  for (double a : {0.0, 1.0, 7.0}) {
    const DriftConstants d = tau_nu(a, 2.0 * a, 1.3, GammaRegime::EqualOneSixth);
    CHECK(d.tau == 0.0);
    CHECK(d.nu == 0.5 * d.h);
  }
  // generic (a, b): consistency with the two Gaussian primitives
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const double a = 3.0 * rng.uniform_pos();
    const double b = 3.0 * rng.uniform_pos();
    const double ell = 0.3 + 2.0 * rng.uniform_pos();
    const DriftConstants d = tau_nu(a, b, ell, GammaRegime::EqualOneSixth);
    const double l6 = std::pow(ell, 6.0);
    const double mu = -l6 / 32.0 - a;
    const double delta = std::sqrt(l6 / 16.0 + b);
    CHECK(test::rel_diff(d.h, gaussian_min_expect(mu, delta)) < 1e-12);
    CHECK(test::rel_diff(d.nu, gaussian_neg_part(mu, delta)) < 1e-12);
    CHECK(test::rel_diff(d.tau, d.h - 2.0 * d.nu) < 1e-12);
    CHECK(std::abs(d.tau) <= d.h + 1e-15);
  }
}

TEST_CASE("optimal ell for standard MALA") {
  const OptimalEll opt = optimal_ell(SkewKind::Zero, 2.0, 1.0 / 6.0, 2.0);
  CHECK(opt.h_star == doctest::Approx(0.574).epsilon(0.001 / 0.574));
  CHECK(opt.ell_star == doctest::Approx(1.6503).epsilon(1e-3));
  CHECK_FALSE(opt.multimodal);
}

TEST_CASE("optimal ell rejects the fluid regime") {
  CHECK_THROWS_AS(optimal_ell(SkewKind::FullBidiagonal, 1.5, 0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(optimal_ell(SkewKind::Zero, 2.0, 0.5, 2.0), std::invalid_argument);
}

TEST_CASE("theory table reproduces the S1 optimal acceptances") {
  const double alphas[] = {2.0, 4.0, 6.0, 8.0, 10.0, 15.0, 30.0};
  const double expect[] = {0.234, 0.574, 0.702, 0.767, 0.803, 0.848, 0.884};
  const std::vector<TheoryRow> rows = theory_table(alphas, 1.0 / 6.0);
  REQUIRE(rows.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(std::abs(rows[i].h_star - expect[i]) < 0.002);
  for (int i = 1; i < 7; ++i) CHECK(rows[i].h_star > rows[i - 1].h_star);
  // the gamma ~ 1/6 band accepts the CLI's 0.1667 spelling
  const std::vector<TheoryRow> rounded = theory_table(alphas, 0.1667);
  for (int i = 0; i < 7; ++i) CHECK(std::abs(rounded[i].h_star - expect[i]) < 0.002);
}

TEST_CASE("limit constants bundle") {
  const CConstants c = c_constants_analytic(SkewKind::JordanWeighted, 4.0, 1.0 / 6.0);
  const LimitConstants lc = limit_constants(c, 4.0, 1.0, GammaRegime::EqualOneSixth);
  CHECK(lc.a == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(lc.b == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(lc.tau == 0.0);
  CHECK(lc.h > 0.0);
  CHECK(lc.h < 1.0);
}
