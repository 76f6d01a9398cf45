#include <cmath>

#include "doctest.h"
#include "ipmala/skew.hpp"
#include "test_util.hpp"

using namespace ipmala;

namespace {

// <u, S v> + <v, S u>, normalized by the term magnitudes.
double antisymmetry_residual(const SkewOperator& S, std::span<const double> u,
                             std::span<const double> v) {
  const StateVector su = S.apply(u);
  const StateVector sv = S.apply(v);
  double lhs = 0.0, scale = 1.0;
  for (int i = 0; i < S.dim(); ++i) {
    lhs += u[i] * sv[i] + v[i] * su[i];
    scale += std::abs(u[i] * sv[i]) + std::abs(v[i] * su[i]);
  }
  return std::abs(lhs) / scale;
}

std::vector<SkewOperator> all_kinds(int n, double k, double alpha, double gamma) {
  return {build_s1(n, k, alpha, gamma), build_s2(n), build_s3(n), build_zero(n)};
}

}  // namespace

TEST_CASE("s1 pair weights follow the Jordan recipe") {
  const SkewOperator s1 = build_s1(4, 2.0, 4.0, 1.0 / 6.0);
  REQUIRE(s1.pair_weights().size() == 2);
  CHECK(s1.pair_weights()[0] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(s1.pair_weights()[1] == doctest::Approx(144.0).epsilon(1e-14));

  // n = 2: the only nonzero entries are S_12 = 4, S_21 = -4
  const SkewOperator tiny = build_s1(2, 2.0, 4.0, 1.0 / 6.0);
  StateVector e1{1.0, 0.0}, e2{0.0, 1.0};
  const StateVector c1 = tiny.apply(e1);
  const StateVector c2 = tiny.apply(e2);
  CHECK(c1[0] == 0.0);
  CHECK(c1[1] == doctest::Approx(-4.0));
  CHECK(c2[0] == doctest::Approx(4.0));
  CHECK(c2[1] == 0.0);
}

TEST_CASE("builder validation") {
  CHECK_THROWS_AS(build_s1(5, 2.0, 4.0, 1.0 / 6.0), std::invalid_argument);
  CHECK_THROWS_AS(build_s1(4, 2.0, 1.0, 1.0 / 6.0), std::invalid_argument);
  CHECK_THROWS_AS(build_s1(4, 0.4, 4.0, 1.0 / 6.0), std::invalid_argument);
  CHECK_THROWS_AS(build_s3(7), std::invalid_argument);
  CHECK_THROWS_AS(build_by_name("s9", 4, 2.0, 4.0, 1.0 / 6.0), std::invalid_argument);
}

TEST_CASE("s2 and s3 band patterns") {
  const SkewOperator s2 = build_s2(4);
  StateVector e2{0.0, 1.0, 0.0, 0.0};
  const StateVector out = s2.apply(e2);
  CHECK(out == StateVector{1.0, 0.0, -1.0, 0.0});

  const SkewOperator s3 = build_s3(4);
  Rng rng(8);
  const StateVector x = test::random_vector(4, rng);
  const StateVector sq = s3.apply(s3.apply(x));
  for (int i = 0; i < 4; ++i) CHECK(sq[i] == doctest::Approx(-x[i]).epsilon(1e-14));

  const SkewOperator zero = build_zero(6);
  const StateVector z = zero.apply(test::random_vector(6, rng));
  for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("antisymmetry holds for every kind") {
  Rng rng(99);
  for (const SkewOperator& S : all_kinds(8, 2.0, 4.0, 1.0 / 6.0)) {
    for (int rep = 0; rep < 100; ++rep) {
      const StateVector u = test::random_vector(8, rng);
      const StateVector v = test::random_vector(8, rng);
      CHECK(antisymmetry_residual(S, u, v) < 1e-12);
      // skew quadratic form
      const StateVector su = S.apply(u);
      double quad = 0.0, scale = 1.0;
      for (int i = 0; i < 8; ++i) {
        quad += u[i] * su[i];
        scale += std::abs(u[i] * su[i]);
      }
      CHECK(std::abs(quad) / scale < 1e-12);
    }
  }
}

TEST_CASE("diagonal of S vanishes, so trace(C S) = 0") {
  const Spectrum spec = make_spectrum(8, 2.0);
  for (const SkewOperator& S : all_kinds(8, 2.0, 4.0, 1.0 / 6.0)) {
    double trace = 0.0;
    StateVector e(8, 0.0);
    for (int i = 0; i < 8; ++i) {
      e[i] = 1.0;
      trace += S.apply_tilde(spec, e)[i];
      e[i] = 0.0;
    }
    CHECK(trace == 0.0);
  }
}

TEST_CASE("apply_tilde is C after S, and <S~x, S~^2 x>_C vanishes") {
  const Spectrum spec = make_spectrum(10, 2.0);
  Rng rng(123);
  for (const SkewOperator& S : all_kinds(10, 2.0, 4.0, 1.0 / 6.0)) {
    for (int rep = 0; rep < 50; ++rep) {
      const StateVector x = test::random_vector(10, rng);
      const StateVector t1 = S.apply_tilde(spec, x);
      const StateVector direct = apply_cov(spec, S.apply(x));
      for (int i = 0; i < 10; ++i) CHECK(t1[i] == direct[i]);
      const StateVector t2 = S.apply_tilde(spec, t1);
      double ip = 0.0, scale = 1.0;
      for (int i = 0; i < 10; ++i) {
        const double term = t1[i] * t2[i] / spec.lambda_sq[i];
        ip += term;
        scale += std::abs(term);
      }
      CHECK(std::abs(ip) / scale < 1e-10);
    }
  }
}

TEST_CASE("analytic c constants") {
  const CConstants s1 = c_constants_analytic(SkewKind::JordanWeighted, 4.0, 1.0 / 6.0);
  CHECK(s1.c1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s1.c2 == 0.0);
  CHECK(s1.c3 == 0.0);
  CHECK(c_constants_analytic(SkewKind::JordanWeighted, 2.0, 1.0 / 6.0).c1 ==
        doctest::Approx(6.0).epsilon(1e-14));
  for (SkewKind kind : {SkewKind::FullBidiagonal, SkewKind::JordanUnit, SkewKind::Zero}) {
    const CConstants c = c_constants_analytic(kind, 2.0, 1.0 / 6.0);
    CHECK(c.c1 == 0.0);
    CHECK(c.c2 == 0.0);
    CHECK(c.c3 == 0.0);
  }
  CHECK_THROWS_AS(c_constants_analytic(SkewKind::JordanWeighted, 1.0, 1.0 / 6.0),
                  std::invalid_argument);
}

TEST_CASE("expected_stilde_norm_sq matches a dense evaluation") {
  const int n = 8;
  const Spectrum spec = make_spectrum(n, 2.0);
  for (const SkewOperator& S : all_kinds(n, 2.0, 3.0, 1.0 / 6.0)) {
    // dense S_ij from basis vectors, then sum_i lambda_i^2 sum_j S_ij^2 lambda_j^2
    double expect = 0.0;
    StateVector e(n, 0.0);
    std::vector<StateVector> cols;
    for (int j = 0; j < n; ++j) {
      e[j] = 1.0;
      cols.push_back(S.apply(e));
      e[j] = 0.0;
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        expect += spec.lambda_sq[i] * cols[j][i] * cols[j][i] * spec.lambda_sq[j];
    CHECK(test::rel_diff(expected_stilde_norm_sq(S, spec), expect) < 1e-12);
  }
}

TEST_CASE("estimate_c_constants agrees with the exact finite-n expectation") {
  const int n = 2000;
  const Spectrum spec = make_spectrum(n, 2.0);
  const double gamma = 1.0 / 6.0;

  SUBCASE("s1 at alpha = 4") {
    const SkewOperator S = build_s1(n, 2.0, 4.0, gamma);
    Rng rng(31);
    const CConstantsEstimate est = estimate_c_constants(S, spec, 4.0, gamma, 400, rng);
    const double exact = expected_stilde_norm_sq(S, spec) /
                         std::pow(static_cast<double>(n), 2.0 * 3.0 * gamma);
    CHECK(exact == doctest::Approx(1.0).epsilon(1e-12));  // alpha=4: 2*(n/2)/n
    CHECK(std::abs(est.value.c1 - exact) < 4.0 * est.se.c1);
  }

  SUBCASE("zero matrix gives exactly zero") {
    const SkewOperator S = build_zero(n);
    Rng rng(32);
    const CConstantsEstimate est = estimate_c_constants(S, spec, 2.0, gamma, 100, rng);
    CHECK(est.value.c1 == 0.0);
    CHECK(est.value.c2 == 0.0);
    CHECK(est.value.c3 == 0.0);
  }

  SUBCASE("s3 ratio is already small at n = 1000") {
    const Spectrum small = make_spectrum(1000, 2.0);
    const SkewOperator S = build_s3(1000);
    Rng rng(33);
    const CConstantsEstimate est = estimate_c_constants(S, small, 2.0, gamma, 200, rng);
    CHECK(est.value.c1 < 0.05);
  }

  SUBCASE("sample floor is enforced") {
    const SkewOperator S = build_zero(n);
    Rng rng(34);
    CHECK_THROWS_AS(estimate_c_constants(S, spec, 2.0, gamma, 99, rng), std::invalid_argument);
  }
}

TEST_CASE("kind names round-trip") {
  for (SkewKind kind : {SkewKind::JordanWeighted, SkewKind::FullBidiagonal, SkewKind::JordanUnit,
                        SkewKind::Zero})
    CHECK(kind_from_name(kind_name(kind)) == kind);
}
