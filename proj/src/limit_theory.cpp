#include "ipmala/limit_theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ipmala {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.9189385332046727;
// Width of the gamma band treated as the gamma = 1/6 branch (covers inputs
// like 0.1667 from config files).
constexpr double kGammaTol = 5e-4;

bool is_one_sixth(double gamma) { return std::abs(gamma - 1.0 / 6.0) <= kGammaTol; }

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double log_norm_cdf(double x) {
  if (x > -37.0) {
    return std::log(0.5 * std::erfc(-x / kSqrt2));
  }
  // Mills-ratio asymptotics; erfc underflows past x ~ -37.5.
  const double x2 = x * x;
  const double corr = -1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - kLogSqrt2Pi + std::log1p(corr);
}

double gaussian_min_expect(double mu, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("gaussian_min_expect: delta must be > 0");
  const double t1 = std::exp(mu + 0.5 * delta * delta + log_norm_cdf(-mu / delta - delta));
  const double t2 = norm_cdf(mu / delta);
  return std::min(t1 + t2, 1.0);
}

double gaussian_neg_part(double mu, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("gaussian_neg_part: delta must be > 0");
  return std::exp(mu + 0.5 * delta * delta + log_norm_cdf(-mu / delta - delta));
}

double zeta_exponent(double alpha) { return alpha < 2.0 ? alpha : 2.0; }

LimitRegime make_limit_regime(double alpha, double gamma) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("limit regime requires alpha >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("limit regime requires gamma > 0");
  return {alpha, gamma, zeta_exponent(alpha), alpha >= 2.0};
}

GammaRegime classify_gamma(double gamma) {
  if (is_one_sixth(gamma)) return GammaRegime::EqualOneSixth;
  if (gamma > 1.0 / 6.0) return GammaRegime::GreaterThanOneSixth;
  throw std::invalid_argument("gamma < 1/6: acceptance degenerates, no limiting branch");
}

AbConstants ab_constants(const CConstants& c, double alpha, double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("ab_constants: ell must be > 0");
  if (!(alpha >= 1.0)) throw std::invalid_argument("ab_constants: alpha must be >= 1");
  AbConstants ab;
  // Zero coefficients are skipped so huge powers of ell never produce inf*0.
  if (c.c1 != 0.0) {
    const double p1 = std::pow(ell, 2.0 * (alpha - 1.0));
    ab.a += 2.0 * p1 * c.c1;
    ab.b += 4.0 * p1 * c.c1;
  }
  if (c.c2 != 0.0) {
    const double p2 = std::pow(ell, 2.0 * (2.0 * alpha - 1.0));
    ab.a += 0.5 * p2 * c.c2;
    ab.b += 5.0 * p2 * c.c2;
  }
  if (c.c3 != 0.0) ab.b += std::pow(ell, 2.0 * (3.0 * alpha - 1.0)) * c.c3;
  return ab;
}

double limiting_accept(double a, double b, double ell, GammaRegime regime) {
  if (regime == GammaRegime::EqualOneSixth) {
    const double l6 = std::pow(ell, 6.0);
    const double var = l6 / 16.0 + b;
    if (!(var > 0.0)) throw std::invalid_argument("limiting_accept: variance must be positive");
    return gaussian_min_expect(-l6 / 32.0 - a, std::sqrt(var));
  }
  if (b == 0.0) return 1.0;  // Q degenerates to a point mass at 0
  if (b < 0.0) throw std::invalid_argument("limiting_accept: b must be >= 0");
  return gaussian_min_expect(-a, std::sqrt(b));
}

double h_jordan(double ell, double a) {
  if (!(ell > 0.0)) throw std::invalid_argument("h_jordan: ell must be > 0");
  if (!(a >= 0.0)) throw std::invalid_argument("h_jordan: a must be >= 0");
  const double l6 = std::pow(ell, 6.0);
  return 2.0 * norm_cdf((-l6 / 32.0 - a) / std::sqrt(l6 / 16.0 + 2.0 * a));
}

DriftConstants tau_nu(double a, double b, double ell, GammaRegime regime) {
  const double h = limiting_accept(a, b, ell, regime);
  if (b == 2.0 * a) return {h, 0.5 * h, 0.0};  // Jordan family: tau vanishes identically
  double mu, var;
  if (regime == GammaRegime::EqualOneSixth) {
    const double l6 = std::pow(ell, 6.0);
    mu = -l6 / 32.0 - a;
    var = l6 / 16.0 + b;
  } else {
    mu = -a;
    var = b;
  }
  const double nu = gaussian_neg_part(mu, std::sqrt(var));
  const double tau = h - 2.0 * nu;
  return {h, nu, tau};
}

LimitConstants limit_constants(const CConstants& c, double alpha, double ell, GammaRegime regime) {
  const AbConstants ab = ab_constants(c, alpha, ell);
  const DriftConstants d = tau_nu(ab.a, ab.b, ell, regime);
  return {ab.a, ab.b, d.h, d.nu, d.tau};
}

namespace {

double diffusion_speed(SkewKind kind, double alpha, double gamma, double ell) {
  const CConstants c = c_constants_analytic(kind, alpha, gamma);
  const AbConstants ab = ab_constants(c, alpha, ell);
  return ell * ell * limiting_accept(ab.a, ab.b, ell, GammaRegime::EqualOneSixth);
}

}  // namespace

OptimalEll optimal_ell(SkewKind kind, double alpha, double gamma, double k) {
  if (!(alpha >= 2.0))
    throw std::invalid_argument("optimal_ell: fluid regime (alpha < 2) has no diffusion speed");
  if (!is_one_sixth(gamma))
    throw std::invalid_argument("optimal_ell: diffusive tuning requires gamma = 1/6");
  if (!(k > 0.5)) throw std::invalid_argument("optimal_ell: k must be > 1/2");

  constexpr int kGridPoints = 129;
  constexpr double kEllMax = 10.0;
  double grid_val[kGridPoints];
  double best = -1.0;
  int ibest = 0;
  for (int j = 0; j < kGridPoints; ++j) {
    const double ell = kEllMax * (j + 1) / kGridPoints;
    grid_val[j] = diffusion_speed(kind, alpha, gamma, ell);
    if (grid_val[j] > best) {
      best = grid_val[j];
      ibest = j;
    }
  }
  // Modes below 1e-8 of the peak are underflow wiggle, not structure.
  int modes = 0;
  for (int j = 1; j + 1 < kGridPoints; ++j) {
    if (grid_val[j] > grid_val[j - 1] && grid_val[j] > grid_val[j + 1] &&
        grid_val[j] > 1e-8 * best)
      ++modes;
  }
  const double step = kEllMax / kGridPoints;
  double lo = std::max(step * ibest, 1e-9);  // one grid step below the argmax
  double hi = std::min(step * (ibest + 2.0), kEllMax);
  OptimalEll out;
  if (modes > 1) {
    out.multimodal = true;
    out.ell_star = step * (ibest + 1.0);
    out.h_star = best / (out.ell_star * out.ell_star);
    return out;
  }
  // Golden-section to 1e-6 in ell.
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = diffusion_speed(kind, alpha, gamma, x1);
  double f2 = diffusion_speed(kind, alpha, gamma, x2);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = diffusion_speed(kind, alpha, gamma, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = diffusion_speed(kind, alpha, gamma, x1);
    }
  }
  out.ell_star = 0.5 * (lo + hi);
  out.h_star = diffusion_speed(kind, alpha, gamma, out.ell_star) / (out.ell_star * out.ell_star);
  return out;
}

std::vector<TheoryRow> theory_table(std::span<const double> alphas, double gamma) {
  std::vector<TheoryRow> rows;
  rows.reserve(alphas.size());
  for (double alpha : alphas) {
    const OptimalEll opt = optimal_ell(SkewKind::JordanWeighted, alpha, gamma, 2.0);
    rows.push_back({alpha, opt.ell_star, opt.h_star});
  }
  return rows;
}

}  // namespace ipmala
