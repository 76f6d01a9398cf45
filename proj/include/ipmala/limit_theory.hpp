#pragma once

#include <span>
#include <vector>

#include "ipmala/skew.hpp"

namespace ipmala {

/// Standard normal CDF, and its log (stable far into the left tail).
double norm_cdf(double x);
double log_norm_cdf(double x);

/// E(1 ^ e^G) for G ~ N(mu, delta^2):
///   e^{mu + delta^2/2} Phi(-mu/delta - delta) + Phi(mu/delta).
/// Stable for |mu|/delta large. Requires delta > 0.
double gaussian_min_expect(double mu, double delta);

/// E(e^G 1_{G<0}) = e^{mu + delta^2/2} Phi(-mu/delta - delta). Requires delta > 0.
double gaussian_neg_part(double mu, double delta);

/// zeta exponent of the step-count clock: alpha when alpha < 2, else 2.
double zeta_exponent(double alpha);

struct LimitRegime {
  double alpha = 0.0;
  double gamma = 0.0;
  double zeta = 0.0;
  bool diffusive = false;  // alpha >= 2 (step cost n^{1/3} at gamma = 1/6)
};
LimitRegime make_limit_regime(double alpha, double gamma);

enum class GammaRegime { EqualOneSixth, GreaterThanOneSixth };

/// Classifies gamma for the limiting-acceptance branch; gamma < 1/6 is rejected
/// (acceptance degenerates there).
GammaRegime classify_gamma(double gamma);

struct AbConstants {
  double a = 0.0;
  double b = 0.0;
};

/// a = 2 l^{2(alpha-1)} c1 + l^{2(2alpha-1)} c2 / 2
/// b = 4 l^{2(alpha-1)} c1 + 5 l^{2(2alpha-1)} c2 + l^{2(3alpha-1)} c3
AbConstants ab_constants(const CConstants& c, double alpha, double ell);

/// Limiting average acceptance probability h.
/// gamma = 1/6 branch: mean -l^6/32 - a, variance l^6/16 + b.
/// gamma > 1/6 branch: mean -a, variance b; b = 0 degenerates to h = 1.
double limiting_accept(double a, double b, double ell, GammaRegime regime);

/// Jordan-form specialization (b = 2a): h^J = 2 Phi((-l^6/32 - a)/sqrt(l^6/16 + 2a)).
double h_jordan(double ell, double a);

struct DriftConstants {
  double h = 0.0;
  double nu = 0.0;   // E(e^Q 1_{Q<0})
  double tau = 0.0;  // h - 2 nu; exactly 0 when b = 2a
};
DriftConstants tau_nu(double a, double b, double ell, GammaRegime regime);

struct LimitConstants {
  double a = 0.0, b = 0.0;
  double h = 0.0, nu = 0.0, tau = 0.0;
};
LimitConstants limit_constants(const CConstants& c, double alpha, double ell, GammaRegime regime);

struct OptimalEll {
  double ell_star = 0.0;
  double h_star = 0.0;
  bool multimodal = false;  // grid prescan saw several local maxima; grid argmax returned
};

/// Maximizes the limiting diffusion speed l^2 h over l in (0, 10] (129-point
/// prescan + golden section to 1e-6). Diffusive regime only: alpha >= 2 and
/// gamma ~ 1/6. Uses the analytic c-constants of the kind.
OptimalEll optimal_ell(SkewKind kind, double alpha, double gamma, double k);

struct TheoryRow {
  double alpha = 0.0;
  double ell_star = 0.0;
  double h_star = 0.0;
};

/// One optimal_ell row per alpha for the S1 family.
std::vector<TheoryRow> theory_table(std::span<const double> alphas, double gamma);

}  // namespace ipmala
