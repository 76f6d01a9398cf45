#include "ipmala/skew.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ipmala {

namespace {

void require_dim(const SkewOperator& S, std::span<const double> x) {
  if (static_cast<int>(x.size()) != S.dim())
    throw std::invalid_argument("skew operator dimension mismatch");
}

}  // namespace

void SkewOperator::apply(std::span<const double> x, std::span<double> out) const {
  require_dim(*this, x);
  require_dim(*this, out);
  switch (kind_) {
    case SkewKind::Zero:
      for (int i = 0; i < n_; ++i) out[i] = 0.0;
      return;
    case SkewKind::JordanWeighted:
    case SkewKind::JordanUnit:
      for (int p = 0; p < n_ / 2; ++p) {
        const double w = weights_[p];
        out[2 * p] = w * x[2 * p + 1];
        out[2 * p + 1] = -w * x[2 * p];
      }
      return;
    case SkewKind::FullBidiagonal:
      for (int i = 0; i < n_; ++i) {
        double v = 0.0;
        if (i + 1 < n_) v += x[i + 1];
        if (i > 0) v -= x[i - 1];
        out[i] = v;
      }
      return;
  }
}

void SkewOperator::apply_tilde(const Spectrum& s, std::span<const double> x,
                               std::span<double> out) const {
  if (s.n != n_) throw std::invalid_argument("skew operator / spectrum dimension mismatch");
  apply(x, out);
  for (int i = 0; i < n_; ++i) out[i] *= s.lambda_sq[i];
}

StateVector SkewOperator::apply(std::span<const double> x) const {
  StateVector out(n_);
  apply(x, out);
  return out;
}

StateVector SkewOperator::apply_tilde(const Spectrum& s, std::span<const double> x) const {
  StateVector out(n_);
  apply_tilde(s, x, out);
  return out;
}

SkewOperator build_s1(int n, double k, double alpha, double gamma) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("build_s1: n must be even and >= 2");
  if (!(alpha > 1.0)) throw std::invalid_argument("build_s1: alpha must be > 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("build_s1: gamma must be > 0");
  if (!(k > 0.5)) throw std::invalid_argument("build_s1: k must be > 1/2");
  std::vector<double> w(n / 2);
  const double e = (2.0 * (alpha - 1.0) * gamma - 1.0) / 2.0;
  for (int p = 0; p < n / 2; ++p) {
    const double i = static_cast<double>(p + 1);
    w[p] = std::pow(2.0 * i - 1.0, k) * std::pow(2.0 * i, k) * std::pow(i, e);
  }
  return SkewOperator(n, SkewKind::JordanWeighted, std::move(w));
}

SkewOperator build_s2(int n) {
  if (n < 1) throw std::invalid_argument("build_s2: n must be >= 1");
  return SkewOperator(n, SkewKind::FullBidiagonal, {});
}

SkewOperator build_s3(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("build_s3: n must be even and >= 2");
  return SkewOperator(n, SkewKind::JordanUnit, std::vector<double>(n / 2, 1.0));
}

SkewOperator build_zero(int n) {
  if (n < 1) throw std::invalid_argument("build_zero: n must be >= 1");
  return SkewOperator(n, SkewKind::Zero, {});
}

SkewOperator build_by_name(std::string_view name, int n, double k, double alpha, double gamma) {
  switch (kind_from_name(name)) {
    case SkewKind::JordanWeighted:
      return build_s1(n, k, alpha, gamma);
    case SkewKind::FullBidiagonal:
      return build_s2(n);
    case SkewKind::JordanUnit:
      return build_s3(n);
    case SkewKind::Zero:
      return build_zero(n);
  }
  throw std::invalid_argument("unreachable");
}

std::string_view kind_name(SkewKind kind) {
  switch (kind) {
    case SkewKind::JordanWeighted: return "s1";
    case SkewKind::FullBidiagonal: return "s2";
    case SkewKind::JordanUnit: return "s3";
    case SkewKind::Zero: return "zero";
  }
  return "?";
}

SkewKind kind_from_name(std::string_view name) {
  if (name == "s1") return SkewKind::JordanWeighted;
  if (name == "s2") return SkewKind::FullBidiagonal;
  if (name == "s3") return SkewKind::JordanUnit;
  if (name == "zero" || name == "mala") return SkewKind::Zero;
  throw std::invalid_argument("unknown matrix kind '" + std::string(name) +
                              "' (expected s1, s2, s3 or zero)");
}

CConstants c_constants_analytic(SkewKind kind, double alpha, double gamma) {
  if (kind == SkewKind::JordanWeighted) {
    if (!(alpha > 1.0)) throw std::invalid_argument("c_constants_analytic: s1 requires alpha > 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("c_constants_analytic: gamma must be > 0");
    return {1.0 / ((alpha - 1.0) * gamma), 0.0, 0.0};
  }
  return {0.0, 0.0, 0.0};
}

CConstantsEstimate estimate_c_constants(const SkewOperator& S, const Spectrum& s, double alpha,
                                        double gamma, int samples, Rng& rng) {
  if (samples < 100) throw std::invalid_argument("estimate_c_constants: samples must be >= 100");
  if (s.n != S.dim()) throw std::invalid_argument("estimate_c_constants: dimension mismatch");
  const double n = static_cast<double>(s.n);
  const double norm1 = std::pow(n, 2.0 * (alpha - 1.0) * gamma);
  const double norm2 = std::pow(n, 2.0 * (2.0 * alpha - 1.0) * gamma);
  const double norm3 = std::pow(n, 2.0 * (3.0 * alpha - 1.0) * gamma);

  double m1 = 0, m2 = 0, m3 = 0, q1 = 0, q2 = 0, q3 = 0;
  StateVector t1(s.n), t2(s.n), t3(s.n);
  for (int rep = 0; rep < samples; ++rep) {
    const StateVector x = sample_stationary(s, rng);
    S.apply_tilde(s, x, t1);
    S.apply_tilde(s, t1, t2);
    S.apply_tilde(s, t2, t3);
    const double u1 = weighted_norm_sq(s, t1) / norm1;
    const double u2 = weighted_norm_sq(s, t2) / norm2;
    const double u3 = weighted_norm_sq(s, t3) / norm3;
    m1 += u1; m2 += u2; m3 += u3;
    q1 += u1 * u1; q2 += u2 * u2; q3 += u3 * u3;
  }
  const double r = static_cast<double>(samples);
  m1 /= r; m2 /= r; m3 /= r;
  auto se = [r](double mean, double sumsq) {
    const double var = (sumsq - r * mean * mean) / (r - 1.0);
    return std::sqrt(std::max(var, 0.0) / r);
  };
  CConstantsEstimate est;
  est.value = {m1, m2, m3};
  est.se = {se(m1, q1), se(m2, q2), se(m3, q3)};
  est.samples = samples;
  return est;
}

double expected_stilde_norm_sq(const SkewOperator& S, const Spectrum& s) {
  if (s.n != S.dim()) throw std::invalid_argument("expected_stilde_norm_sq: dimension mismatch");
  const int n = s.n;
  double acc = 0.0;
  switch (S.kind()) {
    case SkewKind::Zero:
      return 0.0;
    case SkewKind::JordanWeighted:
    case SkewKind::JordanUnit:
      for (int p = 0; p < n / 2; ++p) {
        const double J2 = S.pair_weights()[p] * S.pair_weights()[p];
        acc += 2.0 * s.lambda_sq[2 * p] * J2 * s.lambda_sq[2 * p + 1];
      }
      return acc;
    case SkewKind::FullBidiagonal:
      for (int i = 0; i < n; ++i) {
        double row = 0.0;
        if (i + 1 < n) row += s.lambda_sq[i + 1];
        if (i > 0) row += s.lambda_sq[i - 1];
        acc += s.lambda_sq[i] * row;
      }
      return acc;
  }
  return acc;
}

}  // namespace ipmala
