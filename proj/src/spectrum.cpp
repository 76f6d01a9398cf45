#include "ipmala/spectrum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ipmala {

namespace {

void require_match(const Spectrum& s, std::span<const double> x) {
  if (static_cast<int>(x.size()) != s.n)
    throw std::invalid_argument("spectrum/vector dimension mismatch: n=" + std::to_string(s.n) +
                                " vs " + std::to_string(x.size()));
}

}  // namespace

double Spectrum::trace() const {
  double t = 0.0;
  for (double l2 : lambda_sq) t += l2;
  return t;
}

Spectrum make_spectrum(int n, double k) {
  if (n < 1) throw std::invalid_argument("make_spectrum: n must be >= 1");
  if (!(k > 0.5)) throw std::invalid_argument("make_spectrum: decay exponent k must be > 1/2");
  Spectrum s;
  s.n = n;
  s.decay_k = k;
  s.lambda.resize(n);
  s.lambda_sq.resize(n);
  for (int i = 0; i < n; ++i) {
    const double l = std::pow(static_cast<double>(i + 1), -k);
    s.lambda[i] = l;
    s.lambda_sq[i] = l * l;
  }
  return s;
}

StateVector sample_stationary(const Spectrum& s, Rng& rng) {
  StateVector x(s.n);
  for (int i = 0; i < s.n; ++i) x[i] = s.lambda[i] * rng.normal();
  return x;
}

double weighted_norm_sq(const Spectrum& s, std::span<const double> x) {
  require_match(s, x);
  double acc = 0.0;
  for (int i = 0; i < s.n; ++i) acc += x[i] * x[i] / s.lambda_sq[i];
  return acc;
}

double log_density(const Spectrum& s, std::span<const double> x) {
  return -0.5 * weighted_norm_sq(s, x);
}

StateVector apply_cov(const Spectrum& s, std::span<const double> v) {
  require_match(s, v);
  StateVector out(s.n);
  for (int i = 0; i < s.n; ++i) out[i] = s.lambda_sq[i] * v[i];
  return out;
}

StateVector apply_cov_sqrt(const Spectrum& s, std::span<const double> v) {
  require_match(s, v);
  StateVector out(s.n);
  for (int i = 0; i < s.n; ++i) out[i] = s.lambda[i] * v[i];
  return out;
}

}  // namespace ipmala
