#pragma once

#include <span>
#include <vector>

#include "ipmala/rng.hpp"

namespace ipmala {

using StateVector = std::vector<double>;

/// Diagonal covariance of the Gaussian target N(0, C), C = diag(lambda_i^2),
/// in the eigenbasis. Immutable after construction; safe to share.
struct Spectrum {
  int n = 0;
  double decay_k = 0.0;
  std::vector<double> lambda;     // lambda_i = i^{-k}, non-increasing
  std::vector<double> lambda_sq;  // lambda_i^2

  // Sum of lambda_i^2 = stationary E||x||^2.
  double trace() const;
};

/// lambda_i = i^{-k}. Requires n >= 1 and k > 1/2 (square-summable tail).
Spectrum make_spectrum(int n, double k);

/// Exact stationary draw: x_i = lambda_i * rho_i, rho_i iid N(0,1).
StateVector sample_stationary(const Spectrum& s, Rng& rng);

/// ||x||_C^2 = sum_i x_i^2 / lambda_i^2.
double weighted_norm_sq(const Spectrum& s, std::span<const double> x);

/// log pi(x) up to the additive normalizing constant: -||x||_C^2 / 2.
double log_density(const Spectrum& s, std::span<const double> x);

/// Coordinate-wise multiplication by lambda_i^2 (C v) resp. lambda_i (C^{1/2} v).
StateVector apply_cov(const Spectrum& s, std::span<const double> v);
StateVector apply_cov_sqrt(const Spectrum& s, std::span<const double> v);

}  // namespace ipmala
