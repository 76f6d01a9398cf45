#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipmala/rng.hpp"
#include "ipmala/spectrum.hpp"

namespace ipmala {

enum class SkewKind { JordanWeighted, FullBidiagonal, JordanUnit, Zero };

/// Antisymmetric operator S stored by its band structure (Jordan 2x2 blocks
/// or the +/-1 bidiagonal); apply is O(n). Entries never depend on n beyond
/// the band extent. Immutable after construction.
class SkewOperator {
 public:
  int dim() const { return n_; }
  SkewKind kind() const { return kind_; }
  bool is_zero() const { return kind_ == SkewKind::Zero; }

  // Pair weights J_i, i = 1..n/2, for the Jordan kinds (unit weights for s3).
  const std::vector<double>& pair_weights() const { return weights_; }

  // out = S x
  void apply(std::span<const double> x, std::span<double> out) const;
  // out = C S x  (the S-tilde operator)
  void apply_tilde(const Spectrum& s, std::span<const double> x, std::span<double> out) const;

  StateVector apply(std::span<const double> x) const;
  StateVector apply_tilde(const Spectrum& s, std::span<const double> x) const;

 private:
  friend SkewOperator build_s1(int, double, double, double);
  friend SkewOperator build_s2(int);
  friend SkewOperator build_s3(int);
  friend SkewOperator build_zero(int);

  SkewOperator(int n, SkewKind kind, std::vector<double> weights)
      : n_(n), kind_(kind), weights_(std::move(weights)) {}

  int n_;
  SkewKind kind_;
  std::vector<double> weights_;
};

/// Weighted Jordan-block matrix with J_i = (2i-1)^k (2i)^k i^{(2(alpha-1)gamma-1)/2}
/// over pair index i = 1..n/2. Requires even n, alpha > 1, gamma > 0, k > 1/2.
SkewOperator build_s1(int n, double k, double alpha, double gamma);

/// Full bidiagonal: S_{i,i+1} = 1, S_{i+1,i} = -1 for every i.
SkewOperator build_s2(int n);

/// Unit Jordan blocks (S^2 = -Id for even n). Requires even n.
SkewOperator build_s3(int n);

SkewOperator build_zero(int n);

/// Canonical config-file names: "s1", "s2", "s3", "zero".
SkewOperator build_by_name(std::string_view name, int n, double k, double alpha, double gamma);
std::string_view kind_name(SkewKind kind);
SkewKind kind_from_name(std::string_view name);

struct CConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

/// Limiting constants of the three families: S1 gives (1/((alpha-1)gamma), 0, 0),
/// S2/S3/Zero give (0, 0, 0).
CConstants c_constants_analytic(SkewKind kind, double alpha, double gamma);

struct CConstantsEstimate {
  CConstants value;  // sample means of the normalized statistics at this n
  CConstants se;     // standard errors
  int samples = 0;
};

/// Monte Carlo probe over x ~ pi of
///   ||S~x||_C^2 / n^{2(alpha-1)gamma},  ||S~^2 x||_C^2 / n^{2(2alpha-1)gamma},
///   ||S~^3 x||_C^2 / n^{2(3alpha-1)gamma}.
/// Requires samples >= 100.
CConstantsEstimate estimate_c_constants(const SkewOperator& S, const Spectrum& s, double alpha,
                                        double gamma, int samples, Rng& rng);

/// Exact E_pi ||S~ x||_C^2 = sum_i lambda_i^2 sum_j S_ij^2 lambda_j^2,
/// evaluated from the band structure. Ground truth for the c1 probe.
double expected_stilde_norm_sq(const SkewOperator& S, const Spectrum& s);

}  // namespace ipmala
