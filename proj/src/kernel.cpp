#include "ipmala/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace ipmala {

namespace {

void require_dims(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                  std::span<const double> x) {
  if (s.n != p.n || S.dim() != p.n || static_cast<int>(x.size()) != p.n)
    throw std::invalid_argument("kernel: inconsistent dimensions");
}

// out = (1 - sigma^2/2) x + sigma^alpha C S x; scratch receives S x.
void proposal_mean(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                   std::span<const double> x, std::span<double> scratch, std::span<double> out) {
  const int n = p.n;
  const double shrink = 1.0 - 0.5 * p.sigma * p.sigma;
  if (S.is_zero()) {
    for (int i = 0; i < n; ++i) out[i] = shrink * x[i];
    return;
  }
  const double drift = std::pow(p.sigma, p.alpha);
  S.apply(x, scratch);
  for (int i = 0; i < n; ++i) out[i] = shrink * x[i] + drift * s.lambda_sq[i] * scratch[i];
}

double weighted_dist_sq(const Spectrum& s, std::span<const double> u, std::span<const double> v) {
  double acc = 0.0;
  for (int i = 0; i < s.n; ++i) {
    const double d = u[i] - v[i];
    acc += d * d / s.lambda_sq[i];
  }
  return acc;
}

}  // namespace

ProposalParams make_proposal_params(double ell, double gamma, double alpha, int n) {
  if (!(ell > 0.0)) throw std::invalid_argument("proposal params: ell must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("proposal params: gamma must be > 0");
  if (!(alpha >= 1.0)) throw std::invalid_argument("proposal params: alpha must be >= 1");
  if (n < 1) throw std::invalid_argument("proposal params: n must be >= 1");
  ProposalParams p;
  p.ell = ell;
  p.gamma = gamma;
  p.alpha = alpha;
  p.n = n;
  p.sigma = ell * std::pow(static_cast<double>(n), -gamma);
  return p;
}

Proposal propose(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                 std::span<const double> x, Rng& rng) {
  require_dims(p, s, S, x);
  Proposal out;
  out.z.resize(p.n);
  out.y.resize(p.n);
  rng.fill_normal(out.z);
  StateVector scratch(p.n);
  proposal_mean(p, s, S, x, scratch, out.y);
  for (int i = 0; i < p.n; ++i) out.y[i] += p.sigma * s.lambda[i] * out.z[i];
  return out;
}

double log_proposal_density(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                            std::span<const double> from, std::span<const double> to) {
  require_dims(p, s, S, from);
  require_dims(p, s, S, to);
  StateVector scratch(p.n), mean(p.n);
  proposal_mean(p, s, S, from, scratch, mean);
  return -weighted_dist_sq(s, to, mean) / (2.0 * p.sigma * p.sigma);
}

double log_accept_ratio(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                        std::span<const double> x, std::span<const double> y) {
  require_dims(p, s, S, x);
  require_dims(p, s, S, y);
  StateVector scratch(p.n), mean(p.n);
  const double inv2s2 = 1.0 / (2.0 * p.sigma * p.sigma);
  proposal_mean(p, s, S, x, scratch, mean);
  const double forward = weighted_dist_sq(s, y, mean);
  proposal_mean(p, s, S, y, scratch, mean);
  const double backward = weighted_dist_sq(s, x, mean);
  return -0.5 * (weighted_norm_sq(s, y) - weighted_norm_sq(s, x)) +
         (forward - backward) * inv2s2;
}

double log_accept_ratio_closed_form(const ProposalParams& p, const Spectrum& s,
                                    const SkewOperator& S, std::span<const double> x,
                                    std::span<const double> y) {
  require_dims(p, s, S, x);
  require_dims(p, s, S, y);
  const double sig2 = p.sigma * p.sigma;
  double q = -sig2 / 8.0 * (weighted_norm_sq(s, y) - weighted_norm_sq(s, x));
  if (!S.is_zero()) {
    StateVector t(p.n);
    S.apply_tilde(s, x, t);
    const double stx = weighted_norm_sq(s, t);
    S.apply_tilde(s, y, t);
    const double sty = weighted_norm_sq(s, t);
    q += 0.5 * std::pow(p.sigma, 2.0 * p.alpha - 2.0) * (stx - sty);
    S.apply(y, t);
    double cross = 0.0;
    for (int i = 0; i < p.n; ++i) cross += t[i] * x[i];
    q += 2.0 * std::pow(p.sigma, p.alpha - 2.0) * cross;
  }
  return q;
}

namespace {

// Shared transition core; buffers are caller-owned so the chain loop never
// allocates. On return y holds the proposal and z the noise.
struct TransitionScratch {
  StateVector y, z, mean, scratch;
  explicit TransitionScratch(int n) : y(n), z(n), mean(n), scratch(n) {}
};

double propose_and_ratio(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                         std::span<const double> x, Rng& rng, TransitionScratch& w) {
  const int n = p.n;
  rng.fill_normal(w.z);
  proposal_mean(p, s, S, x, w.scratch, w.mean);
  double z_norm_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    w.y[i] = w.mean[i] + p.sigma * s.lambda[i] * w.z[i];
    z_norm_sq += w.z[i] * w.z[i];
  }
  // ||y - m(x)||_C^2 = sigma^2 ||z||^2, so the forward term is ||z||^2 / 2.
  proposal_mean(p, s, S, w.y, w.scratch, w.mean);
  const double backward = weighted_dist_sq(s, x, w.mean);
  return -0.5 * (weighted_norm_sq(s, w.y) - weighted_norm_sq(s, x)) + 0.5 * z_norm_sq -
         backward / (2.0 * p.sigma * p.sigma);
}

}  // namespace

std::pair<StateVector, StepRecord> mh_step(const ProposalParams& p, const Spectrum& s,
                                           const SkewOperator& S, std::span<const double> x,
                                           Rng& rng) {
  require_dims(p, s, S, x);
  TransitionScratch w(p.n);
  const double q = propose_and_ratio(p, s, S, x, rng, w);
  const bool accepted = std::log(rng.uniform_pos()) <= q;
  StepRecord rec;
  rec.accepted = accepted;
  rec.q_value = q;
  rec.proposal = w.y;
  StateVector next = accepted ? std::move(w.y) : StateVector(x.begin(), x.end());
  return {std::move(next), std::move(rec)};
}

StateVector run_chain(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                      long steps, StateVector x0, Rng& rng,
                      std::span<ChainObserver* const> sinks) {
  if (steps < 1) throw std::invalid_argument("run_chain: steps must be >= 1");
  require_dims(p, s, S, x0);
  StateVector x = std::move(x0);
  TransitionScratch w(p.n);
  StepRecord rec;
  for (long k = 0; k < steps; ++k) {
    const double q = propose_and_ratio(p, s, S, x, rng, w);
    const bool accepted = std::log(rng.uniform_pos()) <= q;
    rec.accepted = accepted;
    rec.q_value = q;
    rec.proposal = w.y;  // reuses the record's capacity after the first step
    std::span<const double> next = accepted ? std::span<const double>(w.y)
                                            : std::span<const double>(x);
    for (ChainObserver* sink : sinks) sink->on_step(rec, x, next);
    if (accepted) x.swap(w.y);
  }
  return x;
}

}  // namespace ipmala
