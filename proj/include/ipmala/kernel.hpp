#pragma once

#include <span>
#include <utility>

#include "ipmala/rng.hpp"
#include "ipmala/skew.hpp"
#include "ipmala/spectrum.hpp"

namespace ipmala {

/// Proposal scale parameters; sigma = ell * n^{-gamma}.
struct ProposalParams {
  double ell = 0.0;
  double gamma = 0.0;
  double alpha = 1.0;
  int n = 0;
  double sigma = 0.0;
};

/// Validating constructor (ell > 0, gamma > 0, alpha >= 1, n >= 1).
/// Tests may brace-initialize the struct directly, e.g. with sigma = 0.
ProposalParams make_proposal_params(double ell, double gamma, double alpha, int n);

struct Proposal {
  StateVector y;  // proposed state
  StateVector z;  // standard normal noise used (for diagnostics)
};

/// y = x - (sigma^2/2) x + sigma^alpha C S x + sigma C^{1/2} z.
Proposal propose(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                 std::span<const double> x, Rng& rng);

/// log q(from -> to), up to an additive constant shared by all pairs at fixed
/// params (it cancels in every ratio below).
double log_proposal_density(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                            std::span<const double> from, std::span<const double> to);

/// Q(x, y) from first principles:
///   log pi(y) - log pi(x) + log q(y,x) - log q(x,y).
/// This is the production path; the closed form below is its independent oracle.
double log_accept_ratio(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                        std::span<const double> x, std::span<const double> y);

/// The expanded form of Q(x, y):
///   -sigma^2/8 (||y||_C^2 - ||x||_C^2)
///   + sigma^{2 alpha - 2}/2 (||C S x||_C^2 - ||C S y||_C^2)
///   + 2 sigma^{alpha - 2} <S y, x>.
double log_accept_ratio_closed_form(const ProposalParams& p, const Spectrum& s,
                                    const SkewOperator& S, std::span<const double> x,
                                    std::span<const double> y);

struct StepRecord {
  bool accepted = false;
  double q_value = 0.0;  // log MH ratio of the proposed move
  StateVector proposal;
};

/// One Metropolis-Hastings transition: propose, accept iff log u <= Q.
std::pair<StateVector, StepRecord> mh_step(const ProposalParams& p, const Spectrum& s,
                                           const SkewOperator& S, std::span<const double> x,
                                           Rng& rng);

/// Streaming sink fed every transition; x_prev/x_next are views valid only
/// during the call.
class ChainObserver {
 public:
  virtual ~ChainObserver() = default;
  virtual void on_step(const StepRecord& rec, std::span<const double> x_prev,
                       std::span<const double> x_next) = 0;
};

/// Runs `steps` transitions from x0, feeding each one to every sink; the full
/// trace is never materialized. Requires steps >= 1. Sink exceptions propagate.
StateVector run_chain(const ProposalParams& p, const Spectrum& s, const SkewOperator& S,
                      long steps, StateVector x0, Rng& rng,
                      std::span<ChainObserver* const> sinks);

}  // namespace ipmala
