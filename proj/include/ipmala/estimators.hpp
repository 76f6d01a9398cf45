#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "ipmala/kernel.hpp"

namespace ipmala {

class UndefinedStatistic : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Streaming per-chain accumulators (§ acceptance rate, ESJD, lag-1
/// autocorrelation of the first coordinate, theta2 = mean ||X||^2,
/// theta3 = mean sum X_i^3). Single-writer; one instance per chain.
class ChainSummary final : public ChainObserver {
 public:
  /// all_coords switches ESJD and the lag-1 statistic to all-coordinate
  /// (pooled) versions; the default first-coordinate form matches the
  /// production statistics.
  explicit ChainSummary(bool all_coords = false) : all_coords_(all_coords) {}

  void on_step(const StepRecord& rec, std::span<const double> x_prev,
               std::span<const double> x_next) override;

  long steps() const { return steps_; }
  long accepts() const { return accepts_; }
  double acceptance_rate() const;
  double esjd() const;
  double theta2() const;
  double theta3() const;

  /// Sample lag-1 Pearson correlation (sample means subtracted on both
  /// margins). Requires steps >= 10; throws UndefinedStatistic when either
  /// margin has zero variance.
  double rho1() const;

 private:
  bool all_coords_;
  long steps_ = 0;
  long accepts_ = 0;
  double esjd_sum_ = 0.0;
  double theta2_sum_ = 0.0;
  double theta3_sum_ = 0.0;
  // lag-1 pair accumulators: a = value before the step, b = after
  double sa_ = 0.0, sb_ = 0.0, saa_ = 0.0, sbb_ = 0.0, sab_ = 0.0;
  long pairs_ = 0;
};

/// CT = -1 / (n^{zeta gamma} log rho1); requires 0 < rho1 < 1.
double ct_statistic(double rho1, int n, double zeta, double gamma);

/// One replication's worth of statistics; rho1/ct carry defined-ness flags so
/// aggregation can exclude and count them.
struct ReplicationStats {
  double h_hat = 0.0;
  double esjd = 0.0;
  double rho1 = 0.0;
  double ct = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
  bool rho1_defined = false;
  bool ct_defined = false;
};

/// Computes the derived statistics of a finished chain.
ReplicationStats summarize(const ChainSummary& summary, int n, double zeta, double gamma);

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;
};

struct ReplicationReport {
  int replications = 0;
  Aggregate h_hat, esjd, rho1, ct, theta2, theta3;
  int rho1_defined = 0;  // replications entering the rho1/ct aggregates
  int ct_defined = 0;
};

/// Unbiased mean/sd per statistic over R >= 2 replications, reduced in input
/// order. Replications with undefined rho1/ct are excluded from those two
/// aggregates and counted.
ReplicationReport aggregate(std::span<const ReplicationStats> stats);

}  // namespace ipmala
