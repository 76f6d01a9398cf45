#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ipmala/limit_theory.hpp"

namespace ipmala {

/// Stationary autocorrelation of the limiting per-coordinate OU process:
/// exp(-(ell^2/2) h t).
double ou_autocorr(double t, double ell, double h);

struct DiffusiveCheckConfig {
  int n = 100;
  double k = 2.0;
  double gamma = 1.0 / 6.0;
  double alpha = 2.0;
  std::string matrix = "zero";
  double ell = 0.0;  // 0 = tune via optimal_ell
  std::vector<double> lags = {0.5, 1.0, 2.0};
  int replications = 1000;
  int batches = 10;
  std::uint64_t master_seed = 0;
};

struct LagRow {
  double t = 0.0;  // lag time (diffusive) or dimension N (fluid)
  double empirical = 0.0;
  double theoretical = 0.0;
  double se = 0.0;
  double deviation = 0.0;
};

struct LimitCheckReport {
  std::string regime;
  double ell = 0.0;
  double h = 0.0;
  std::vector<LagRow> rows;
  double max_abs_deviation = 0.0;
  bool pass = false;  // diffusive: every |dev| <= 4 se; fluid: strictly decreasing
};

/// Correlates the first coordinate across lag floor(t * n^{zeta gamma}) on the
/// diffusive clock against the limiting OU curve, over stationarity-started
/// replications; standard errors by replication batching.
LimitCheckReport diffusive_limit_check(const DiffusiveCheckConfig& cfg, int threads = 1);

struct FluidCheckConfig {
  std::vector<int> n_list = {50, 100, 200};
  double k = 2.0;
  double gamma = 0.5;
  double alpha = 1.5;
  std::string matrix = "s2";
  double ell = 1.0;
  double horizon = 1.0;  // time span T on the n^{alpha gamma} clock
  int replications = 4000;
  std::uint64_t master_seed = 0;
};

/// Median over replications of sup_{t <= T} ||x(t) - x(0)|| per dimension;
/// the tau = 0 fluid limit freezes, so the medians must shrink with n.
LimitCheckReport fluid_limit_check(const FluidCheckConfig& cfg, int threads = 1);

void write_limit_check_csv(std::ostream& out, const LimitCheckReport& report);

}  // namespace ipmala
