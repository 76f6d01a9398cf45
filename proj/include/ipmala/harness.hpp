#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ipmala/estimators.hpp"
#include "ipmala/limit_theory.hpp"

namespace ipmala {

struct EllGrid {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
};

/// Full description of a sweep. Parsed from flat key = value text with these
/// field names in snake_case (ell or ell_min/ell_max/ell_points for the grid).
struct ExperimentConfig {
  enum class Objective { MinCt, FixedEll };

  int n = 0;
  double k = 2.0;
  double gamma = 0.0;
  std::optional<double> alpha;  // empty = "mala" sentinel (zero matrix)
  std::string matrix = "zero";
  std::optional<double> ell;
  std::optional<EllGrid> grid;
  long steps = 0;
  int replications = 0;
  std::uint64_t master_seed = 0;
  std::string output;
  Objective objective = Objective::MinCt;
  bool all_coords = false;
  long burn_in = 0;

  double effective_alpha() const { return alpha.value_or(2.0); }
  // Standard MALA (zero matrix) is bookkept as the diffusive case, zeta = 2.
  double zeta() const;
  std::vector<double> ell_values() const;
  void validate() const;
};

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

/// SplitMix64 finalizer over master ^ (rep * P1) ^ (ell * P2) with fixed odd
/// constants P1 = 0x9E3779B97F4A7C15, P2 = 0xC2B2AE3D27D4EB4F. The finalizer
/// is a bijection, so distinct (master, rep, ell) triples with distinct mixed
/// words give distinct streams.
std::uint64_t derive_replication_seed(std::uint64_t master_seed, std::uint64_t replication_index,
                                      std::uint64_t ell_index);

/// One CSV row of a run/sweep. Missing statistics (sd at R = 1, CT with no
/// defined replication) are emitted as empty fields.
struct ResultRow {
  int n = 0;
  double gamma = 0.0;
  std::optional<double> alpha;  // empty = "mala"
  std::string matrix;
  double ell = 0.0;
  long steps = 0;
  int reps = 0;
  double h_hat = 0.0;
  std::optional<double> h_sd;
  double esjd = 0.0;
  std::optional<double> esjd_sd;
  std::optional<double> rho1, rho1_sd;
  std::optional<double> ct, ct_sd;
  double theta2 = 0.0;
  std::optional<double> theta2_sd;
  double theta3 = 0.0;
  std::optional<double> theta3_sd;
  bool selected = false;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // grid rows, then the selected summary row
  int selected_index = -1;
  int dropped_replications = 0;  // replications with no defined CT at any ell
};

/// Runs R independent stationarity-started chains per grid ell. Under the
/// min_ct objective each replication contributes the statistics at its own
/// CT-minimizing ell, and their aggregate forms the selected row (its ell
/// column is the mean selected ell); the full grid is always emitted first.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 1);

inline constexpr const char* kSweepCsvHeader =
    "n,gamma,alpha,matrix,ell,steps,reps,h_hat,h_sd,esjd,esjd_sd,rho1,rho1_sd,ct,ct_sd,"
    "theta2,theta2_sd,theta3,theta3_sd,selected";

/// Shortest-round-trip decimal formatting (%.17g); parsing recovers the exact
/// double.
std::string format_double(double v);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(std::istream& in);

}  // namespace ipmala
