#include "ipmala/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ipmala/kernel.hpp"

namespace ipmala {

double ExperimentConfig::zeta() const {
  if (matrix == "zero" || !alpha.has_value()) return 2.0;
  return zeta_exponent(*alpha);
}

std::vector<double> ExperimentConfig::ell_values() const {
  if (ell.has_value()) return {*ell};
  std::vector<double> v(grid->points);
  for (int j = 0; j < grid->points; ++j)
    v[j] = grid->min + (grid->max - grid->min) * j / (grid->points - 1);
  return v;
}

void ExperimentConfig::validate() const {
  if (n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (!(k > 0.5)) throw std::invalid_argument("config: k must be > 1/2");
  if (!(gamma > 0.0)) throw std::invalid_argument("config: gamma must be > 0");
  if (steps < 100) throw std::invalid_argument("config: steps must be >= 100");
  if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("config: burn_in must be >= 0");
  if (alpha.has_value() && !(*alpha >= 1.0))
    throw std::invalid_argument("config: alpha must be >= 1");
  if (!alpha.has_value() && matrix != "zero")
    throw std::invalid_argument("config: alpha = mala implies matrix = zero");
  kind_from_name(matrix);
  if (matrix == "s1" && !(effective_alpha() > 1.0))
    throw std::invalid_argument("config: matrix s1 requires alpha > 1");
  if (ell.has_value() == grid.has_value())
    throw std::invalid_argument("config: set exactly one of ell and ell_min/ell_max/ell_points");
  if (grid.has_value()) {
    if (!(grid->min > 0.0) || !(grid->min < grid->max))
      throw std::invalid_argument("config: ell grid needs 0 < min < max");
    if (grid->points < 2) throw std::invalid_argument("config: ell grid needs points >= 2");
  } else if (!(*ell > 0.0)) {
    throw std::invalid_argument("config: ell must be > 0");
  }
  if (objective == Objective::MinCt && !grid.has_value())
    throw std::invalid_argument("config: objective min_ct requires an ell grid");
  if (objective == Objective::FixedEll && !ell.has_value())
    throw std::invalid_argument("config: objective fixed_ell requires an explicit ell");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean '" + v + "'");
}

double parse_num(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw std::invalid_argument("config: bad number '" + v + "' for key " + key);
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  EllGrid grid;
  bool has_min = false, has_max = false, has_points = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "n") cfg.n = static_cast<int>(parse_num(val, key));
    else if (key == "k") cfg.k = parse_num(val, key);
    else if (key == "gamma") cfg.gamma = parse_num(val, key);
    else if (key == "alpha") {
      if (val == "mala") cfg.alpha.reset();
      else cfg.alpha = parse_num(val, key);
    } else if (key == "matrix") cfg.matrix = val;
    else if (key == "ell") cfg.ell = parse_num(val, key);
    else if (key == "ell_min") { grid.min = parse_num(val, key); has_min = true; }
    else if (key == "ell_max") { grid.max = parse_num(val, key); has_max = true; }
    else if (key == "ell_points") { grid.points = static_cast<int>(parse_num(val, key)); has_points = true; }
    else if (key == "steps") cfg.steps = static_cast<long>(parse_num(val, key));
    else if (key == "replications") cfg.replications = static_cast<int>(parse_num(val, key));
    else if (key == "master_seed") cfg.master_seed = std::stoull(val);
    else if (key == "output") cfg.output = val;
    else if (key == "objective") {
      if (val == "min_ct") cfg.objective = ExperimentConfig::Objective::MinCt;
      else if (val == "fixed_ell") cfg.objective = ExperimentConfig::Objective::FixedEll;
      else throw std::invalid_argument("config: objective must be min_ct or fixed_ell");
    } else if (key == "all_coords") cfg.all_coords = parse_bool(val);
    else if (key == "burn_in") cfg.burn_in = static_cast<long>(parse_num(val, key));
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  if (has_min || has_max || has_points) {
    if (!(has_min && has_max && has_points))
      throw std::invalid_argument("config: ell grid needs ell_min, ell_max and ell_points");
    cfg.grid = grid;
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  return parse_experiment_config(in);
}

std::uint64_t derive_replication_seed(std::uint64_t master_seed, std::uint64_t replication_index,
                                      std::uint64_t ell_index) {
  constexpr std::uint64_t kRepSalt = 0x9E3779B97F4A7C15ull;
  constexpr std::uint64_t kEllSalt = 0xC2B2AE3D27D4EB4Full;
  std::uint64_t z = master_seed ^ (replication_index * kRepSalt) ^ (ell_index * kEllSalt);
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

namespace {

// Runs tasks [0, total) over a bounded pool; results land in caller-owned
// slots indexed by task, so scheduling order never affects the output.
template <typename Fn>
void parallel_for(long total, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1) {
    for (long t = 0; t < total; ++t) fn(t);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const long t = next.fetch_add(1);
      if (t >= total) return;
      try {
        fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ResultRow base_row(const ExperimentConfig& cfg, double ell) {
  ResultRow row;
  row.n = cfg.n;
  row.gamma = cfg.gamma;
  row.alpha = cfg.alpha;
  row.matrix = cfg.matrix;
  row.ell = ell;
  row.steps = cfg.steps;
  return row;
}

void fill_from_single(ResultRow& row, const ReplicationStats& st) {
  row.reps = 1;
  row.h_hat = st.h_hat;
  row.esjd = st.esjd;
  row.theta2 = st.theta2;
  row.theta3 = st.theta3;
  if (st.rho1_defined) row.rho1 = st.rho1;
  if (st.ct_defined) row.ct = st.ct;
}

void fill_from_report(ResultRow& row, const ReplicationReport& rep) {
  row.reps = rep.replications;
  row.h_hat = rep.h_hat.mean;
  row.h_sd = rep.h_hat.sd;
  row.esjd = rep.esjd.mean;
  row.esjd_sd = rep.esjd.sd;
  row.theta2 = rep.theta2.mean;
  row.theta2_sd = rep.theta2.sd;
  row.theta3 = rep.theta3.mean;
  row.theta3_sd = rep.theta3.sd;
  if (rep.rho1_defined >= 1) row.rho1 = rep.rho1.mean;
  if (rep.rho1_defined >= 2) row.rho1_sd = rep.rho1.sd;
  if (rep.ct_defined >= 1) row.ct = rep.ct.mean;
  if (rep.ct_defined >= 2) row.ct_sd = rep.ct.sd;
}

void fill_row(ResultRow& row, const std::vector<ReplicationStats>& stats) {
  if (stats.size() == 1) {
    fill_from_single(row, stats[0]);
  } else {
    fill_from_report(row, aggregate(stats));
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const Spectrum spec = make_spectrum(cfg.n, cfg.k);
  const double alpha = cfg.effective_alpha();
  const SkewOperator S = build_by_name(cfg.matrix, cfg.n, cfg.k, alpha, cfg.gamma);
  const std::vector<double> ells = cfg.ell_values();
  const int n_ell = static_cast<int>(ells.size());
  const int reps = cfg.replications;
  const double zeta = cfg.zeta();

  std::vector<std::vector<ReplicationStats>> stats(n_ell,
                                                   std::vector<ReplicationStats>(reps));
  parallel_for(static_cast<long>(n_ell) * reps, threads, [&](long task) {
    const int i = static_cast<int>(task / reps);
    const int r = static_cast<int>(task % reps);
    const ProposalParams p = make_proposal_params(ells[i], cfg.gamma, alpha, cfg.n);
    Rng rng(derive_replication_seed(cfg.master_seed, static_cast<std::uint64_t>(r),
                                    static_cast<std::uint64_t>(i)));
    StateVector x0 = sample_stationary(spec, rng);
    if (cfg.burn_in > 0) x0 = run_chain(p, spec, S, cfg.burn_in, std::move(x0), rng, {});
    ChainSummary summary(cfg.all_coords);
    ChainObserver* sinks[] = {&summary};
    run_chain(p, spec, S, cfg.steps, std::move(x0), rng, sinks);
    stats[i][r] = summarize(summary, cfg.n, zeta, cfg.gamma);
  });

  ExperimentResult result;
  result.rows.reserve(n_ell + 1);
  for (int i = 0; i < n_ell; ++i) {
    ResultRow row = base_row(cfg, ells[i]);
    fill_row(row, stats[i]);
    result.rows.push_back(std::move(row));
  }

  if (cfg.objective == ExperimentConfig::Objective::FixedEll) {
    result.rows[0].selected = true;
    result.selected_index = 0;
    return result;
  }

  // Paper-style selection: each replication contributes the statistics at its
  // own CT-minimizing ell; replications with no defined CT anywhere drop out.
  std::vector<ReplicationStats> selected;
  double ell_sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    int best = -1;
    for (int i = 0; i < n_ell; ++i) {
      if (!stats[i][r].ct_defined) continue;
      if (best < 0 || stats[i][r].ct < stats[best][r].ct) best = i;
    }
    if (best < 0) {
      ++result.dropped_replications;
      continue;
    }
    selected.push_back(stats[best][r]);
    ell_sum += ells[best];
  }
  if (!selected.empty()) {
    ResultRow row = base_row(cfg, ell_sum / static_cast<double>(selected.size()));
    fill_row(row, selected);
    row.selected = true;
    result.selected_index = static_cast<int>(result.rows.size());
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string opt_field(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : std::string();
}

std::optional<double> parse_opt(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return std::stod(field);
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.n << ',' << format_double(r.gamma) << ','
        << (r.alpha.has_value() ? format_double(*r.alpha) : std::string("mala")) << ','
        << r.matrix << ',' << format_double(r.ell) << ',' << r.steps << ',' << r.reps << ','
        << format_double(r.h_hat) << ',' << opt_field(r.h_sd) << ',' << format_double(r.esjd)
        << ',' << opt_field(r.esjd_sd) << ',' << opt_field(r.rho1) << ',' << opt_field(r.rho1_sd)
        << ',' << opt_field(r.ct) << ',' << opt_field(r.ct_sd) << ',' << format_double(r.theta2)
        << ',' << opt_field(r.theta2_sd) << ',' << format_double(r.theta3) << ','
        << opt_field(r.theta3_sd) << ',' << (r.selected ? 1 : 0) << '\n';
  }
}

std::vector<ResultRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  if (trim(line) != kSweepCsvHeader) throw std::invalid_argument("csv: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (line.back() == ',') f.push_back("");
    if (f.size() != 20) throw std::invalid_argument("csv: expected 20 fields");
    ResultRow r;
    r.n = std::stoi(f[0]);
    r.gamma = std::stod(f[1]);
    if (f[2] != "mala") r.alpha = std::stod(f[2]);
    r.matrix = f[3];
    r.ell = std::stod(f[4]);
    r.steps = std::stol(f[5]);
    r.reps = std::stoi(f[6]);
    r.h_hat = std::stod(f[7]);
    r.h_sd = parse_opt(f[8]);
    r.esjd = std::stod(f[9]);
    r.esjd_sd = parse_opt(f[10]);
    r.rho1 = parse_opt(f[11]);
    r.rho1_sd = parse_opt(f[12]);
    r.ct = parse_opt(f[13]);
    r.ct_sd = parse_opt(f[14]);
    r.theta2 = std::stod(f[15]);
    r.theta2_sd = parse_opt(f[16]);
    r.theta3 = std::stod(f[17]);
    r.theta3_sd = parse_opt(f[18]);
    r.selected = std::stoi(f[19]) != 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ipmala
