// ipmala: CLI front end for the ipMALA sampler, limiting-theory calculators
// and scaling-limit checks.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ipmala/harness.hpp"
#include "ipmala/limit_theory.hpp"
#include "ipmala/limit_verifier.hpp"

namespace {

using namespace ipmala;

int resolve_threads(int flag_value) {
  if (const char* env = std::getenv("IPMALA_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (...) {
    }
    throw std::invalid_argument("IPMALA_THREADS must be a positive integer");
  }
  if (flag_value >= 1) return flag_value;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw std::invalid_argument("bad " + what + " list entry '" + item + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(what + " list is empty");
  return out;
}

// Writes through --out when given, else the config-level path, else stdout.
void emit(const std::string& out_path, const std::string& cfg_path,
          const std::function<void(std::ostream&)>& writer) {
  const std::string& path = !out_path.empty() ? out_path : cfg_path;
  if (path.empty()) {
    writer(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  writer(f);
}

struct LimitCheckFile {
  std::string mode;
  DiffusiveCheckConfig diffusive;
  FluidCheckConfig fluid;
  std::string output;
};

LimitCheckFile load_limit_check_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  LimitCheckFile f;
  bool ell_auto = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r\n");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r\n");
      return s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "mode") f.mode = val;
    else if (key == "n") f.diffusive.n = std::stoi(val);
    else if (key == "n_list") {
      f.fluid.n_list.clear();
      for (double v : parse_double_list(val, "n_list")) f.fluid.n_list.push_back(static_cast<int>(v));
    } else if (key == "k") { f.diffusive.k = std::stod(val); f.fluid.k = f.diffusive.k; }
    else if (key == "gamma") { f.diffusive.gamma = std::stod(val); f.fluid.gamma = f.diffusive.gamma; }
    else if (key == "alpha") { f.diffusive.alpha = std::stod(val); f.fluid.alpha = f.diffusive.alpha; }
    else if (key == "matrix") { f.diffusive.matrix = val; f.fluid.matrix = val; }
    else if (key == "ell") {
      if (val == "auto") ell_auto = true;
      else { f.diffusive.ell = std::stod(val); f.fluid.ell = f.diffusive.ell; }
    } else if (key == "lags") f.diffusive.lags = parse_double_list(val, "lags");
    else if (key == "horizon") f.fluid.horizon = std::stod(val);
    else if (key == "replications") {
      f.diffusive.replications = std::stoi(val);
      f.fluid.replications = f.diffusive.replications;
    } else if (key == "batches") f.diffusive.batches = std::stoi(val);
    else if (key == "master_seed") {
      f.diffusive.master_seed = std::stoull(val);
      f.fluid.master_seed = f.diffusive.master_seed;
    } else if (key == "output") f.output = val;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  if (f.mode != "diffusive" && f.mode != "fluid")
    throw std::invalid_argument("config: mode must be diffusive or fluid");
  if (ell_auto) f.diffusive.ell = 0.0;
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ipMALA: irreversible-proposal MALA on diagonal Gaussian targets"};
  app.require_subcommand(1);

  int threads_flag = 0;
  std::optional<std::uint64_t> seed_flag;
  std::string out_flag;
  app.add_option("--threads", threads_flag, "worker threads (default: hardware)");
  app.add_option("--seed", seed_flag, "override the master seed");
  app.add_option("--out", out_flag, "output file (default: config output or stdout)");

  auto* tt = app.add_subcommand("theory-table", "optimal acceptance probabilities for S1");
  std::string tt_alphas;
  double tt_gamma = 1.0 / 6.0;
  tt->add_option("--alphas", tt_alphas, "comma-separated alpha values, each >= 2")->required();
  tt->add_option("--gamma", tt_gamma, "gamma (diffusive branch, ~1/6)");

  auto* run = app.add_subcommand("run", "single-ell experiment from a config file");
  std::string run_config;
  run->add_option("--config", run_config, "config file")->required();

  auto* sweep = app.add_subcommand("sweep", "ell-grid experiment from a config file");
  std::string sweep_config;
  sweep->add_option("--config", sweep_config, "config file")->required();

  auto* probe = app.add_subcommand("probe-constants", "Monte Carlo c-constant probe");
  std::string pr_matrix;
  double pr_alpha = 2.0, pr_gamma = 1.0 / 6.0, pr_k = 2.0;
  int pr_n = 0, pr_samples = 0;
  probe->add_option("--matrix", pr_matrix, "s1, s2, s3 or zero")->required();
  probe->add_option("--alpha", pr_alpha, "alpha");
  probe->add_option("--gamma", pr_gamma, "gamma");
  probe->add_option("--n", pr_n, "dimension")->required();
  probe->add_option("--samples", pr_samples, "stationary samples")->required();
  probe->add_option("--k", pr_k, "spectral decay exponent");

  auto* lc = app.add_subcommand("limit-check", "diffusive or fluid scaling-limit check");
  std::string lc_config;
  lc->add_option("--config", lc_config, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const int threads = resolve_threads(threads_flag);

    if (tt->parsed()) {
      const std::vector<double> alphas = parse_double_list(tt_alphas, "alphas");
      const std::vector<TheoryRow> rows = theory_table(alphas, tt_gamma);
      emit(out_flag, "", [&](std::ostream& os) {
        os << "alpha,ell_star,h_star\n";
        for (const TheoryRow& r : rows)
          os << format_double(r.alpha) << ',' << format_double(r.ell_star) << ','
             << format_double(r.h_star) << '\n';
      });
      return 0;
    }

    if (run->parsed() || sweep->parsed()) {
      const bool is_sweep = sweep->parsed();
      ExperimentConfig cfg = load_experiment_config(is_sweep ? sweep_config : run_config);
      if (seed_flag.has_value()) cfg.master_seed = *seed_flag;
      if (is_sweep && !cfg.grid.has_value())
        throw std::invalid_argument("sweep requires an ell grid (ell_min/ell_max/ell_points)");
      if (!is_sweep && !cfg.ell.has_value())
        throw std::invalid_argument("run requires a single ell; use sweep for grids");
      const ExperimentResult result = run_experiment(cfg, threads);
      if (result.dropped_replications > 0)
        std::cerr << "warning: " << result.dropped_replications
                  << " replication(s) had no defined CT at any ell and were dropped\n";
      emit(out_flag, cfg.output, [&](std::ostream& os) { write_csv(os, result.rows); });
      return 0;
    }

    if (probe->parsed()) {
      const Spectrum spec = make_spectrum(pr_n, pr_k);
      const SkewOperator S = build_by_name(pr_matrix, pr_n, pr_k, pr_alpha, pr_gamma);
      Rng rng(seed_flag.value_or(0));
      const CConstantsEstimate est =
          estimate_c_constants(S, spec, pr_alpha, pr_gamma, pr_samples, rng);
      const double norm1 = std::pow(static_cast<double>(pr_n), 2.0 * (pr_alpha - 1.0) * pr_gamma);
      const double c1_exact = expected_stilde_norm_sq(S, spec) / norm1;
      const CConstants analytic = c_constants_analytic(S.kind(), pr_alpha, pr_gamma);
      emit(out_flag, "", [&](std::ostream& os) {
        os << "matrix,alpha,gamma,n,samples,c1_hat,c1_se,c2_hat,c2_se,c3_hat,c3_se,"
              "c1_exact,c1_analytic\n";
        os << pr_matrix << ',' << format_double(pr_alpha) << ',' << format_double(pr_gamma) << ','
           << pr_n << ',' << pr_samples << ',' << format_double(est.value.c1) << ','
           << format_double(est.se.c1) << ',' << format_double(est.value.c2) << ','
           << format_double(est.se.c2) << ',' << format_double(est.value.c3) << ','
           << format_double(est.se.c3) << ',' << format_double(c1_exact) << ','
           << format_double(analytic.c1) << '\n';
      });
      return 0;
    }

    if (lc->parsed()) {
      LimitCheckFile f = load_limit_check_config(lc_config);
      if (seed_flag.has_value()) {
        f.diffusive.master_seed = *seed_flag;
        f.fluid.master_seed = *seed_flag;
      }
      const LimitCheckReport report = f.mode == "diffusive"
                                          ? diffusive_limit_check(f.diffusive, threads)
                                          : fluid_limit_check(f.fluid, threads);
      emit(out_flag, f.output, [&](std::ostream& os) { write_limit_check_csv(os, report); });
      std::cerr << report.regime << " check: " << (report.pass ? "pass" : "FAIL")
                << " (max |deviation| = " << report.max_abs_deviation << ")\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
