#include "ipmala/limit_verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ipmala/harness.hpp"
#include "ipmala/kernel.hpp"

namespace ipmala {

double ou_autocorr(double t, double ell, double h) {
  if (!(t >= 0.0)) throw std::invalid_argument("ou_autocorr: t must be >= 0");
  return std::exp(-0.5 * ell * ell * h * t);
}

namespace {

template <typename Fn>
void parallel_reps(int total, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int r = 0; r < total; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= total) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double m = static_cast<double>(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
    sab += a[i] * b[i];
  }
  const double va = saa - sa * sa / m;
  const double vb = sbb - sb * sb / m;
  if (!(va > 0.0) || !(vb > 0.0))
    throw std::runtime_error("limit check: degenerate correlation batch");
  return (sab - sa * sb / m) / std::sqrt(va * vb);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

LimitCheckReport diffusive_limit_check(const DiffusiveCheckConfig& cfg, int threads) {
  if (!(cfg.alpha >= 2.0))
    throw std::invalid_argument("diffusive_limit_check: requires alpha >= 2");
  if (classify_gamma(cfg.gamma) != GammaRegime::EqualOneSixth)
    throw std::invalid_argument("diffusive_limit_check: requires gamma = 1/6");
  if (cfg.replications < cfg.batches || cfg.batches < 2)
    throw std::invalid_argument("diffusive_limit_check: need replications >= batches >= 2");

  const SkewKind kind = kind_from_name(cfg.matrix);
  double ell = cfg.ell;
  if (ell <= 0.0) ell = optimal_ell(kind, cfg.alpha, cfg.gamma, cfg.k).ell_star;
  const CConstants c = c_constants_analytic(kind, cfg.alpha, cfg.gamma);
  const double h =
      limit_constants(c, cfg.alpha, ell, GammaRegime::EqualOneSixth).h;

  const Spectrum spec = make_spectrum(cfg.n, cfg.k);
  const SkewOperator S = build_by_name(cfg.matrix, cfg.n, cfg.k, cfg.alpha, cfg.gamma);
  const ProposalParams p = make_proposal_params(ell, cfg.gamma, cfg.alpha, cfg.n);

  const double clock = std::pow(static_cast<double>(cfg.n), 2.0 * cfg.gamma);
  std::vector<long> lag_steps;
  long max_step = 0;
  for (double t : cfg.lags) {
    if (t < 0.0) throw std::invalid_argument("diffusive_limit_check: lags must be >= 0");
    const long ks = static_cast<long>(std::floor(t * clock));
    lag_steps.push_back(ks);
    max_step = std::max(max_step, ks);
  }

  // first-coordinate snapshots: [replication][lag]
  std::vector<std::vector<double>> snap(cfg.replications,
                                        std::vector<double>(cfg.lags.size(), 0.0));
  parallel_reps(cfg.replications, threads, [&](int r) {
    Rng rng(derive_replication_seed(cfg.master_seed, static_cast<std::uint64_t>(r), 0));
    StateVector x = sample_stationary(spec, rng);
    const double x0 = x[0];
    for (size_t j = 0; j < lag_steps.size(); ++j)
      if (lag_steps[j] == 0) snap[r][j] = x[0];
    if (max_step > 0) {
      struct Snapshotter final : ChainObserver {
        const std::vector<long>* lag_steps;
        std::vector<double>* out;
        long step = 0;
        void on_step(const StepRecord&, std::span<const double>,
                     std::span<const double> x_next) override {
          ++step;
          for (size_t j = 0; j < lag_steps->size(); ++j)
            if ((*lag_steps)[j] == step) (*out)[j] = x_next[0];
        }
      } sink;
      sink.lag_steps = &lag_steps;
      sink.out = &snap[r];
      ChainObserver* sinks[] = {&sink};
      run_chain(p, spec, S, max_step, std::move(x), rng, sinks);
    }
    snap[r].push_back(x0);  // stored last so the batching below can find it
  });

  LimitCheckReport report;
  report.regime = "diffusive";
  report.ell = ell;
  report.h = h;
  report.pass = true;
  const int per_batch = cfg.replications / cfg.batches;
  for (size_t j = 0; j < cfg.lags.size(); ++j) {
    std::vector<double> batch_corr;
    for (int b = 0; b < cfg.batches; ++b) {
      const int lo = b * per_batch;
      const int hi = (b + 1 == cfg.batches) ? cfg.replications : lo + per_batch;
      std::vector<double> a, bb;
      a.reserve(hi - lo);
      for (int r = lo; r < hi; ++r) {
        a.push_back(snap[r].back());
        bb.push_back(snap[r][j]);
      }
      batch_corr.push_back(lag_steps[j] == 0 ? 1.0 : pearson(a, bb));
    }
    double mean = 0.0;
    for (double v : batch_corr) mean += v;
    mean /= batch_corr.size();
    double ss = 0.0;
    for (double v : batch_corr) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (batch_corr.size() - 1.0) / batch_corr.size());
    LagRow row;
    row.t = cfg.lags[j];
    row.empirical = mean;
    row.theoretical = ou_autocorr(cfg.lags[j], ell, h);
    row.se = se;
    row.deviation = row.empirical - row.theoretical;
    report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(row.deviation));
    if (std::abs(row.deviation) > 4.0 * row.se) report.pass = false;
    report.rows.push_back(row);
  }
  return report;
}

LimitCheckReport fluid_limit_check(const FluidCheckConfig& cfg, int threads) {
  if (!(cfg.alpha >= 1.0 && cfg.alpha < 2.0))
    throw std::invalid_argument("fluid_limit_check: requires 1 <= alpha < 2");
  if (!(cfg.gamma >= 1.0 / 6.0 - 1e-12))
    throw std::invalid_argument("fluid_limit_check: requires gamma >= 1/6");
  if (cfg.n_list.empty()) throw std::invalid_argument("fluid_limit_check: empty n list");
  if (cfg.replications < 2) throw std::invalid_argument("fluid_limit_check: replications >= 2");
  if (!(cfg.horizon >= 0.0)) throw std::invalid_argument("fluid_limit_check: horizon >= 0");

  const SkewKind kind = kind_from_name(cfg.matrix);
  // Precondition self-check: the configured family must have tau = 0.
  const CConstants c = c_constants_analytic(kind, cfg.alpha, cfg.gamma);
  const double tau =
      limit_constants(c, cfg.alpha, cfg.ell, classify_gamma(cfg.gamma)).tau;
  if (tau != 0.0)
    throw std::invalid_argument("fluid_limit_check: configured kind has tau != 0");

  LimitCheckReport report;
  report.regime = "fluid";
  report.ell = cfg.ell;
  report.h = 0.0;
  for (size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const int n = cfg.n_list[idx];
    const Spectrum spec = make_spectrum(n, cfg.k);
    const SkewOperator S = build_by_name(cfg.matrix, n, cfg.k, cfg.alpha, cfg.gamma);
    const ProposalParams p = make_proposal_params(cfg.ell, cfg.gamma, cfg.alpha, n);
    const long steps = static_cast<long>(
        std::ceil(cfg.horizon * std::pow(static_cast<double>(n), cfg.alpha * cfg.gamma)));
    std::vector<double> sup(cfg.replications, 0.0);
    parallel_reps(cfg.replications, threads, [&](int r) {
      Rng rng(derive_replication_seed(cfg.master_seed, static_cast<std::uint64_t>(r),
                                      static_cast<std::uint64_t>(idx)));
      StateVector x0 = sample_stationary(spec, rng);
      if (steps == 0) return;
      struct SupTracker final : ChainObserver {
        const StateVector* x0;
        double sup = 0.0;
        void on_step(const StepRecord&, std::span<const double>,
                     std::span<const double> x_next) override {
          double d2 = 0.0;
          for (size_t i = 0; i < x_next.size(); ++i) {
            const double d = x_next[i] - (*x0)[i];
            d2 += d * d;
          }
          sup = std::max(sup, std::sqrt(d2));
        }
      } sink;
      sink.x0 = &x0;
      ChainObserver* sinks[] = {&sink};
      run_chain(p, spec, S, steps, x0, rng, sinks);
      sup[r] = sink.sup;
    });
    double mean = 0.0;
    for (double v : sup) mean += v;
    mean /= sup.size();
    double ss = 0.0;
    for (double v : sup) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (sup.size() - 1.0));
    LagRow row;
    row.t = static_cast<double>(n);
    row.empirical = median(sup);
    row.theoretical = 0.0;
    row.se = 1.2533 * sd / std::sqrt(static_cast<double>(sup.size()));
    row.deviation = row.empirical;
    report.max_abs_deviation = std::max(report.max_abs_deviation, row.empirical);
    report.rows.push_back(row);
  }
  report.pass = true;
  for (size_t i = 1; i < report.rows.size(); ++i)
    if (!(report.rows[i].empirical < report.rows[i - 1].empirical)) report.pass = false;
  return report;
}

void write_limit_check_csv(std::ostream& out, const LimitCheckReport& report) {
  out << "t_or_N,empirical,theoretical,se,deviation\n";
  for (const LagRow& r : report.rows) {
    out << format_double(r.t) << ',' << format_double(r.empirical) << ','
        << format_double(r.theoretical) << ',' << format_double(r.se) << ','
        << format_double(r.deviation) << '\n';
  }
}

}  // namespace ipmala
