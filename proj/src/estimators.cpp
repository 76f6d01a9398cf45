#include "ipmala/estimators.hpp"

#include <cmath>

namespace ipmala {

void ChainSummary::on_step(const StepRecord& rec, std::span<const double> x_prev,
                           std::span<const double> x_next) {
  ++steps_;
  if (rec.accepted) ++accepts_;
  if (all_coords_) {
    for (size_t i = 0; i < x_prev.size(); ++i) {
      const double d = x_next[i] - x_prev[i];
      esjd_sum_ += d * d;
      sa_ += x_prev[i];
      sb_ += x_next[i];
      saa_ += x_prev[i] * x_prev[i];
      sbb_ += x_next[i] * x_next[i];
      sab_ += x_prev[i] * x_next[i];
      ++pairs_;
    }
  } else {
    const double a = x_prev[0];
    const double b = x_next[0];
    const double d = b - a;
    esjd_sum_ += d * d;
    sa_ += a;
    sb_ += b;
    saa_ += a * a;
    sbb_ += b * b;
    sab_ += a * b;
    ++pairs_;
  }
  double n2 = 0.0, n3 = 0.0;
  for (double v : x_next) {
    n2 += v * v;
    n3 += v * v * v;
  }
  theta2_sum_ += n2;
  theta3_sum_ += n3;
}

double ChainSummary::acceptance_rate() const {
  if (steps_ == 0) throw UndefinedStatistic("acceptance rate of an empty chain");
  return static_cast<double>(accepts_) / static_cast<double>(steps_);
}

double ChainSummary::esjd() const {
  if (steps_ == 0) throw UndefinedStatistic("ESJD of an empty chain");
  return esjd_sum_ / static_cast<double>(steps_);
}

double ChainSummary::theta2() const {
  if (steps_ == 0) throw UndefinedStatistic("theta2 of an empty chain");
  return theta2_sum_ / static_cast<double>(steps_);
}

double ChainSummary::theta3() const {
  if (steps_ == 0) throw UndefinedStatistic("theta3 of an empty chain");
  return theta3_sum_ / static_cast<double>(steps_);
}

double ChainSummary::rho1() const {
  if (steps_ < 10) throw UndefinedStatistic("rho1 requires at least 10 steps");
  const double m = static_cast<double>(pairs_);
  const double va = saa_ - sa_ * sa_ / m;
  const double vb = sbb_ - sb_ * sb_ / m;
  if (!(va > 0.0) || !(vb > 0.0))
    throw UndefinedStatistic("rho1 undefined: degenerate (zero-variance) series");
  const double cov = sab_ - sa_ * sb_ / m;
  double r = cov / std::sqrt(va * vb);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return r;
}

double ct_statistic(double rho1, int n, double zeta, double gamma) {
  if (!(rho1 > 0.0 && rho1 < 1.0))
    throw UndefinedStatistic("ct undefined: rho1 outside (0, 1)");
  return -1.0 / (std::pow(static_cast<double>(n), zeta * gamma) * std::log(rho1));
}

ReplicationStats summarize(const ChainSummary& summary, int n, double zeta, double gamma) {
  ReplicationStats st;
  st.h_hat = summary.acceptance_rate();
  st.esjd = summary.esjd();
  st.theta2 = summary.theta2();
  st.theta3 = summary.theta3();
  try {
    st.rho1 = summary.rho1();
    st.rho1_defined = true;
  } catch (const UndefinedStatistic&) {
    st.rho1_defined = false;
  }
  if (st.rho1_defined) {
    try {
      st.ct = ct_statistic(st.rho1, n, zeta, gamma);
      st.ct_defined = true;
    } catch (const UndefinedStatistic&) {
      st.ct_defined = false;
    }
  }
  return st;
}

namespace {

Aggregate mean_sd(std::span<const double> v) {
  const double r = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= r;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0;
  return {mean, sd};
}

}  // namespace

ReplicationReport aggregate(std::span<const ReplicationStats> stats) {
  if (stats.size() < 2) throw std::invalid_argument("aggregate requires R >= 2 replications");
  ReplicationReport rep;
  rep.replications = static_cast<int>(stats.size());
  std::vector<double> h, e, rho, ct, t2, t3;
  h.reserve(stats.size());
  for (const ReplicationStats& s : stats) {
    h.push_back(s.h_hat);
    e.push_back(s.esjd);
    t2.push_back(s.theta2);
    t3.push_back(s.theta3);
    if (s.rho1_defined) rho.push_back(s.rho1);
    if (s.ct_defined) ct.push_back(s.ct);
  }
  rep.h_hat = mean_sd(h);
  rep.esjd = mean_sd(e);
  rep.theta2 = mean_sd(t2);
  rep.theta3 = mean_sd(t3);
  rep.rho1_defined = static_cast<int>(rho.size());
  rep.ct_defined = static_cast<int>(ct.size());
  if (!rho.empty()) rep.rho1 = mean_sd(rho);
  if (!ct.empty()) rep.ct = mean_sd(ct);
  return rep;
}

}  // namespace ipmala
