#include "dropf/uncertainty.hpp"

#include <algorithm>
#include <numeric>

namespace dropf {

InjectionDeviation injection_deviations(const ForecastWindow& w) {
  InjectionDeviation d;
  d.dp_minus = (w.p_load_mean - w.p_load_max) - (w.p_gen_mean - w.p_gen_min);
  d.dp_plus = (w.p_load_mean - w.p_load_min) - (w.p_gen_mean - w.p_gen_max);
  d.dq_minus = (w.q_load_mean - w.q_load_max) - (w.q_gen_mean - w.q_gen_min);
  d.dq_plus = (w.q_load_mean - w.q_load_min) - (w.q_gen_mean - w.q_gen_max);
  return d;
}

VoltageDeviationTerms voltage_deviation_terms(double alpha, double beta,
                                              const InjectionDeviation& d) {
  VoltageDeviationTerms t;
  t.p_plus = alpha >= 0.0 ? alpha * d.dp_plus : alpha * d.dp_minus;
  t.p_minus = alpha >= 0.0 ? alpha * d.dp_minus : alpha * d.dp_plus;
  t.q_plus = beta >= 0.0 ? beta * d.dq_plus : beta * d.dq_minus;
  t.q_minus = beta >= 0.0 ? beta * d.dq_minus : beta * d.dq_plus;
  return t;
}

double summaxk(const std::vector<double>& terms, int kappa) {
  if (kappa <= 0 || terms.empty()) return 0.0;
  std::vector<int> order(terms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ma = std::abs(terms[a]), mb = std::abs(terms[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  double sum = 0.0;
  const int take = std::min<int>(kappa, static_cast<int>(terms.size()));
  for (int i = 0; i < take; ++i) sum += terms[order[i]];
  return sum;
}

std::vector<InjectionDeviation> window_deviations(const NetworkModel& net,
                                                  const NodePhaseIndex& idx,
                                                  const std::vector<ForecastWindow>& window) {
  std::vector<InjectionDeviation> dev(idx.n_reduced());
  for (const ForecastWindow& w : window) {
    int g = idx.find(net, w.node, w.phase);
    if (g < 0 || idx.reduced[g] < 0) continue;
    dev[idx.reduced[g]] = injection_deviations(w);
  }
  return dev;
}

VoltageMargin compute_margins(const SensitivityTensor& sens,
                              const std::vector<InjectionDeviation>& dev, int kappa) {
  const int r = static_cast<int>(sens.dv_dp.rows());
  if (static_cast<int>(dev.size()) != r)
    throw std::runtime_error("compute_margins: deviation/sensitivity size mismatch");
  VoltageMargin m;
  m.dv_plus = Eigen::VectorXd::Zero(r);
  m.dv_minus = Eigen::VectorXd::Zero(r);
  std::vector<double> plus(2 * r), minus(2 * r);
  for (int j = 0; j < r; ++j) {
    for (int l = 0; l < r; ++l) {
      VoltageDeviationTerms t =
          voltage_deviation_terms(sens.dv_dp(j, l), sens.dv_dq(j, l), dev[l]);
      plus[2 * l] = t.p_plus;
      plus[2 * l + 1] = t.q_plus;
      minus[2 * l] = t.p_minus;
      minus[2 * l + 1] = t.q_minus;
    }
    m.dv_plus[j] = summaxk(plus, kappa);
    m.dv_minus[j] = summaxk(minus, kappa);
  }
  return m;
}

VoltageLimits default_limits(const NetworkModel& net, const NodePhaseIndex& idx) {
  const int n = idx.n_global();
  VoltageLimits lim;
  lim.v_lo.resize(n);
  lim.v_hi.resize(n);
  for (int g = 0; g < n; ++g) {
    const Node& nd = net.nodes[idx.entries[g].node];
    int k = nd.phases.index_of(idx.entries[g].phase);
    lim.v_lo[g] = nd.vmin[k];
    lim.v_hi[g] = nd.vmax[k];
  }
  lim.lo_sq = lim.v_lo.array().square();
  lim.hi_sq = lim.v_hi.array().square();
  return lim;
}

VoltageLimits tightened_voltage_limits(const NetworkModel& net, const NodePhaseIndex& idx,
                                       const VoltageMargin& margin, double gamma) {
  VoltageLimits lim = default_limits(net, idx);
  lim.gamma = gamma;
  for (int j = 0; j < idx.n_reduced(); ++j) {
    int g = idx.global[j];
    lim.v_lo[g] -= gamma * margin.dv_minus[j];  // dv_minus <= 0: raises the floor
    lim.v_hi[g] -= gamma * margin.dv_plus[j];   // dv_plus >= 0: lowers the ceiling
    if (lim.v_lo[g] >= lim.v_hi[g]) {
      lim.collapsed = true;
      lim.collapsed_at.push_back(g);
    }
  }
  lim.lo_sq = lim.v_lo.array().square();
  lim.hi_sq = lim.v_hi.array().square();
  return lim;
}

VoltageLimits tightened_with_fallback(const NetworkModel& net, const NodePhaseIndex& idx,
                                      const VoltageMargin& margin,
                                      std::vector<double>* gammas_tried) {
  for (double gamma : {1.0, 0.5, 0.25, 0.0}) {
    if (gammas_tried) gammas_tried->push_back(gamma);
    VoltageLimits lim = tightened_voltage_limits(net, idx, margin, gamma);
    if (!lim.collapsed) return lim;
  }
  // gamma = 0 equals the defaults and cannot collapse (vmin < vmax validated).
  return tightened_voltage_limits(net, idx, margin, 0.0);
}

}  // namespace dropf
