#include "dropf/powerflow.hpp"

#include <Eigen/LU>

namespace dropf {

NodePhaseIndex NodePhaseIndex::build(const NetworkModel& net) {
  NodePhaseIndex idx;
  for (size_t i = 0; i < net.nodes.size(); ++i) {
    if (net.nodes[i].kind == NodeKind::Substation) idx.slack_node = static_cast<int>(i);
    for (Phase p : net.nodes[i].phases.list())
      idx.entries.push_back({static_cast<int>(i), p});
  }
  idx.reduced.assign(idx.entries.size(), -1);
  for (size_t g = 0; g < idx.entries.size(); ++g) {
    if (idx.entries[g].node == idx.slack_node) continue;
    idx.reduced[g] = static_cast<int>(idx.global.size());
    idx.global.push_back(static_cast<int>(g));
  }
  idx.by_node.assign(net.nodes.size(), {-1, -1, -1});
  for (size_t g = 0; g < idx.entries.size(); ++g)
    idx.by_node[idx.entries[g].node][static_cast<int>(idx.entries[g].phase)] =
        static_cast<int>(g);
  return idx;
}

int NodePhaseIndex::find(const NetworkModel& net, const std::string& node, Phase ph) const {
  int ni = net.node_index(node);
  if (ni < 0) return -1;
  return by_node[ni][static_cast<int>(ph)];
}

Eigen::MatrixXcd build_ybus(const NetworkModel& net, const NodePhaseIndex& idx) {
  const int n = idx.n_global();
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);

  auto gof = [&](int node, Phase p) { return idx.at(node, p); };

  for (const Branch& b : net.branches) {
    int nf = net.node_index(b.from), nt = net.node_index(b.to);
    auto phases = b.phases.list();
    const int m = static_cast<int>(phases.size());
    Eigen::MatrixXcd Ys = b.Z.inverse();
    std::vector<int> gf(m), gt(m);
    for (int k = 0; k < m; ++k) {
      gf[k] = gof(nf, phases[k]);
      gt[k] = gof(nt, phases[k]);
    }
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        Y(gf[r], gf[c]) += Ys(r, c);
        Y(gt[r], gt[c]) += Ys(r, c);
        Y(gf[r], gt[c]) -= Ys(r, c);
        Y(gt[r], gf[c]) -= Ys(r, c);
      }
  }
  for (size_t ni = 0; ni < net.nodes.size(); ++ni) {
    const Node& nd = net.nodes[ni];
    auto phases = nd.phases.list();
    for (size_t k = 0; k < phases.size(); ++k)
      if (k < nd.shunt_admittance.size() && nd.shunt_admittance[k] != Complex(0, 0))
        Y(gof(static_cast<int>(ni), phases[k]), gof(static_cast<int>(ni), phases[k])) +=
            nd.shunt_admittance[k];
  }
  for (const Load& l : net.loads) {
    int ni = net.node_index(l.node);
    auto phases = l.phases.list();
    for (size_t k = 0; k < phases.size(); ++k)
      if (k < l.y_const.size() && l.y_const[k] != Complex(0, 0)) {
        int g = gof(ni, phases[k]);
        Y(g, g) += l.y_const[k];
      }
  }
  return Y;
}

Eigen::VectorXcd calculated_injections(const Eigen::MatrixXcd& ybus, const PowerFlowState& st) {
  const int n = static_cast<int>(st.v.size());
  Eigen::VectorXcd V(n);
  for (int g = 0; g < n; ++g) V[g] = st.phasor(g);
  Eigen::VectorXcd I = ybus * V;
  return V.array() * I.array().conjugate();
}

PowerFlowState solve_power_flow(const NetworkModel& net, const NodePhaseIndex& idx,
                                const Eigen::MatrixXcd& ybus,
                                const Eigen::VectorXcd& injections, double slack_v,
                                const PowerFlowOptions& opts) {
  const int n = idx.n_global();
  const int r = idx.n_reduced();

  PowerFlowState st;
  st.slack_voltage = slack_v;
  st.v = Eigen::VectorXd::Constant(n, slack_v);
  st.theta.resize(n);
  for (int g = 0; g < n; ++g) st.theta[g] = balanced_angle(idx.entries[g].phase);

  for (int it = 0; it <= opts.max_iter; ++it) {
    Eigen::VectorXcd mis_c = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd calc = calculated_injections(ybus, st);
    double inf = 0.0;
    Eigen::VectorXd rhs(2 * r);
    for (int g = 0; g < n; ++g) {
      if (idx.reduced[g] < 0) continue;
      Complex m = injections[g] - calc[g];
      mis_c[g] = m;
      inf = std::max(inf, std::abs(m));
      rhs[idx.reduced[g]] = m.real();
      rhs[r + idx.reduced[g]] = m.imag();
    }
    st.mismatch = inf;
    st.iterations = it;
    if (inf <= opts.tol) return st;
    if (it == opts.max_iter) break;

    Eigen::MatrixXd J = assemble_jacobian(idx, ybus, st);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    Eigen::VectorXd d = lu.solve(rhs);
    if (!d.allFinite())
      throw PowerFlowError("power flow: singular Jacobian", inf);
    for (int k = 0; k < r; ++k) {
      int g = idx.global[k];
      st.v[g] += d[k];
      st.theta[g] += d[r + k];
      if (st.v[g] <= 0.0)
        throw PowerFlowError("power flow: voltage magnitude collapsed", inf);
    }
  }
  throw PowerFlowError("power flow: no convergence in " + std::to_string(opts.max_iter) +
                           " iterations (mismatch " + std::to_string(st.mismatch) + " pu)",
                       st.mismatch);
}

Eigen::MatrixXd assemble_jacobian(const NodePhaseIndex& idx, const Eigen::MatrixXcd& ybus,
                                  const PowerFlowState& st) {
  const int n = idx.n_global();
  const int r = idx.n_reduced();
  Eigen::VectorXcd V(n);
  for (int g = 0; g < n; ++g) V[g] = st.phasor(g);
  Eigen::VectorXcd I = ybus * V;

  Eigen::MatrixXd J(2 * r, 2 * r);
  for (int gi = 0; gi < n; ++gi) {
    int ri = idx.reduced[gi];
    if (ri < 0) continue;
    for (int gj = 0; gj < n; ++gj) {
      int rj = idx.reduced[gj];
      if (rj < 0) continue;
      Complex dS_dv, dS_dth;
      if (gi == gj) {
        // dS_i/dv_i = (V_i/v_i) conj(I_i) + V_i conj(Y_ii V_i)/v_i
        dS_dv = (V[gi] / st.v[gi]) * std::conj(I[gi]) +
                V[gi] * std::conj(ybus(gi, gi) * V[gi]) / st.v[gi];
        // dS_i/dth_i = j (V_i conj(I_i) - V_i conj(Y_ii V_i))
        dS_dth = Complex(0, 1) * (V[gi] * std::conj(I[gi]) - V[gi] * std::conj(ybus(gi, gi) * V[gi]));
      } else {
        Complex t = V[gi] * std::conj(ybus(gi, gj) * V[gj]);
        dS_dv = t / st.v[gj];
        dS_dth = Complex(0, -1) * t;
      }
      J(ri, rj) = dS_dv.real();
      J(ri, r + rj) = dS_dth.real();
      J(r + ri, rj) = dS_dv.imag();
      J(r + ri, r + rj) = dS_dth.imag();
    }
  }
  return J;
}

Eigen::VectorXcd window_injections(const NetworkModel& net, const NodePhaseIndex& idx,
                                   const std::vector<ForecastWindow>& window) {
  Eigen::VectorXcd inj = Eigen::VectorXcd::Zero(idx.n_global());
  for (const ForecastWindow& w : window) {
    int g = idx.find(net, w.node, w.phase);
    if (g < 0) continue;
    inj[g] += Complex(w.p_gen_mean - w.p_load_mean, -w.q_load_mean);
  }
  return inj;
}

SensitivityTensor sensitivities_at(const NodePhaseIndex& idx, const Eigen::MatrixXcd& ybus,
                                   const PowerFlowState& st) {
  const int r = idx.n_reduced();
  Eigen::MatrixXd J = assemble_jacobian(idx, ybus, st);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  Eigen::MatrixXd Jinv = lu.inverse();
  if (!Jinv.allFinite())
    throw std::runtime_error("sensitivities: singular power-flow Jacobian");
  double cond = J.cwiseAbs().colwise().sum().maxCoeff() *
                Jinv.cwiseAbs().colwise().sum().maxCoeff();
  if (cond > 1e12)
    throw std::runtime_error("sensitivities: Jacobian condition estimate " +
                             std::to_string(cond) + " exceeds 1e12");
  SensitivityTensor out;
  out.dv_dp = Jinv.topLeftCorner(r, r);
  out.dv_dq = Jinv.topRightCorner(r, r);
  out.operating_point = st;
  return out;
}

SensitivityTensor compute_sensitivities(const NetworkModel& net, const NodePhaseIndex& idx,
                                        const Eigen::MatrixXcd& ybus,
                                        const std::vector<ForecastWindow>& window,
                                        double slack_v) {
  Eigen::VectorXcd inj = window_injections(net, idx, window);
  PowerFlowState st = solve_power_flow(net, idx, ybus, inj, slack_v);
  return sensitivities_at(idx, ybus, st);
}

LossSummary loss_summary(const NetworkModel& net, const NodePhaseIndex& idx,
                         const PowerFlowState& st) {
  LossSummary out;
  auto gof = [&](int node, Phase p) { return idx.at(node, p); };
  for (const Branch& b : net.branches) {
    int nf = net.node_index(b.from), nt = net.node_index(b.to);
    auto phases = b.phases.list();
    const int m = static_cast<int>(phases.size());
    Eigen::VectorXcd dv(m);
    for (int k = 0; k < m; ++k)
      dv[k] = st.phasor(gof(nf, phases[k])) - st.phasor(gof(nt, phases[k]));
    Eigen::VectorXcd i = b.Z.lu().solve(dv);
    out.cable_p += (dv.array() * i.array().conjugate()).sum().real();
  }
  for (const Load& l : net.loads) {
    int ni = net.node_index(l.node);
    auto phases = l.phases.list();
    for (size_t k = 0; k < phases.size(); ++k) {
      if (k >= l.y_const.size() || l.y_const[k] == Complex(0, 0)) continue;
      double vmag = st.v[gof(ni, phases[k])];
      double p = vmag * vmag * l.y_const[k].real();
      (l.transformer_core ? out.core_p : out.other_shunt_p) += p;
    }
  }
  for (size_t ni = 0; ni < net.nodes.size(); ++ni) {
    const Node& nd = net.nodes[ni];
    auto phases = nd.phases.list();
    for (size_t k = 0; k < phases.size() && k < nd.shunt_admittance.size(); ++k) {
      if (nd.shunt_admittance[k] == Complex(0, 0)) continue;
      double vmag = st.v[gof(static_cast<int>(ni), phases[k])];
      out.other_shunt_p += vmag * vmag * nd.shunt_admittance[k].real();
    }
  }
  return out;
}

Complex slack_injection(const NodePhaseIndex& idx, const Eigen::MatrixXcd& ybus,
                        const PowerFlowState& st) {
  Eigen::VectorXcd calc = calculated_injections(ybus, st);
  Complex s(0, 0);
  for (int g = 0; g < idx.n_global(); ++g)
    if (idx.reduced[g] < 0) s += calc[g];
  return s;
}

}  // namespace dropf
