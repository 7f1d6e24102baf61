#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "dropf/network.hpp"

namespace dropf {

namespace {

bool is_inf(double x) { return std::isinf(x); }

void check_symmetric_pair(const Complex& Z1, const Complex& Z2, const std::string& what) {
  double scale = std::max(std::abs(Z1), std::abs(Z2));
  if (scale == 0.0) return;
  if (std::abs(Z1 - Z2) / scale > 1e-12)
    throw std::runtime_error(what + ": asymmetric secondary violates model assumption (Z1 != Z2)");
}

}  // namespace

Complex core_shunt_impedance(double Rc, double Xm) {
  if (!(Rc > 0.0) || !(Xm > 0.0))
    throw std::runtime_error("core_shunt_impedance: Rc and Xm must be positive");
  if (is_inf(Rc) && is_inf(Xm))
    throw std::runtime_error("core_shunt_impedance: no core model (Rc and Xm both infinite)");
  if (is_inf(Rc)) return Complex(0.0, Xm);
  if (is_inf(Xm)) return Complex(Rc, 0.0);
  // Z_c = j Rc Xm / (Rc + j Xm)
  return Complex(0.0, Rc * Xm) / Complex(Rc, Xm);
}

SplitPhaseExpansion expand_split_phase(const SplitPhaseTransformer& xfmr,
                                       const std::vector<TriplexLine>& triplex,
                                       const PerUnitSystem& pu) {
  if (!(xfmr.Vbp_ln > xfmr.Vbs_ln) || !(xfmr.Vbs_ln > 0.0))
    throw std::runtime_error("expand_split_phase: requires Vbp_ln > Vbs_ln > 0");
  check_symmetric_pair(xfmr.Z1, xfmr.Z2, "transformer " + xfmr.id);
  for (const TriplexLine& t : triplex) check_symmetric_pair(t.Z1, t.Z2, "triplex " + t.from + "-" + t.to);

  const double Zbp = PerUnitSystem::z_base_primary(xfmr.Vbp_ln, pu.S_b);
  const double Zbs = PerUnitSystem::z_base_secondary(xfmr.Vbs_ln, pu.S_b);
  const PhaseSet ph = PhaseSet::single(xfmr.phase);
  const double rating_pu = xfmr.rating > 0.0 ? xfmr.rating / pu.s_phase_base() : 0.0;
  const double amp = rating_pu > 0.0 ? 2.0 * rating_pu : 0.0;

  SplitPhaseExpansion out;
  out.core_node = xfmr.id + ".e0";

  Node e0;
  e0.id = out.core_node;
  e0.phases = ph;
  e0.kind = NodeKind::MediumVoltage;  // primary-side internal node
  e0.vmin = {0.95};
  e0.vmax = {1.05};
  e0.shunt_admittance = {Complex(0.0, 0.0)};
  out.nodes.push_back(e0);

  auto make_branch = [&](const std::string& from, const std::string& to, Complex z_pu) {
    Branch b;
    b.from = from;
    b.to = to;
    b.phases = ph;
    b.Z = Eigen::MatrixXcd::Constant(1, 1, z_pu);
    b.ampacity = {amp};
    return b;
  };

  out.branches.push_back(make_branch(xfmr.primary_node, e0.id, xfmr.Z0 / Zbp));
  out.branches.push_back(make_branch(e0.id, xfmr.secondary_node, xfmr.Z1 / Zbs));
  for (const TriplexLine& t : triplex)
    out.branches.push_back(make_branch(t.from, t.to, t.Z1 / Zbs));

  // Core losses enter as a constant-impedance load at the artificial node.
  if (!(is_inf(xfmr.Rc) && is_inf(xfmr.Xm))) {
    Complex Zc_pu = core_shunt_impedance(xfmr.Rc, xfmr.Xm) / Zbp;
    Load core;
    core.node = e0.id;
    core.phases = ph;
    core.s_pq = {Complex(0.0, 0.0)};
    core.y_const = {1.0 / Zc_pu};
    core.transformer_core = true;
    out.shunt_loads.push_back(core);
  }
  return out;
}

NetworkModel expand_network(const NetworkModel& net_pu) {
  if (net_pu.units != Units::PerUnit)
    throw std::runtime_error("expand_network: call to_per_unit first");

  NetworkModel out = net_pu;
  out.transformers.clear();
  out.triplex.clear();

  // Group triplex runs by the transformer secondary they hang from.
  std::map<std::string, std::vector<std::string>> down;
  for (const TriplexLine& t : net_pu.triplex) down[t.from].push_back(t.to);

  for (const SplitPhaseTransformer& x : net_pu.transformers) {
    std::vector<TriplexLine> group;
    std::queue<std::string> frontier;
    frontier.push(x.secondary_node);
    while (!frontier.empty()) {
      std::string u = frontier.front();
      frontier.pop();
      for (const TriplexLine& t : net_pu.triplex)
        if (t.from == u) {
          group.push_back(t);
          frontier.push(t.to);
        }
    }
    SplitPhaseExpansion ex = expand_split_phase(x, group, net_pu.base);
    for (Node& n : ex.nodes) {
      out.base.Vb_ln[n.id] = x.Vbp_ln;  // E0 is a primary-side node
      // Inherit the primary node's limit for the chain phase when available.
      if (const Node* p = net_pu.find_node(x.primary_node)) {
        if (p->phases.contains(x.phase)) {
          int k = p->phases.index_of(x.phase);
          n.vmin = {p->vmin[k]};
          n.vmax = {p->vmax[k]};
        }
      }
      out.nodes.push_back(n);
    }
    for (Branch& b : ex.branches) out.branches.push_back(b);
    for (Load& l : ex.shunt_loads) out.loads.push_back(l);
  }
  return out;
}

}  // namespace dropf
