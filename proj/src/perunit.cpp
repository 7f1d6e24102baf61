#include "dropf/network.hpp"

namespace dropf {

namespace {

enum class Dir { ToPu, ToSi };

NetworkModel convert(const NetworkModel& in, Dir dir) {
  NetworkModel out = in;
  const double Sp = in.base.s_phase_base();
  if (!(Sp > 0.0)) throw std::runtime_error("per-unit conversion: S_b not set");

  auto zb_of = [&](const std::string& id) {
    const Node* n = in.find_node(id);
    if (!n) throw std::runtime_error("per-unit conversion: unknown node '" + id + "'");
    return in.z_base(*n);
  };
  auto ib_of = [&](const std::string& id) {
    const Node* n = in.find_node(id);
    if (!n) throw std::runtime_error("per-unit conversion: unknown node '" + id + "'");
    return in.i_base(*n);
  };

  for (Branch& b : out.branches) {
    double zb = zb_of(b.from);
    double zb2 = zb_of(b.to);
    if (std::abs(zb - zb2) / zb > 1e-9)
      throw std::runtime_error("per-unit conversion: branch " + b.from + "-" + b.to +
                               " spans different impedance bases");
    double ib = ib_of(b.from);
    if (dir == Dir::ToPu) {
      b.Z /= zb;
      for (double& a : b.ampacity) a = a > 0.0 ? a / ib : a;
    } else {
      b.Z *= zb;
      for (double& a : b.ampacity) a = a > 0.0 ? a * ib : a;
    }
  }
  for (Node& n : out.nodes) {
    double zb = zb_of(n.id);
    for (Complex& y : n.shunt_admittance) y = dir == Dir::ToPu ? y * zb : y / zb;
  }
  for (Load& l : out.loads) {
    double zb = zb_of(l.node);
    for (Complex& s : l.s_pq) s = dir == Dir::ToPu ? s / Sp : s * Sp;
    for (Complex& y : l.y_const) y = dir == Dir::ToPu ? y * zb : y / zb;
  }
  for (Der& d : out.ders) {
    double f = dir == Dir::ToPu ? 1.0 / Sp : Sp;
    d.p_min *= f;
    d.p_max *= f;
    d.q_min *= f;
    d.q_max *= f;
    d.s_rated *= f;
  }
  out.units = dir == Dir::ToPu ? Units::PerUnit : Units::SI;
  return out;
}

}  // namespace

NetworkModel to_per_unit(const NetworkModel& net_si) {
  if (net_si.units == Units::PerUnit) return net_si;
  return convert(net_si, Dir::ToPu);
}

NetworkModel from_per_unit(const NetworkModel& net_pu) {
  if (net_pu.units == Units::SI) return net_pu;
  return convert(net_pu, Dir::ToSi);
}

}  // namespace dropf
