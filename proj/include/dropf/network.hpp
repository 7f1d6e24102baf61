#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dropf/types.hpp"

namespace dropf {

enum class NodeKind { Substation, MediumVoltage, Secondary, ServicePoint };

std::string node_kind_str(NodeKind k);
NodeKind parse_node_kind(const std::string& s);

struct Node {
  std::string id;
  PhaseSet phases;
  NodeKind kind = NodeKind::MediumVoltage;
  std::vector<double> vmin;  // per phase, pu
  std::vector<double> vmax;  // per phase, pu
  std::vector<Complex> shunt_admittance;  // per phase, pu (zero when absent)
};

struct Branch {
  std::string from, to;
  PhaseSet phases;
  Eigen::MatrixXcd Z;              // |phi| x |phi| phase impedance, Ohm (SI) or pu
  std::vector<double> ampacity;    // per-phase current magnitude limit; <=0 means none
};

/// Center-tapped split-phase distribution transformer. Z0, Rc, Xm are
/// primary-referred Ohms (they sit on the primary side of the ideal
/// transformer); Z1, Z2 are secondary-referred Ohms.
struct SplitPhaseTransformer {
  std::string id;
  std::string primary_node;    // MV node carrying `phase`
  std::string secondary_node;  // secondary terminal node (V_1i)
  Phase phase = Phase::A;
  Complex Z0, Z1, Z2;
  double Rc = 0.0, Xm = 0.0;   // Ohm; +inf marks an absent element
  double Vbp_ln = 0.0, Vbs_ln = 0.0;  // base line-neutral volts
  double rating = 0.0;         // VA
};

struct TriplexLine {
  std::string from, to;  // secondary-side node ids
  Complex Z1, Z2;        // per-conductor Ohm (total for the run)
  double length_m = 0.0;
};

struct Load {
  std::string node;
  PhaseSet phases;
  std::vector<Complex> s_pq;     // per phase constant power (VA in SI, pu otherwise)
  std::vector<Complex> y_const;  // per phase constant admittance (S in SI, pu otherwise)
  bool transformer_core = false; // emitted by split-phase expansion
};

struct Der {
  std::string id;
  std::string node;
  PhaseSet phases;
  double p_min = 0.0, p_max = 0.0;  // per phase
  double q_min = 0.0, q_max = 0.0;
  double s_rated = 0.0;             // per phase apparent power rating
};

/// Base quantities. Powers use the per-phase base S_b/3 throughout so that
/// v_pu * i_pu = s_pu holds on every side of a split-phase transformer:
///   primary:   I_bp = S_b/(3 Vbp),  Z_bp = 3 Vbp^2 / S_b
///   secondary: I_bs = S_b/(6 Vbs),  Z_bs = 6 Vbs^2 / S_b
struct PerUnitSystem {
  double S_b = 0.0;                       // three-phase VA
  std::map<std::string, double> Vb_ln;    // node id -> base line-neutral volts

  double s_phase_base() const { return S_b / 3.0; }
  static double z_base_primary(double Vb, double S_b) { return 3.0 * Vb * Vb / S_b; }
  static double z_base_secondary(double Vb, double S_b) { return 6.0 * Vb * Vb / S_b; }
  static double i_base_primary(double Vb, double S_b) { return S_b / (3.0 * Vb); }
  static double i_base_secondary(double Vb, double S_b) { return S_b / (6.0 * Vb); }
};

enum class Units { SI, PerUnit };

struct NetworkModel {
  Units units = Units::SI;
  PerUnitSystem base;
  std::vector<Node> nodes;
  std::vector<Branch> branches;
  std::vector<SplitPhaseTransformer> transformers;
  std::vector<TriplexLine> triplex;
  std::vector<Load> loads;
  std::vector<Der> ders;

  const Node* find_node(const std::string& id) const;
  Node* find_node(const std::string& id);
  int node_index(const std::string& id) const;  // -1 when missing
  bool is_secondary_side(const Node& n) const {
    return n.kind == NodeKind::Secondary || n.kind == NodeKind::ServicePoint;
  }
  double z_base(const Node& n) const;
  double i_base(const Node& n) const;
  double v_base(const std::string& id) const;
};

struct Diagnostic {
  std::string code;     // stable identifier, e.g. "not-radial"
  std::string subject;  // offending node/branch id
  std::string message;
};

/// Structural checks: radial tree rooted at the single substation, phase
/// subsets consistent, per-unit bases present, incoming branch phases equal
/// the child node's phases. Returns all violations found (empty = valid).
std::vector<Diagnostic> validate_network(const NetworkModel& net);

/// Shunt impedance of the transformer core, Rc parallel jXm (Ohm).
/// Infinite Rc or Xm marks an absent element; both infinite is an error.
Complex core_shunt_impedance(double Rc, double Xm);

/// Result of expanding one split-phase transformer and its triplex runs into
/// BFM-compatible single-phase elements (all pu).
struct SplitPhaseExpansion {
  std::vector<Node> nodes;      // artificial core node (E0) + terminal node
  std::vector<Branch> branches; // Z0_pu, Z1_pu, triplex segments
  std::vector<Load> shunt_loads;  // core loss as constant-impedance load at E0
  std::string core_node;
};

SplitPhaseExpansion expand_split_phase(const SplitPhaseTransformer& xfmr,
                                       const std::vector<TriplexLine>& triplex,
                                       const PerUnitSystem& pu);

/// Expands every transformer of a per-unit network; the result has no
/// split-phase elements left and passes validate_network.
NetworkModel expand_network(const NetworkModel& net_pu);

NetworkModel to_per_unit(const NetworkModel& net_si);
NetworkModel from_per_unit(const NetworkModel& net_pu);

}  // namespace dropf
