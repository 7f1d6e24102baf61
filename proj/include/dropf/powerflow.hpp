#pragma once

#include <Eigen/Dense>

#include "dropf/forecast.hpp"
#include "dropf/network.hpp"

namespace dropf {

/// Canonical flattening of (node, phase) pairs for an expanded network:
/// nodes in model order, phases a < b < c within a node. The reduced index
/// skips the substation phases (the slack).
struct NodePhaseIndex {
  struct Entry {
    int node = 0;
    Phase phase = Phase::A;
  };
  std::vector<Entry> entries;       // size n_global
  std::vector<int> reduced;         // global -> reduced, -1 at slack
  std::vector<int> global;          // reduced -> global
  std::vector<std::array<int, 3>> by_node;  // [node][phase] -> global, -1 if absent
  int slack_node = -1;

  int n_global() const { return static_cast<int>(entries.size()); }
  int n_reduced() const { return static_cast<int>(global.size()); }
  int at(int node, Phase ph) const { return by_node[node][static_cast<int>(ph)]; }
  int find(const NetworkModel& net, const std::string& node, Phase ph) const;

  static NodePhaseIndex build(const NetworkModel& net);
};

/// Bus admittance over global node-phases: branch series terms plus node
/// shunts and every constant-impedance load.
Eigen::MatrixXcd build_ybus(const NetworkModel& net, const NodePhaseIndex& idx);

struct PowerFlowState {
  Eigen::VectorXd v;      // global node-phase voltage magnitudes, pu
  Eigen::VectorXd theta;  // global angles, rad
  double slack_voltage = 1.0;
  int iterations = 0;
  double mismatch = 0.0;  // final infinity norm, pu

  Complex phasor(int g) const { return std::polar(v[g], theta[g]); }
};

struct PowerFlowOptions {
  double tol = 1e-8;
  int max_iter = 50;
};

struct PowerFlowError : std::runtime_error {
  double mismatch;
  PowerFlowError(const std::string& what, double mis)
      : std::runtime_error(what), mismatch(mis) {}
};

/// Newton-Raphson in polar form. `injections` is the global node-phase
/// vector of generation minus constant-power load (slack entries ignored);
/// constant-impedance parts live in the admittance matrix.
PowerFlowState solve_power_flow(const NetworkModel& net, const NodePhaseIndex& idx,
                                const Eigen::MatrixXcd& ybus,
                                const Eigen::VectorXcd& injections, double slack_v,
                                const PowerFlowOptions& opts = {});

/// Calculated complex injections V .* conj(Y V) at every global node-phase.
Eigen::VectorXcd calculated_injections(const Eigen::MatrixXcd& ybus, const PowerFlowState& st);

/// J = d(p,q)/d(v,theta) over reduced node-phases; rows [p;q], cols [v;theta].
Eigen::MatrixXd assemble_jacobian(const NodePhaseIndex& idx, const Eigen::MatrixXcd& ybus,
                                  const PowerFlowState& st);

struct SensitivityTensor {
  Eigen::MatrixXd dv_dp;  // reduced x reduced
  Eigen::MatrixXd dv_dq;
  PowerFlowState operating_point;
};

/// Sensitivities at the dispatch linearization point: slack 1.0 pu, loads at
/// their mean forecast, DER at mean maximum available P and unity pf.
SensitivityTensor compute_sensitivities(const NetworkModel& net, const NodePhaseIndex& idx,
                                        const Eigen::MatrixXcd& ybus,
                                        const std::vector<ForecastWindow>& window,
                                        double slack_v = 1.0);

/// Sensitivities about an explicit operating point.
SensitivityTensor sensitivities_at(const NodePhaseIndex& idx, const Eigen::MatrixXcd& ybus,
                                   const PowerFlowState& st);

/// Injections (gen - constant-power load) for one forecast window at the
/// linearization point.
Eigen::VectorXcd window_injections(const NetworkModel& net, const NodePhaseIndex& idx,
                                   const std::vector<ForecastWindow>& window);

struct LossSummary {
  double cable_p = 0.0;       // sum over branches of I^2 R, pu
  double core_p = 0.0;        // transformer-core shunt losses, pu
  double other_shunt_p = 0.0; // remaining constant-impedance losses, pu
  double total() const { return cable_p + core_p + other_shunt_p; }
};

LossSummary loss_summary(const NetworkModel& net, const NodePhaseIndex& idx,
                         const PowerFlowState& st);

/// Total complex power injected at the substation phases.
Complex slack_injection(const NodePhaseIndex& idx, const Eigen::MatrixXcd& ybus,
                        const PowerFlowState& st);

}  // namespace dropf
