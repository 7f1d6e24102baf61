#pragma once

#include "dropf/powerflow.hpp"

namespace dropf {

/// Largest expected deviations (positive and negative) of the net injection
/// at one node-phase, derived from the min/mean/max forecasts.
struct InjectionDeviation {
  double dp_plus = 0, dp_minus = 0;
  double dq_plus = 0, dq_minus = 0;
};

InjectionDeviation injection_deviations(const ForecastWindow& w);

/// Sign-paired voltage deviation terms for one (target, source) pair:
///   dvP_plus = alpha >= 0 ? alpha*dP+ : alpha*dP-   (always >= 0)
///   dvP_minus = alpha >= 0 ? alpha*dP- : alpha*dP+  (always <= 0)
/// and the beta/Q analogues.
struct VoltageDeviationTerms {
  double p_plus = 0, p_minus = 0, q_plus = 0, q_minus = 0;
};

VoltageDeviationTerms voltage_deviation_terms(double alpha, double beta,
                                              const InjectionDeviation& d);

/// Sum of the kappa largest-magnitude elements. Ties are broken by position
/// in `terms` (callers supply canonical node/phase/P-before-Q order).
/// kappa = 0 gives 0; kappa >= |terms| sums everything.
double summaxk(const std::vector<double>& terms, int kappa);

/// Worst-case voltage swings per reduced node-phase (Eqs. 24-25 outputs).
struct VoltageMargin {
  Eigen::VectorXd dv_plus;   // >= 0
  Eigen::VectorXd dv_minus;  // <= 0
};

/// Deviations per reduced node-phase for one forecast window; node-phases
/// without a forecast row get zero deviation.
std::vector<InjectionDeviation> window_deviations(const NetworkModel& net,
                                                  const NodePhaseIndex& idx,
                                                  const std::vector<ForecastWindow>& window);

/// Margins from the kappa worst simultaneous P/Q deviations. The candidate
/// pool for each target unions the P and Q terms of every non-slack
/// node-phase, in canonical (node, phase, P-before-Q) order.
VoltageMargin compute_margins(const SensitivityTensor& sens,
                              const std::vector<InjectionDeviation>& dev, int kappa);

/// Per-global-node-phase voltage bounds after margin tightening, plus the
/// squared form used by the OPF's diag(V) rows.
struct VoltageLimits {
  Eigen::VectorXd v_lo, v_hi;      // pu, global node-phases
  Eigen::VectorXd lo_sq, hi_sq;    // pu^2
  bool collapsed = false;          // some v_lo >= v_hi
  std::vector<int> collapsed_at;   // offending global indices
  double gamma = 1.0;              // margin scale actually applied
};

/// Default (untightened) limits straight from the node data.
VoltageLimits default_limits(const NetworkModel& net, const NodePhaseIndex& idx);

/// v_lo = vmin - dv_minus, v_hi = vmax - dv_plus, margins scaled by gamma.
/// Marks the result collapsed when any v_lo >= v_hi.
VoltageLimits tightened_voltage_limits(const NetworkModel& net, const NodePhaseIndex& idx,
                                       const VoltageMargin& margin, double gamma = 1.0);

/// Degradation ladder gamma = 1, 0.5, 0.25, 0: first non-collapsed result.
VoltageLimits tightened_with_fallback(const NetworkModel& net, const NodePhaseIndex& idx,
                                      const VoltageMargin& margin,
                                      std::vector<double>* gammas_tried = nullptr);

}  // namespace dropf
