#ifndef WFEQ_CLASSIFY_HPP_
#define WFEQ_CLASSIFY_HPP_

#include <span>
#include <string>
#include <vector>

#include "wfeq/turbine.hpp"

namespace wfeq {

/// Active-power response classes of a turbine under a voltage dip.
enum class ResponseCategory {
  kRampRecovery,    ///< I   — current-limited during the fault, ramped recovery
  kInstantRecovery, ///< II  — current-limited during the fault, instant recovery
  kUnaffected,      ///< III — active power unaffected by the fault
};

/// Roman-numeral label used in reports and CSV output ("I", "II", "III").
std::string to_string(ResponseCategory category);
ResponseCategory category_from_string(const std::string& label);

/// Critical pre-fault powers separating the response classes at a given
/// clearance-instant terminal voltage alpha and pre-fault voltage e.
struct CriticalPowers {
  double p_cri1;  ///< boundary between ramp recovery and instant recovery
  double p_cri2;  ///< boundary between instant recovery and unaffected
};

/// Critical wind speeds (power-curve inverse of the critical powers),
/// clamped to [v_cutin, v_rated] with out-of-range flags.
struct CriticalSpeeds {
  double v_cri1;
  double v_cri2;
  bool cri1_clamped;
  bool cri2_clamped;
};

/// One turbine's class together with the indicators that produced it.
struct ClusterAssignment {
  ResponseCategory category;
  double v_w;          ///< operating wind speed, m/s
  double alpha_fminus; ///< terminal voltage at the instant before clearance, pu
  double p0;           ///< pre-fault active power, pu
  double p_cri1;
  double p_cri2;
};

/// p_cri1 = e * id_max(alpha), the largest pre-fault power whose active
/// current still fits the converter circle next to the reactive demand at
/// alpha; p_cri2 = alpha * p_cri1. Zero when reactive demand consumes the
/// whole limit.
CriticalPowers critical_powers(double alpha, double e,
                               const TurbineParams& params);

CriticalSpeeds critical_speeds(double alpha, double e,
                               const TurbineParams& params);

/// Assign a turbine to its response class from wind speed and the terminal
/// voltage at the instant before fault clearance. Turbines producing no
/// power, or with terminal voltage above the support band, are unaffected.
ClusterAssignment classify_wtg(double v_w, double alpha, double e,
                               const TurbineParams& params);

/// One row of the classification-boundary table.
struct BoundaryRow {
  double alpha;
  double v_cri1;
  double v_cri2;
  bool cri1_clamped;
  bool cri2_clamped;
};

std::vector<BoundaryRow> boundary_table(std::span<const double> alpha_grid,
                                        double e, const TurbineParams& params);

/// CSV with header alpha,v_cri1,v_cri2,v_cri1_clamped,v_cri2_clamped.
std::string boundary_table_csv(std::span<const BoundaryRow> rows);

}  // namespace wfeq

#endif  // WFEQ_CLASSIFY_HPP_
