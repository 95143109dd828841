#ifndef WFEQ_AGGREGATE_HPP_
#define WFEQ_AGGREGATE_HPP_

#include <span>
#include <vector>

#include "wfeq/classify.hpp"
#include "wfeq/network.hpp"
#include "wfeq/turbine.hpp"

namespace wfeq {

/// One piece of a piecewise-constant recovery-rate schedule: `rate` applies
/// from t_start (measured from fault clearance) until the next segment.
struct RampSegment {
  double t_start;
  double rate;
};

/// Active-current recovery rate at time t since clearance. Falls back to
/// `fallback` (normally k_ramp) when the schedule is empty.
double schedule_rate(std::span<const RampSegment> schedule, double t,
                     double fallback);

/// Single-machine equivalent of one response-class cluster. The unit is
/// simulated as one turbine whose currents are scaled by n_machines and
/// which connects to the PCC through (line_r, line_x).
struct EquivalentUnit {
  ResponseCategory category = ResponseCategory::kUnaffected;
  int n_machines = 0;
  double v_eq = 0.0;                    ///< equivalent wind speed, m/s
  std::vector<RampSegment> ramp_schedule;  ///< empty = ordinary single-rate ramp
  double line_r = 0.0;                  ///< pu
  double line_x = 0.0;                  ///< pu
  double q_equ = 0.0;    ///< cluster reactive power at clearance, pu
  double alpha_equ = 0.0;///< unit terminal voltage at clearance, pu
  double p_equ = 0.0;    ///< unit active power at clearance, pu
  std::vector<int> members;  ///< turbine indices (farm order)
};

struct EquivalentFarm {
  std::vector<EquivalentUnit> units;  ///< non-empty clusters, class I first
  double pcc_voltage_used = 1.0;      ///< alpha_pcc the farm was built for
};

/// Wind speed whose per-machine power equals the cluster mean power:
/// f_inv(mean(f(v_i))). Exact power conservation whenever the mean lies in
/// the curve's invertible range; an all-idle cluster returns its mean speed.
double equivalent_wind_speed(std::span<const double> cluster_speeds,
                             const TurbineParams& params);

/// One ramp-recovery cluster member: wind speed, terminal voltage at the
/// clearance instant, and pre-fault terminal voltage.
struct ClusterMember {
  double v_w;
  double alpha;
  double e = 1.0;
};

/// Per-machine ramp durations (f(v_w)/e - id_max(alpha)) / k_ramp, sorted
/// ascending. Throws EquivalenceError when a member has no recovery to ramp
/// (negative duration), which contradicts its classification.
std::vector<double> ramp_durations(std::span<const ClusterMember> cluster,
                                   const TurbineParams& params);

/// Piecewise-constant rate schedule reproducing the staggered completion of
/// the cluster's individual recoveries: full rate until the first machine
/// finishes, then (N-j)/N of it after the j-th finishes.
std::vector<RampSegment> klim_schedule(std::span<const double> durations_sorted,
                                       const TurbineParams& params);

/// Cluster reactive power at the clearance instant: sum of alpha*iq_ref(alpha).
double cluster_reactive(std::span<const double> alphas,
                        const TurbineParams& params);

/// Terminal voltage of the equivalent unit that reproduces the cluster's
/// reactive power: the root of q = gain*i_n*n*(upper - a)*a nearer to
/// alpha_pcc (ties to the larger root). Throws EquivalenceError when q_equ
/// exceeds the cluster's maximum reactive capability.
double equivalent_terminal_voltage(double q_equ, int n_c, double alpha_pcc,
                                   const TurbineParams& params);

/// Unit active power at the clearance instant: current-limited classes use
/// n*alpha*id_max(alpha); the unaffected class keeps its pre-fault power.
double equivalent_power_at_clearance(ResponseCategory category, int n_c,
                                     double alpha_equ, double v_eq,
                                     const TurbineParams& params);

struct LineImpedance {
  double r;
  double x;
};

/// Equivalent collector line carrying (p_equ, q_equ) that drops the unit
/// terminal voltage alpha_equ to alpha_pcc at the PCC, with the physical
/// r/x ratio k0. Of the two solutions the static-stable one (smaller
/// reactance) is returned. Throws EquivalenceError when no feasible line
/// exists and std::invalid_argument when alpha_equ < alpha_pcc or the flow
/// is zero.
LineImpedance equivalent_line(double p_equ, double q_equ, double alpha_equ,
                              double alpha_pcc, double k0);

/// PCC phasor reproduced by back-substituting a line into the scalar drop
/// equations, with the unit terminal voltage on the real axis.
Complex line_pcc_phasor(double p, double q, double alpha_equ, double r,
                        double x);

/// |line_pcc_phasor|, for checking a reconstructed line against alpha_pcc.
double line_pcc_voltage(double p, double q, double alpha_equ, double r,
                        double x);

/// Classify every turbine of the farm from its wind speed, its terminal
/// voltage at the clearance instant and its pre-fault terminal voltage.
std::vector<ClusterAssignment> classify_farm(
    std::span<const double> speeds, std::span<const Complex> terminal_voltages,
    std::span<const double> e_prefault, const TurbineParams& params);

/// Assemble the per-class equivalent farm for a given PCC voltage at the
/// clearance instant. Units are emitted only for non-empty classes; the
/// ramp-recovery class gets the multi-segment schedule. Line ratios k0 are
/// the pre-fault-power-weighted mean of the members' root-path r/x ratios.
EquivalentFarm build_equivalent_farm(const FarmTopology& farm,
                                     std::span<const double> speeds,
                                     double alpha_pcc,
                                     std::span<const Complex> terminal_voltages,
                                     std::span<const double> e_prefault,
                                     const TurbineParams& params);

/// Wind-speed-only baseline: one unit over the whole farm, equivalent wind
/// speed, ordinary single-rate ramp, and the mean physical root-path
/// impedance on the n-machine base (divided by the machine count).
EquivalentFarm build_traditional_farm(const FarmTopology& farm,
                                      std::span<const double> speeds,
                                      const TurbineParams& params);

}  // namespace wfeq

#endif  // WFEQ_AGGREGATE_HPP_
