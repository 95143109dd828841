#ifndef WFEQ_PIPELINE_HPP_
#define WFEQ_PIPELINE_HPP_

#include <span>
#include <vector>

#include "wfeq/aggregate.hpp"
#include "wfeq/simulate.hpp"

namespace wfeq {

/// Iteration limits of the nested solvers.
struct SolverOptions {
  double terminal_tol = 1e-6;  ///< pu, terminal-voltage fixed point
  int terminal_max_iter = 50;
  double pcc_tol = 1e-3;       ///< pu, PCC-voltage outer iteration
  int pcc_max_iter = 10;
  double network_tol = 1e-10;  ///< pu, per-step network solve
  int network_max_iter = 100;
  /// Replace the solved pre-fault voltages by 1.0 in the clustering
  /// indicators (the flat-voltage approximation).
  bool assume_unity_prefault_voltage = false;

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

/// Pre-fault operating point of the detailed farm.
struct PrefaultState {
  std::vector<Complex> voltages;  ///< per turbine
  Complex u_pcc;
  std::vector<double> p0;    ///< pre-fault power per turbine
  std::vector<double> e0;    ///< clustering voltage (|U| or 1.0)
  std::vector<double> i_d0;  ///< p0 / e0
};

PrefaultState solve_prefault(const FarmTopology& farm,
                             std::span<const double> speeds,
                             const FaultScenario& scenario,
                             const TurbineParams& params,
                             const SolverOptions& options);

/// Simulation units of the detailed per-turbine farm.
std::vector<SimUnit> detailed_units(std::span<const double> speeds);

/// Star topology of an equivalent farm: each unit behind its own line,
/// sharing the original transformer and grid coupling.
FarmTopology equivalent_topology(const EquivalentFarm& equivalent,
                                 const FarmTopology& farm);

/// Simulation units of an equivalent farm (scaled machines, schedules).
std::vector<SimUnit> equivalent_units(const EquivalentFarm& equivalent);

TimeSeries run_detailed(const FarmTopology& farm, std::span<const double> speeds,
                        const FaultScenario& scenario,
                        const TurbineParams& params,
                        const SolverOptions& options, bool record_nodes = false);

TimeSeries run_equivalent(const EquivalentFarm& equivalent,
                          const FarmTopology& farm,
                          const FaultScenario& scenario,
                          const TurbineParams& params,
                          const SolverOptions& options,
                          bool record_nodes = false);

/// Outcome of the simulation-based PCC-voltage iteration.
struct PccIterationResult {
  EquivalentFarm farm;          ///< built at the accepted PCC voltage
  std::vector<double> alpha_trace;  ///< 1.0 followed by each simulated value
  int simulations = 0;          ///< equivalent-model runs performed
  std::vector<ClusterAssignment> assignments;  ///< final classification
  std::vector<Complex> terminal_voltages;      ///< final clearance voltages
  PrefaultState prefault;
};

/// Alternate terminal-voltage solves, equivalent-model builds and scenario
/// simulations until the simulated PCC voltage at the instant before
/// clearance reproduces the assumed one within pcc_tol. Starts from 1.0.
/// Throws ConvergenceError (with the trace in the message) when
/// pcc_max_iter passes do not converge.
PccIterationResult pcc_iteration(const FarmTopology& farm,
                                 std::span<const double> speeds,
                                 const FaultScenario& scenario,
                                 const TurbineParams& params,
                                 const SolverOptions& options);

}  // namespace wfeq

#endif  // WFEQ_PIPELINE_HPP_
