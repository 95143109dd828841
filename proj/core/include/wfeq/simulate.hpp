#ifndef WFEQ_SIMULATE_HPP_
#define WFEQ_SIMULATE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "wfeq/aggregate.hpp"
#include "wfeq/network.hpp"
#include "wfeq/timeseries.hpp"
#include "wfeq/turbine.hpp"

namespace wfeq {

/// A programmable voltage dip behind the Thevenin grid impedance: the
/// source magnitude drops from e_prefault to e_fault on [t_fault, t_clear).
struct FaultScenario {
  double e_prefault = 1.0;
  double e_fault = 0.2;
  double t_fault = 0.5;   ///< s
  double t_clear = 0.6;   ///< s
  double t_end = 2.0;     ///< s
  double dt = 1e-3;       ///< s
  Complex grid_thevenin_z{0.0, 0.0};

  void validate() const;
  double source_at(double t) const {
    return (t >= t_fault && t < t_clear) ? e_fault : e_prefault;
  }

  friend bool operator==(const FaultScenario&, const FaultScenario&) = default;
};

/// Sample index of the last faulted step (the instant before clearance).
std::size_t index_before_clear(const FaultScenario& scenario);

/// One generating unit of a simulation: a single-machine control model
/// whose output current is scaled by `scale` machines. An empty schedule
/// means the ordinary constant recovery rate.
struct SimUnit {
  double speed = 0.0;  ///< m/s
  double scale = 1.0;  ///< machine count represented by this unit
  std::vector<RampSegment> schedule;
};

struct SimOptions {
  double network_tol = 1e-10;
  int network_max_iter = 100;
  bool record_node_voltages = false;
  bool record_unit_powers = false;
};

/// Self-consistent pre-fault operating point: constant-power injections
/// p0 at every unit node, the PCC floating on the Thevenin source.
struct NetworkSnapshot {
  std::vector<Complex> voltages;  ///< per unit node
  Complex u_pcc;
};
NetworkSnapshot solve_constant_power_network(const FarmTopology& farm,
                                             std::span<const double> p0,
                                             double e_source, Complex grid_z,
                                             double tol, int max_iter);

/// Quasi-static phasor time stepping: each step advances every unit's
/// converter currents on the previous terminal voltage, then solves the
/// network algebraically (feeders plus the PCC node on the Thevenin source)
/// with the currents held fixed. Unit nodes must match the topology's
/// turbine nodes one-to-one in farm order.
TimeSeries run_simulation(const FarmTopology& farm,
                          std::span<const SimUnit> units,
                          const FaultScenario& scenario,
                          const TurbineParams& params,
                          const SimOptions& options = {});

}  // namespace wfeq

#endif  // WFEQ_SIMULATE_HPP_
