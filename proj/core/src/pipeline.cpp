#include "wfeq/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "wfeq/errors.hpp"

namespace wfeq {

PrefaultState solve_prefault(const FarmTopology& farm,
                             std::span<const double> speeds,
                             const FaultScenario& scenario,
                             const TurbineParams& params,
                             const SolverOptions& options) {
  if (speeds.size() != farm.turbine_count())
    throw std::invalid_argument("solve_prefault: one speed per turbine required");
  PrefaultState state;
  state.p0.resize(speeds.size());
  for (std::size_t i = 0; i < speeds.size(); ++i)
    state.p0[i] = power_curve(speeds[i], params);
  NetworkSnapshot snap = solve_constant_power_network(
      farm, state.p0, scenario.e_prefault, scenario.grid_thevenin_z,
      options.network_tol, options.network_max_iter);
  state.voltages = std::move(snap.voltages);
  state.u_pcc = snap.u_pcc;
  state.e0.resize(speeds.size());
  state.i_d0.resize(speeds.size());
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    state.e0[i] = options.assume_unity_prefault_voltage
                      ? 1.0
                      : std::abs(state.voltages[i]);
    state.i_d0[i] = state.p0[i] / std::max(state.e0[i], kVoltageFloor);
  }
  return state;
}

std::vector<SimUnit> detailed_units(std::span<const double> speeds) {
  std::vector<SimUnit> units;
  units.reserve(speeds.size());
  for (double v : speeds) units.push_back(SimUnit{v, 1.0, {}});
  return units;
}

FarmTopology equivalent_topology(const EquivalentFarm& equivalent,
                                 const FarmTopology& farm) {
  FarmTopology topo;
  topo.pcc_transformer_z = farm.pcc_transformer_z;
  topo.grid_thevenin_z = farm.grid_thevenin_z;
  topo.feeders.reserve(equivalent.units.size());
  for (const EquivalentUnit& unit : equivalent.units) {
    Feeder feeder;
    feeder.branches.push_back(Branch{0, 1, Complex{unit.line_r, unit.line_x}});
    feeder.turbine_nodes.push_back(1);
    topo.feeders.push_back(std::move(feeder));
  }
  return topo;
}

std::vector<SimUnit> equivalent_units(const EquivalentFarm& equivalent) {
  std::vector<SimUnit> units;
  units.reserve(equivalent.units.size());
  for (const EquivalentUnit& unit : equivalent.units)
    units.push_back(SimUnit{unit.v_eq, static_cast<double>(unit.n_machines),
                            unit.ramp_schedule});
  return units;
}

namespace {

SimOptions sim_options(const SolverOptions& options, bool record_nodes) {
  SimOptions sim;
  sim.network_tol = options.network_tol;
  sim.network_max_iter = options.network_max_iter;
  sim.record_node_voltages = record_nodes;
  sim.record_unit_powers = record_nodes;
  return sim;
}

}  // namespace

TimeSeries run_detailed(const FarmTopology& farm, std::span<const double> speeds,
                        const FaultScenario& scenario,
                        const TurbineParams& params,
                        const SolverOptions& options, bool record_nodes) {
  return run_simulation(farm, detailed_units(speeds), scenario, params,
                        sim_options(options, record_nodes));
}

TimeSeries run_equivalent(const EquivalentFarm& equivalent,
                          const FarmTopology& farm,
                          const FaultScenario& scenario,
                          const TurbineParams& params,
                          const SolverOptions& options, bool record_nodes) {
  return run_simulation(equivalent_topology(equivalent, farm),
                        equivalent_units(equivalent), scenario, params,
                        sim_options(options, record_nodes));
}

PccIterationResult pcc_iteration(const FarmTopology& farm,
                                 std::span<const double> speeds,
                                 const FaultScenario& scenario,
                                 const TurbineParams& params,
                                 const SolverOptions& options) {
  scenario.validate();
  PccIterationResult result;
  result.prefault = solve_prefault(farm, speeds, scenario, params, options);

  double alpha = 1.0;
  result.alpha_trace.push_back(alpha);
  for (int pass = 1; pass <= options.pcc_max_iter; ++pass) {
    const TerminalSolve terminal = solve_terminal_voltages(
        Complex{alpha, 0.0}, farm, result.prefault.i_d0, params,
        options.terminal_tol, options.terminal_max_iter);
    EquivalentFarm model =
        build_equivalent_farm(farm, speeds, alpha, terminal.voltages,
                              result.prefault.e0, params);
    const TimeSeries run =
        run_equivalent(model, farm, scenario, params, options);
    const double alpha_next = run.u_pcc[index_before_clear(scenario)];
    result.alpha_trace.push_back(alpha_next);
    result.simulations = pass;
    if (std::abs(alpha_next - alpha) < options.pcc_tol) {
      result.farm = std::move(model);
      result.terminal_voltages = terminal.voltages;
      result.assignments = classify_farm(speeds, terminal.voltages,
                                         result.prefault.e0, params);
      return result;
    }
    alpha = alpha_next;
  }

  std::string trace = "PCC iteration did not converge; trace:";
  char buf[32];
  for (double a : result.alpha_trace) {
    std::snprintf(buf, sizeof(buf), " %.6g", a);
    trace += buf;
  }
  throw ConvergenceError(trace,
                         std::abs(result.alpha_trace.back() -
                                  result.alpha_trace[result.alpha_trace.size() - 2]),
                         options.pcc_max_iter);
}

}  // namespace wfeq
