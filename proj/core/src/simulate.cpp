#include "wfeq/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "wfeq/errors.hpp"

namespace wfeq {

void FaultScenario::validate() const {
  if (!(t_fault >= 0.0) || !(t_fault < t_clear) || !(t_clear <= t_end))
    throw SchemaError("fault: need 0 <= t_fault < t_clear <= t_end");
  if (!(dt > 0.0)) throw SchemaError("fault: dt must be positive");
  if (!(e_fault <= e_prefault))
    throw SchemaError("fault: dip level above the pre-fault source");
  if (!(e_prefault > 0.0)) throw SchemaError("fault: source must be positive");
}

std::size_t index_before_clear(const FaultScenario& scenario) {
  const auto k_clear =
      static_cast<std::size_t>(std::llround(scenario.t_clear / scenario.dt));
  return k_clear > 0 ? k_clear - 1 : 0;
}

namespace {

struct FeederLayout {
  std::vector<IncidenceMatrix> incidence;
  std::vector<std::size_t> base;  // first global unit index per feeder
  std::size_t units = 0;
};

FeederLayout make_layout(const FarmTopology& farm) {
  FeederLayout layout;
  layout.incidence.reserve(farm.feeders.size());
  layout.base.reserve(farm.feeders.size());
  for (const Feeder& feeder : farm.feeders) {
    layout.base.push_back(layout.units);
    layout.incidence.push_back(build_incidence(feeder));
    layout.units += feeder.turbine_nodes.size();
  }
  return layout;
}

Complex floored(Complex u) {
  const double mag = std::abs(u);
  if (mag >= kVoltageFloor) return u;
  if (mag == 0.0) return {kVoltageFloor, 0.0};
  return u * (kVoltageFloor / mag);
}

// One relaxation pass: currents from the present voltages, the PCC from the
// source, then every feeder from the PCC. Returns the max voltage change.
template <typename CurrentOf>
double relax_once(const FarmTopology& farm, const FeederLayout& layout,
                  double e_source, Complex z_coupling,
                  CurrentOf&& current_of, std::vector<Complex>& u,
                  Complex& u_pcc, std::vector<Complex>& injections) {
  Complex total{};
  for (std::size_t g = 0; g < u.size(); ++g) {
    injections[g] = current_of(g, u[g]);
    total += injections[g];
  }
  const Complex u_pcc_new = Complex{e_source, 0.0} + z_coupling * total;
  double residual = std::abs(u_pcc_new - u_pcc);
  u_pcc = u_pcc_new;
  for (std::size_t f = 0; f < farm.feeders.size(); ++f) {
    const std::size_t base = layout.base[f];
    const std::size_t n = farm.feeders[f].turbine_nodes.size();
    const std::vector<Complex> u_new =
        propagate(u_pcc, farm.feeders[f], layout.incidence[f],
                  {injections.data() + base, n});
    for (std::size_t j = 0; j < n; ++j) {
      residual = std::max(residual, std::abs(u_new[j] - u[base + j]));
      u[base + j] = u_new[j];
    }
  }
  return residual;
}

template <typename CurrentOf>
void relax_to_tolerance(const FarmTopology& farm, const FeederLayout& layout,
                        double e_source, Complex z_coupling,
                        CurrentOf&& current_of, std::vector<Complex>& u,
                        Complex& u_pcc, std::vector<Complex>& injections,
                        double tol, int max_iter, const char* what) {
  for (int iter = 0; iter < max_iter; ++iter) {
    const double residual = relax_once(farm, layout, e_source, z_coupling,
                                       current_of, u, u_pcc, injections);
    if (residual < tol) return;
  }
  throw ConvergenceError(std::string(what) + ": network solve did not converge",
                         0.0, max_iter);
}

}  // namespace

NetworkSnapshot solve_constant_power_network(const FarmTopology& farm,
                                             std::span<const double> p0,
                                             double e_source, Complex grid_z,
                                             double tol, int max_iter) {
  if (p0.size() != farm.turbine_count())
    throw std::invalid_argument("solve_constant_power_network: one power per node");
  const FeederLayout layout = make_layout(farm);
  const Complex z_coupling = farm.pcc_transformer_z + grid_z;
  NetworkSnapshot snap;
  snap.u_pcc = {e_source, 0.0};
  snap.voltages.assign(layout.units, snap.u_pcc);
  std::vector<Complex> injections(layout.units);
  relax_to_tolerance(
      farm, layout, e_source, z_coupling,
      [&](std::size_t g, Complex u) { return std::conj(p0[g] / floored(u)); },
      snap.voltages, snap.u_pcc, injections, tol, max_iter,
      "pre-fault network");
  return snap;
}

TimeSeries run_simulation(const FarmTopology& farm,
                          std::span<const SimUnit> units,
                          const FaultScenario& scenario,
                          const TurbineParams& params,
                          const SimOptions& options) {
  scenario.validate();
  params.validate();
  if (units.size() != farm.turbine_count())
    throw std::invalid_argument("run_simulation: one unit per turbine node required");
  const auto started = std::chrono::steady_clock::now();

  const FeederLayout layout = make_layout(farm);
  const Complex z_coupling =
      farm.pcc_transformer_z + scenario.grid_thevenin_z;
  const std::size_t n = units.size();

  // pre-fault operating point
  std::vector<double> p0_total(n), p0_machine(n);
  for (std::size_t g = 0; g < n; ++g) {
    p0_machine[g] = power_curve(units[g].speed, params);
    p0_total[g] = units[g].scale * p0_machine[g];
  }
  NetworkSnapshot snap =
      solve_constant_power_network(farm, p0_total, scenario.e_prefault,
                                   scenario.grid_thevenin_z, options.network_tol,
                                   options.network_max_iter);

  std::vector<CurrentState> state(n);
  for (std::size_t g = 0; g < n; ++g) {
    const double e0 = std::abs(snap.voltages[g]);
    const double i_d0 = p0_machine[g] / std::max(e0, kVoltageFloor);
    state[g] = CurrentState{i_d0, 0.0, i_d0, e0};
  }

  std::vector<Complex> u = snap.voltages;
  Complex u_pcc = snap.u_pcc;
  std::vector<Complex> injections(n);

  const auto n_steps =
      static_cast<std::size_t>(std::llround(scenario.t_end / scenario.dt));
  TimeSeries series;
  series.t.reserve(n_steps + 1);
  series.p_pcc.reserve(n_steps + 1);
  series.q_pcc.reserve(n_steps + 1);
  series.u_pcc.reserve(n_steps + 1);

  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * scenario.dt;
    const double e_source = scenario.source_at(t);

    for (std::size_t g = 0; g < n; ++g) {
      const double rate =
          (t >= scenario.t_clear && !units[g].schedule.empty())
              ? schedule_rate(units[g].schedule, t - scenario.t_clear,
                              params.k_ramp)
              : params.k_ramp;
      state[g] = step_current(state[g], std::abs(u[g]), scenario.dt, params, rate);
    }

    try {
      relax_to_tolerance(
          farm, layout, e_source, z_coupling,
          [&](std::size_t g, Complex ug) {
            return units[g].scale *
                   phased_current(ug, state[g].i_d, state[g].i_q);
          },
          u, u_pcc, injections, options.network_tol, options.network_max_iter,
          "simulation");
    } catch (const ConvergenceError& err) {
      throw ConvergenceError(
          "simulation step " + std::to_string(k) + ": " + err.what(),
          err.residual, err.iterations);
    }

    Complex total{};
    for (const Complex& inj : injections) total += inj;
    const Complex s_pcc = u_pcc * std::conj(total);
    series.t.push_back(t);
    series.p_pcc.push_back(s_pcc.real());
    series.q_pcc.push_back(s_pcc.imag());
    series.u_pcc.push_back(std::abs(u_pcc));
    if (options.record_node_voltages) {
      std::vector<double> mags(n);
      for (std::size_t g = 0; g < n; ++g) mags[g] = std::abs(u[g]);
      series.node_u.push_back(std::move(mags));
    }
    if (options.record_unit_powers) {
      std::vector<double> powers(n);
      for (std::size_t g = 0; g < n; ++g)
        powers[g] = (u[g] * std::conj(injections[g])).real();
      series.unit_p.push_back(std::move(powers));
    }
  }

  series.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return series;
}

}  // namespace wfeq
