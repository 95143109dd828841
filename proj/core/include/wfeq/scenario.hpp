#ifndef WFEQ_SCENARIO_HPP_
#define WFEQ_SCENARIO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wfeq/aggregate.hpp"
#include "wfeq/network.hpp"
#include "wfeq/pipeline.hpp"
#include "wfeq/simulate.hpp"
#include "wfeq/wake.hpp"

namespace wfeq {

/// Regular farm layout: identical radial feeders with evenly spaced
/// turbines, line constants given per km and converted to per-unit on the
/// machine base.
struct RegularFarmSpec {
  int n_feeders = 4;
  int turbines_per_feeder = 6;
  double pcc_distance_km = 2.0;
  double turbine_spacing_km = 0.5;
  double line_r_ohm_per_km = 0.08;
  double line_x_ohm_per_km = 0.16;
  double base_mva = 1.5;
  double base_kv = 10.5;

  friend bool operator==(const RegularFarmSpec&, const RegularFarmSpec&) = default;
};

/// Hand-written feeders, impedances already in per-unit.
struct ExplicitFarmSpec {
  std::vector<Feeder> feeders;

  friend bool operator==(const ExplicitFarmSpec&, const ExplicitFarmSpec&) = default;
};

struct TopologySpec {
  std::variant<RegularFarmSpec, ExplicitFarmSpec> layout;
  Complex pcc_transformer_z{0.0, 0.0};
  Complex grid_thevenin_z{0.0, 0.0};

  friend bool operator==(const TopologySpec&, const TopologySpec&) = default;
};

/// Wind-field description: either fully explicit per-turbine speeds, or
/// per-feeder inflow speeds, or seeded uniform draws; wake decay is applied
/// along each feeder in the latter two cases.
struct WindSpec {
  WakeParams wake;
  std::uint64_t seed = 1;
  double v_w0_min = 9.0;
  double v_w0_max = 11.0;
  std::optional<std::vector<double>> feeder_inflow;
  std::optional<std::vector<std::vector<double>>> speeds;

  friend bool operator==(const WindSpec&, const WindSpec&) = default;
};

/// A complete study description, loadable from and savable to JSON.
struct Scenario {
  TurbineParams turbine;
  WindSpec wind;
  TopologySpec topology;
  FaultScenario fault;  ///< grid_thevenin_z mirrors topology's value
  SolverOptions solver;
  std::string output_dir = "out";

  FarmTopology build_topology() const;
  /// Per-turbine operating wind speeds in farm order.
  std::vector<double> turbine_speeds() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Strict JSON ingestion: every section validated, unknown keys rejected.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Equivalent-farm document with all unit fields; member ids are 1-based.
std::string equivalent_farm_json(const EquivalentFarm& farm,
                                 std::span<const double> alpha_trace = {});
EquivalentFarm equivalent_farm_from_json(const std::string& text);

/// Write a whole file, creating parent directories as needed.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace wfeq

#endif  // WFEQ_SCENARIO_HPP_
