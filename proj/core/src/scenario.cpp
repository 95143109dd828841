#include "wfeq/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "wfeq/errors.hpp"

namespace wfeq {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const char* section,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw SchemaError(std::string("scenario: section '") + section +
                      "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw SchemaError(std::string("scenario: unknown key '") + it.key() +
                        "' in section '" + section + "'");
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("scenario: bad value for '") + key + "'");
  }
}

Complex parse_complex(const json& obj, const char* section) {
  check_keys(obj, section, {"r", "x"});
  return {get_or(obj, "r", 0.0), get_or(obj, "x", 0.0)};
}

json dump_complex(Complex z) {
  return json{{"r", z.real()}, {"x", z.imag()}};
}

TurbineParams parse_turbine(const json& obj) {
  check_keys(obj, "turbine",
             {"rated_power", "i_n", "i_max", "k_ramp", "v_cutin", "v_rated",
              "lvrt_gain", "lvrt_lower", "lvrt_upper"});
  TurbineParams p;
  p.rated_power = get_or(obj, "rated_power", p.rated_power);
  p.i_n = get_or(obj, "i_n", p.i_n);
  p.i_max = get_or(obj, "i_max", p.i_max);
  p.k_ramp = get_or(obj, "k_ramp", p.k_ramp);
  p.v_cutin = get_or(obj, "v_cutin", p.v_cutin);
  p.v_rated = get_or(obj, "v_rated", p.v_rated);
  p.lvrt_gain = get_or(obj, "lvrt_gain", p.lvrt_gain);
  p.lvrt_lower = get_or(obj, "lvrt_lower", p.lvrt_lower);
  p.lvrt_upper = get_or(obj, "lvrt_upper", p.lvrt_upper);
  return p;
}

WindSpec parse_wind(const json& obj, double default_spacing_m) {
  check_keys(obj, "wake",
             {"c_t", "k_decay", "rotor_radius_m", "spacing_m", "seed",
              "v_w0_min", "v_w0_max", "feeder_inflow", "speeds"});
  WindSpec w;
  w.wake.c_t = get_or(obj, "c_t", w.wake.c_t);
  w.wake.k_decay = get_or(obj, "k_decay", w.wake.k_decay);
  w.wake.rotor_radius = get_or(obj, "rotor_radius_m", w.wake.rotor_radius);
  w.wake.spacing = get_or(obj, "spacing_m", default_spacing_m);
  w.seed = get_or<std::uint64_t>(obj, "seed", w.seed);
  w.v_w0_min = get_or(obj, "v_w0_min", w.v_w0_min);
  w.v_w0_max = get_or(obj, "v_w0_max", w.v_w0_max);
  if (obj.contains("feeder_inflow"))
    w.feeder_inflow = get_or<std::vector<double>>(obj, "feeder_inflow", {});
  if (obj.contains("speeds"))
    w.speeds = get_or<std::vector<std::vector<double>>>(obj, "speeds", {});
  return w;
}

TopologySpec parse_topology(const json& obj) {
  check_keys(obj, "topology",
             {"pcc_transformer", "grid_thevenin", "grid", "feeders"});
  TopologySpec topo;
  if (obj.contains("pcc_transformer"))
    topo.pcc_transformer_z = parse_complex(obj.at("pcc_transformer"), "pcc_transformer");
  if (obj.contains("grid_thevenin"))
    topo.grid_thevenin_z = parse_complex(obj.at("grid_thevenin"), "grid_thevenin");
  if (obj.contains("grid") && obj.contains("feeders"))
    throw SchemaError("scenario: topology needs either 'grid' or 'feeders', not both");
  if (obj.contains("feeders")) {
    ExplicitFarmSpec spec;
    for (const json& jf : obj.at("feeders")) {
      check_keys(jf, "feeder", {"branches", "turbines"});
      Feeder feeder;
      for (const json& jb : jf.at("branches")) {
        check_keys(jb, "branch", {"from", "to", "r", "x"});
        Branch branch;
        branch.from = get_or(jb, "from", 0);
        branch.to = get_or(jb, "to", 0);
        branch.z = {get_or(jb, "r", 0.0), get_or(jb, "x", 0.0)};
        feeder.branches.push_back(branch);
      }
      feeder.turbine_nodes = get_or<std::vector<int>>(jf, "turbines", {});
      spec.feeders.push_back(std::move(feeder));
    }
    topo.layout = std::move(spec);
  } else {
    RegularFarmSpec spec;
    if (obj.contains("grid")) {
      const json& jg = obj.at("grid");
      check_keys(jg, "grid",
                 {"n_feeders", "turbines_per_feeder", "pcc_distance_km",
                  "turbine_spacing_km", "line_r_ohm_per_km",
                  "line_x_ohm_per_km", "base_mva", "base_kv"});
      spec.n_feeders = get_or(jg, "n_feeders", spec.n_feeders);
      spec.turbines_per_feeder =
          get_or(jg, "turbines_per_feeder", spec.turbines_per_feeder);
      spec.pcc_distance_km = get_or(jg, "pcc_distance_km", spec.pcc_distance_km);
      spec.turbine_spacing_km =
          get_or(jg, "turbine_spacing_km", spec.turbine_spacing_km);
      spec.line_r_ohm_per_km =
          get_or(jg, "line_r_ohm_per_km", spec.line_r_ohm_per_km);
      spec.line_x_ohm_per_km =
          get_or(jg, "line_x_ohm_per_km", spec.line_x_ohm_per_km);
      spec.base_mva = get_or(jg, "base_mva", spec.base_mva);
      spec.base_kv = get_or(jg, "base_kv", spec.base_kv);
    }
    topo.layout = spec;
  }
  return topo;
}

FaultScenario parse_fault(const json& obj) {
  check_keys(obj, "fault",
             {"e_prefault", "e_fault", "t_fault", "t_clear", "t_end", "dt"});
  FaultScenario f;
  f.e_prefault = get_or(obj, "e_prefault", f.e_prefault);
  f.e_fault = get_or(obj, "e_fault", f.e_fault);
  f.t_fault = get_or(obj, "t_fault", f.t_fault);
  f.t_clear = get_or(obj, "t_clear", f.t_clear);
  f.t_end = get_or(obj, "t_end", f.t_end);
  f.dt = get_or(obj, "dt", f.dt);
  return f;
}

SolverOptions parse_solver(const json& obj) {
  check_keys(obj, "solver",
             {"terminal_tol", "terminal_max_iter", "pcc_tol", "pcc_max_iter",
              "network_tol", "network_max_iter",
              "assume_unity_prefault_voltage"});
  SolverOptions s;
  s.terminal_tol = get_or(obj, "terminal_tol", s.terminal_tol);
  s.terminal_max_iter = get_or(obj, "terminal_max_iter", s.terminal_max_iter);
  s.pcc_tol = get_or(obj, "pcc_tol", s.pcc_tol);
  s.pcc_max_iter = get_or(obj, "pcc_max_iter", s.pcc_max_iter);
  s.network_tol = get_or(obj, "network_tol", s.network_tol);
  s.network_max_iter = get_or(obj, "network_max_iter", s.network_max_iter);
  s.assume_unity_prefault_voltage =
      get_or(obj, "assume_unity_prefault_voltage", false);
  return s;
}

}  // namespace

FarmTopology Scenario::build_topology() const {
  FarmTopology farm;
  farm.pcc_transformer_z = topology.pcc_transformer_z;
  farm.grid_thevenin_z = topology.grid_thevenin_z;
  if (const auto* grid = std::get_if<RegularFarmSpec>(&topology.layout)) {
    if (grid->n_feeders < 1 || grid->turbines_per_feeder < 1)
      throw SchemaError("topology: grid needs at least one feeder and turbine");
    if (!(grid->base_mva > 0.0) || !(grid->base_kv > 0.0))
      throw SchemaError("topology: base power and voltage must be positive");
    const double z_base = grid->base_kv * grid->base_kv / grid->base_mva;
    const Complex z_km{grid->line_r_ohm_per_km / z_base,
                       grid->line_x_ohm_per_km / z_base};
    for (int f = 0; f < grid->n_feeders; ++f) {
      Feeder feeder;
      feeder.branches.push_back(Branch{0, 1, z_km * grid->pcc_distance_km});
      for (int i = 1; i < grid->turbines_per_feeder; ++i)
        feeder.branches.push_back(
            Branch{i, i + 1, z_km * grid->turbine_spacing_km});
      for (int i = 1; i <= grid->turbines_per_feeder; ++i)
        feeder.turbine_nodes.push_back(i);
      farm.feeders.push_back(std::move(feeder));
    }
  } else {
    farm.feeders = std::get<ExplicitFarmSpec>(topology.layout).feeders;
    if (farm.feeders.empty())
      throw SchemaError("topology: no feeders given");
  }
  return farm;
}

std::vector<double> Scenario::turbine_speeds() const {
  const FarmTopology farm = build_topology();
  std::vector<std::size_t> counts;
  counts.reserve(farm.feeders.size());
  for (const Feeder& feeder : farm.feeders)
    counts.push_back(feeder.turbine_nodes.size());

  std::vector<double> flat;
  if (wind.speeds) {
    if (wind.speeds->size() != counts.size())
      throw SchemaError("wake: explicit speeds need one list per feeder");
    for (std::size_t f = 0; f < counts.size(); ++f) {
      if ((*wind.speeds)[f].size() != counts[f])
        throw SchemaError("wake: explicit speeds shape mismatch on feeder " +
                          std::to_string(f + 1));
      flat.insert(flat.end(), (*wind.speeds)[f].begin(),
                  (*wind.speeds)[f].end());
    }
    return flat;
  }

  std::vector<double> inflow;
  if (wind.feeder_inflow) {
    if (wind.feeder_inflow->size() != counts.size())
      throw SchemaError("wake: feeder_inflow needs one speed per feeder");
    inflow = *wind.feeder_inflow;
  } else {
    if (!(wind.v_w0_min <= wind.v_w0_max))
      throw SchemaError("wake: v_w0_min must not exceed v_w0_max");
    inflow = draw_feeder_inflows(wind.seed, counts.size(), wind.v_w0_min,
                                 wind.v_w0_max);
  }
  for (std::size_t f = 0; f < counts.size(); ++f) {
    const std::vector<double> speeds =
        feeder_speeds(inflow[f], counts[f], wind.wake);
    flat.insert(flat.end(), speeds.begin(), speeds.end());
  }
  return flat;
}

Scenario scenario_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& err) {
    throw SchemaError(std::string("scenario: invalid JSON: ") + err.what());
  }
  check_keys(doc, "scenario",
             {"turbine", "wake", "topology", "fault", "solver", "outputs"});

  Scenario scenario;
  scenario.topology = doc.contains("topology")
                          ? parse_topology(doc.at("topology"))
                          : TopologySpec{RegularFarmSpec{}, {}, {}};

  double default_spacing_m = 500.0;
  if (const auto* grid = std::get_if<RegularFarmSpec>(&scenario.topology.layout))
    default_spacing_m = grid->turbine_spacing_km * 1000.0;

  if (doc.contains("turbine")) scenario.turbine = parse_turbine(doc.at("turbine"));
  scenario.wind = doc.contains("wake")
                      ? parse_wind(doc.at("wake"), default_spacing_m)
                      : WindSpec{WakeParams{0.2, 0.04, 40.0, default_spacing_m},
                                 1, 9.0, 11.0, {}, {}};
  if (!doc.contains("wake")) scenario.wind.wake.spacing = default_spacing_m;
  if (doc.contains("fault")) scenario.fault = parse_fault(doc.at("fault"));
  scenario.fault.grid_thevenin_z = scenario.topology.grid_thevenin_z;
  if (doc.contains("solver")) scenario.solver = parse_solver(doc.at("solver"));
  if (doc.contains("outputs")) {
    check_keys(doc.at("outputs"), "outputs", {"dir"});
    scenario.output_dir = get_or<std::string>(doc.at("outputs"), "dir", "out");
  }

  // fail fast on anything inconsistent before computation starts
  scenario.turbine.validate();
  scenario.wind.wake.validate();
  scenario.fault.validate();
  try {
    (void)scenario.turbine_speeds();
  } catch (const std::invalid_argument& err) {
    throw SchemaError(std::string("scenario: ") + err.what());
  }
  return scenario;
}

std::string scenario_to_json(const Scenario& scenario) {
  json doc;
  doc["turbine"] = {{"rated_power", scenario.turbine.rated_power},
                    {"i_n", scenario.turbine.i_n},
                    {"i_max", scenario.turbine.i_max},
                    {"k_ramp", scenario.turbine.k_ramp},
                    {"v_cutin", scenario.turbine.v_cutin},
                    {"v_rated", scenario.turbine.v_rated},
                    {"lvrt_gain", scenario.turbine.lvrt_gain},
                    {"lvrt_lower", scenario.turbine.lvrt_lower},
                    {"lvrt_upper", scenario.turbine.lvrt_upper}};
  json wake = {{"c_t", scenario.wind.wake.c_t},
               {"k_decay", scenario.wind.wake.k_decay},
               {"rotor_radius_m", scenario.wind.wake.rotor_radius},
               {"spacing_m", scenario.wind.wake.spacing},
               {"seed", scenario.wind.seed},
               {"v_w0_min", scenario.wind.v_w0_min},
               {"v_w0_max", scenario.wind.v_w0_max}};
  if (scenario.wind.feeder_inflow) wake["feeder_inflow"] = *scenario.wind.feeder_inflow;
  if (scenario.wind.speeds) wake["speeds"] = *scenario.wind.speeds;
  doc["wake"] = std::move(wake);

  json topo;
  topo["pcc_transformer"] = dump_complex(scenario.topology.pcc_transformer_z);
  topo["grid_thevenin"] = dump_complex(scenario.topology.grid_thevenin_z);
  if (const auto* grid = std::get_if<RegularFarmSpec>(&scenario.topology.layout)) {
    topo["grid"] = {{"n_feeders", grid->n_feeders},
                    {"turbines_per_feeder", grid->turbines_per_feeder},
                    {"pcc_distance_km", grid->pcc_distance_km},
                    {"turbine_spacing_km", grid->turbine_spacing_km},
                    {"line_r_ohm_per_km", grid->line_r_ohm_per_km},
                    {"line_x_ohm_per_km", grid->line_x_ohm_per_km},
                    {"base_mva", grid->base_mva},
                    {"base_kv", grid->base_kv}};
  } else {
    json feeders = json::array();
    for (const Feeder& feeder :
         std::get<ExplicitFarmSpec>(scenario.topology.layout).feeders) {
      json branches = json::array();
      for (const Branch& branch : feeder.branches)
        branches.push_back({{"from", branch.from},
                            {"to", branch.to},
                            {"r", branch.z.real()},
                            {"x", branch.z.imag()}});
      feeders.push_back(
          {{"branches", std::move(branches)}, {"turbines", feeder.turbine_nodes}});
    }
    topo["feeders"] = std::move(feeders);
  }
  doc["topology"] = std::move(topo);

  doc["fault"] = {{"e_prefault", scenario.fault.e_prefault},
                  {"e_fault", scenario.fault.e_fault},
                  {"t_fault", scenario.fault.t_fault},
                  {"t_clear", scenario.fault.t_clear},
                  {"t_end", scenario.fault.t_end},
                  {"dt", scenario.fault.dt}};
  doc["solver"] = {
      {"terminal_tol", scenario.solver.terminal_tol},
      {"terminal_max_iter", scenario.solver.terminal_max_iter},
      {"pcc_tol", scenario.solver.pcc_tol},
      {"pcc_max_iter", scenario.solver.pcc_max_iter},
      {"network_tol", scenario.solver.network_tol},
      {"network_max_iter", scenario.solver.network_max_iter},
      {"assume_unity_prefault_voltage",
       scenario.solver.assume_unity_prefault_voltage}};
  doc["outputs"] = {{"dir", scenario.output_dir}};
  return doc.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
  return scenario_from_json(read_file(path));
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  write_file(path, scenario_to_json(scenario));
}

std::string equivalent_farm_json(const EquivalentFarm& farm,
                                 std::span<const double> alpha_trace) {
  json doc;
  doc["pcc_voltage"] = farm.pcc_voltage_used;
  if (!alpha_trace.empty())
    doc["alpha_trace"] = std::vector<double>(alpha_trace.begin(), alpha_trace.end());
  json units = json::array();
  for (const EquivalentUnit& unit : farm.units) {
    json schedule = json::array();
    for (const RampSegment& seg : unit.ramp_schedule)
      schedule.push_back({seg.t_start, seg.rate});
    std::vector<int> members_1based(unit.members.size());
    for (std::size_t i = 0; i < unit.members.size(); ++i)
      members_1based[i] = unit.members[i] + 1;
    units.push_back({{"category", to_string(unit.category)},
                     {"n_machines", unit.n_machines},
                     {"v_eq", unit.v_eq},
                     {"ramp_schedule", std::move(schedule)},
                     {"line_r", unit.line_r},
                     {"line_x", unit.line_x},
                     {"q_equ", unit.q_equ},
                     {"alpha_equ", unit.alpha_equ},
                     {"p_equ", unit.p_equ},
                     {"members", std::move(members_1based)}});
  }
  doc["units"] = std::move(units);
  return doc.dump(2) + "\n";
}

EquivalentFarm equivalent_farm_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& err) {
    throw SchemaError(std::string("equivalent farm: invalid JSON: ") + err.what());
  }
  check_keys(doc, "equivalent_farm", {"pcc_voltage", "alpha_trace", "units"});
  EquivalentFarm farm;
  farm.pcc_voltage_used = get_or(doc, "pcc_voltage", 1.0);
  for (const json& ju : doc.at("units")) {
    check_keys(ju, "unit",
               {"category", "n_machines", "v_eq", "ramp_schedule", "line_r",
                "line_x", "q_equ", "alpha_equ", "p_equ", "members"});
    EquivalentUnit unit;
    unit.category = category_from_string(get_or<std::string>(ju, "category", "III"));
    unit.n_machines = get_or(ju, "n_machines", 0);
    unit.v_eq = get_or(ju, "v_eq", 0.0);
    unit.line_r = get_or(ju, "line_r", 0.0);
    unit.line_x = get_or(ju, "line_x", 0.0);
    unit.q_equ = get_or(ju, "q_equ", 0.0);
    unit.alpha_equ = get_or(ju, "alpha_equ", 0.0);
    unit.p_equ = get_or(ju, "p_equ", 0.0);
    if (ju.contains("ramp_schedule"))
      for (const json& js : ju.at("ramp_schedule"))
        unit.ramp_schedule.push_back({js.at(0).get<double>(), js.at(1).get<double>()});
    if (ju.contains("members"))
      for (int id : ju.at("members").get<std::vector<int>>())
        unit.members.push_back(id - 1);
    farm.units.push_back(std::move(unit));
  }
  return farm;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace wfeq
