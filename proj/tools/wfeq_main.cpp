#include <complex>
#include <cstdio>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wfeq/classify.hpp"
#include "wfeq/errors.hpp"
#include "wfeq/pipeline.hpp"
#include "wfeq/scenario.hpp"
#include "wfeq/timeseries.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitInfeasible = 4;

std::string output_path(const wfeq::Scenario& scenario,
                        const std::string& override_path,
                        const std::string& filename) {
  if (!override_path.empty()) return override_path;
  return scenario.output_dir + "/" + filename;
}

std::string scenario_stem(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return name;
}

void print_subgroups(const std::vector<wfeq::ClusterAssignment>& assignments) {
  for (wfeq::ResponseCategory category :
       {wfeq::ResponseCategory::kRampRecovery,
        wfeq::ResponseCategory::kInstantRecovery,
        wfeq::ResponseCategory::kUnaffected}) {
    std::string line = "Subgroup " + wfeq::to_string(category) + ": ";
    bool any = false;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (assignments[i].category != category) continue;
      if (any) line += ", ";
      line += std::to_string(i + 1);
      any = true;
    }
    if (!any) line += "--";
    std::cout << line << "\n";
  }
}

std::string clusters_csv(const std::vector<wfeq::ClusterAssignment>& assignments) {
  std::string csv = "id,v_w,alpha,category\n";
  char line[128];
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.12g,%.12g,%s\n", i + 1,
                  assignments[i].v_w, assignments[i].alpha_fminus,
                  wfeq::to_string(assignments[i].category).c_str());
    csv += line;
  }
  return csv;
}

void print_trace(const std::vector<double>& trace) {
  std::cout << "PCC voltage trace:";
  for (double a : trace) std::printf(" %.6g", a);
  std::cout << "\n";
}

int cmd_classify(const std::string& scenario_path, const std::string& out_dir) {
  wfeq::Scenario scenario = wfeq::load_scenario(scenario_path);
  if (!out_dir.empty()) scenario.output_dir = out_dir;
  const wfeq::FarmTopology farm = scenario.build_topology();
  const std::vector<double> speeds = scenario.turbine_speeds();
  const wfeq::PccIterationResult result = wfeq::pcc_iteration(
      farm, speeds, scenario.fault, scenario.turbine, scenario.solver);
  print_trace(result.alpha_trace);
  print_subgroups(result.assignments);
  const std::string path = scenario.output_dir + "/clusters.csv";
  wfeq::write_file(path, clusters_csv(result.assignments));
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_boundary(const std::string& scenario_path, const std::string& out_dir,
                 double alpha_min, double alpha_max, int steps, double e) {
  wfeq::Scenario scenario = wfeq::load_scenario(scenario_path);
  if (!out_dir.empty()) scenario.output_dir = out_dir;
  if (steps < 2 || !(alpha_min <= alpha_max))
    throw wfeq::SchemaError("boundary: need alpha_min <= alpha_max and steps >= 2");
  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i)
    grid[i] = alpha_min + (alpha_max - alpha_min) * i / (steps - 1);
  const auto rows = wfeq::boundary_table(grid, e, scenario.turbine);
  const std::string path = scenario.output_dir + "/boundary.csv";
  wfeq::write_file(path, wfeq::boundary_table_csv(rows));
  std::cout << "wrote " << path << "\n";
  return 0;
}

wfeq::TimeSeries simulate_model(const wfeq::Scenario& scenario,
                                const std::string& model) {
  const wfeq::FarmTopology farm = scenario.build_topology();
  const std::vector<double> speeds = scenario.turbine_speeds();
  if (model == "detailed")
    return wfeq::run_detailed(farm, speeds, scenario.fault, scenario.turbine,
                              scenario.solver);
  if (model == "equivalent") {
    const wfeq::PccIterationResult result = wfeq::pcc_iteration(
        farm, speeds, scenario.fault, scenario.turbine, scenario.solver);
    return wfeq::run_equivalent(result.farm, farm, scenario.fault,
                                scenario.turbine, scenario.solver);
  }
  if (model == "traditional") {
    const wfeq::EquivalentFarm baseline =
        wfeq::build_traditional_farm(farm, speeds, scenario.turbine);
    return wfeq::run_equivalent(baseline, farm, scenario.fault,
                                scenario.turbine, scenario.solver);
  }
  throw wfeq::SchemaError("simulate: unknown model '" + model + "'");
}

int cmd_simulate(const std::vector<std::string>& scenario_paths,
                 const std::string& model, const std::string& out_path,
                 bool batch) {
  if (scenario_paths.size() > 1 && !out_path.empty())
    throw wfeq::SchemaError("simulate: --out is only valid with one scenario");

  auto run_one = [&](const std::string& path) {
    const wfeq::Scenario scenario = wfeq::load_scenario(path);
    const wfeq::TimeSeries series = simulate_model(scenario, model);
    const std::string file = output_path(
        scenario, scenario_paths.size() == 1 ? out_path : "",
        scenario_stem(path) + "_" + model + ".csv");
    wfeq::write_file(file, wfeq::timeseries_csv(series));
    return file;
  };

  if (batch && scenario_paths.size() > 1) {
    std::vector<std::future<std::string>> jobs;
    jobs.reserve(scenario_paths.size());
    for (const std::string& path : scenario_paths)
      jobs.push_back(std::async(std::launch::async, run_one, path));
    for (auto& job : jobs) std::cout << "wrote " << job.get() << "\n";
  } else {
    for (const std::string& path : scenario_paths)
      std::cout << "wrote " << run_one(path) << "\n";
  }
  return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path,
                std::vector<double> window, const std::string& out_path) {
  const wfeq::TimeSeries a = wfeq::timeseries_from_csv(wfeq::read_file(a_path));
  const wfeq::TimeSeries b = wfeq::timeseries_from_csv(wfeq::read_file(b_path));
  if (a.size() == 0) throw wfeq::SchemaError("compare: empty reference series");
  double w0 = a.t.front(), w1 = a.t.back();
  if (window.size() == 2) {
    w0 = window[0];
    w1 = window[1];
  } else if (!window.empty()) {
    throw wfeq::SchemaError("compare: --window takes exactly two times");
  }
  const wfeq::CompareMetrics metrics = wfeq::compare(a, b, w0, w1);
  const std::string doc = wfeq::metrics_json(metrics, w0, w1);
  std::cout << doc << "\n";
  if (!out_path.empty()) {
    wfeq::write_file(out_path, doc + "\n");
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_equivalize(const std::string& scenario_path, const std::string& out_path) {
  const wfeq::Scenario scenario = wfeq::load_scenario(scenario_path);
  const wfeq::FarmTopology farm = scenario.build_topology();
  const std::vector<double> speeds = scenario.turbine_speeds();
  const wfeq::PccIterationResult result = wfeq::pcc_iteration(
      farm, speeds, scenario.fault, scenario.turbine, scenario.solver);
  print_trace(result.alpha_trace);
  const std::string path =
      output_path(scenario, out_path, "equivalent_farm.json");
  wfeq::write_file(path,
                   wfeq::equivalent_farm_json(result.farm, result.alpha_trace));
  std::cout << "wrote " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-severity-aware dynamic equivalents of full-converter wind farms"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, out_path, model = "detailed";
  std::vector<std::string> scenario_paths;
  std::vector<double> window;
  std::string a_path, b_path;
  double alpha_min = 0.2, alpha_max = 0.9, boundary_e = 1.0;
  int steps = 71;
  bool batch = false;

  CLI::App* classify = app.add_subcommand(
      "classify", "Cluster every turbine by its fault response class");
  classify->add_option("--scenario", scenario_path, "scenario JSON")->required();
  classify->add_option("--out-dir", out_dir, "override the output directory");

  CLI::App* boundary = app.add_subcommand(
      "boundary", "Tabulate the classification boundary wind speeds");
  boundary->add_option("--scenario", scenario_path, "scenario JSON")->required();
  boundary->add_option("--out-dir", out_dir, "override the output directory");
  boundary->add_option("--alpha-min", alpha_min, "lowest dip voltage");
  boundary->add_option("--alpha-max", alpha_max, "highest dip voltage");
  boundary->add_option("--steps", steps, "grid points");
  boundary->add_option("--e", boundary_e, "pre-fault terminal voltage");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the fault scenario and write the PCC time series");
  simulate->add_option("scenarios", scenario_paths, "scenario JSON file(s)")
      ->required();
  simulate->add_option("--model", model, "detailed | equivalent | traditional");
  simulate->add_option("--out", out_path, "output CSV (single scenario only)");
  simulate->add_flag("--batch", batch, "run multiple scenarios concurrently");

  CLI::App* comp = app.add_subcommand(
      "compare", "Error metrics between two simulation CSVs");
  comp->add_option("--a", a_path, "reference CSV")->required();
  comp->add_option("--b", b_path, "candidate CSV")->required();
  comp->add_option("--window", window, "start and end time")->expected(2);
  comp->add_option("--out", out_path, "metrics JSON file");

  CLI::App* equivalize = app.add_subcommand(
      "equivalize", "Build the equivalent farm and write it as JSON");
  equivalize->add_option("--scenario", scenario_path, "scenario JSON")->required();
  equivalize->add_option("--out", out_path, "output JSON file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return cmd_classify(scenario_path, out_dir);
    if (boundary->parsed())
      return cmd_boundary(scenario_path, out_dir, alpha_min, alpha_max, steps,
                          boundary_e);
    if (simulate->parsed())
      return cmd_simulate(scenario_paths, model, out_path, batch);
    if (comp->parsed()) return cmd_compare(a_path, b_path, window, out_path);
    if (equivalize->parsed()) return cmd_equivalize(scenario_path, out_path);
  } catch (const wfeq::EquivalenceError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInfeasible;
  } catch (const wfeq::ConvergenceError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitNoConvergence;
  } catch (const wfeq::SchemaError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitSchema;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
