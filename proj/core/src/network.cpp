#include "wfeq/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>

#include "wfeq/errors.hpp"

namespace wfeq {

std::size_t FarmTopology::turbine_count() const {
  std::size_t n = 0;
  for (const Feeder& feeder : feeders) n += feeder.turbine_nodes.size();
  return n;
}

IncidenceMatrix::IncidenceMatrix(std::size_t branches, std::vector<int> node_ids)
    : branches_(branches),
      node_ids_(std::move(node_ids)),
      mark_(branches_ * node_ids_.size(), 0) {}

namespace {

// parent branch index per node; root (0) is absent from the map
std::unordered_map<int, std::size_t> parent_branches(const Feeder& feeder) {
  std::unordered_map<int, std::size_t> parent;
  parent.reserve(feeder.branches.size());
  for (std::size_t b = 0; b < feeder.branches.size(); ++b) {
    const Branch& branch = feeder.branches[b];
    if (branch.to == 0)
      throw TopologyError("feeder: the root node cannot be a branch target");
    if (branch.z.real() < 0.0)
      throw TopologyError("feeder: branch resistance must be non-negative");
    if (!parent.emplace(branch.to, b).second)
      throw TopologyError("feeder: node " + std::to_string(branch.to) +
                          " has two parent branches");
  }
  return parent;
}

// branches on the root path of `node`, walking child -> parent
template <typename OnBranch>
void walk_root_path(const Feeder& feeder,
                    const std::unordered_map<int, std::size_t>& parent,
                    int node, OnBranch&& on_branch) {
  std::size_t hops = 0;
  int at = node;
  while (at != 0) {
    auto it = parent.find(at);
    if (it == parent.end())
      throw TopologyError("feeder: node " + std::to_string(at) +
                          " is not connected to the root");
    on_branch(it->second);
    at = feeder.branches[it->second].from;
    if (++hops > feeder.branches.size())
      throw TopologyError("feeder: cycle detected at node " +
                          std::to_string(node));
  }
}

}  // namespace

IncidenceMatrix build_incidence(const Feeder& feeder) {
  const auto parent = parent_branches(feeder);
  // every branch must hang off the root; catches cycles and islands
  for (const Branch& branch : feeder.branches)
    walk_root_path(feeder, parent, branch.from, [](std::size_t) {});
  IncidenceMatrix inc(feeder.branches.size(), feeder.turbine_nodes);
  for (std::size_t col = 0; col < feeder.turbine_nodes.size(); ++col) {
    walk_root_path(feeder, parent, feeder.turbine_nodes[col],
                   [&](std::size_t b) { inc.set(b, col); });
  }
  return inc;
}

Complex phased_current(Complex u, double i_d, double i_q) {
  const double mag = std::abs(u);
  const Complex phase = mag > 0.0 ? u / mag : Complex{1.0, 0.0};
  return Complex{i_d, -i_q} * phase;
}

Complex injection_current(Complex u, double i_d0, const TurbineParams& params) {
  const double mag = std::abs(u);
  const double u_div = std::max(mag, kVoltageFloor);
  const double i_d = std::min(i_d0 / u_div, id_max(mag, params));
  return phased_current(u, i_d, iq_ref(mag, params));
}

std::vector<Complex> propagate(Complex u_pcc, const Feeder& feeder,
                               const IncidenceMatrix& inc,
                               std::span<const Complex> injections) {
  const std::size_t cols = inc.node_count();
  std::vector<Complex> branch_current(inc.branch_count(), Complex{});
  for (std::size_t b = 0; b < inc.branch_count(); ++b)
    for (std::size_t j = 0; j < cols; ++j)
      if (inc.on_path(b, j)) branch_current[b] += injections[j];

  std::vector<Complex> u(cols, u_pcc);
  for (std::size_t b = 0; b < inc.branch_count(); ++b) {
    const Complex drop = feeder.branches[b].z * branch_current[b];
    for (std::size_t j = 0; j < cols; ++j)
      if (inc.on_path(b, j)) u[j] += drop;
  }
  return u;
}

std::vector<Complex> sweep(Complex u_pcc, std::span<const Complex> u_prev,
                           const Feeder& feeder, const IncidenceMatrix& inc,
                           std::span<const double> i_d0,
                           const TurbineParams& params) {
  std::vector<Complex> injections(u_prev.size());
  for (std::size_t j = 0; j < u_prev.size(); ++j)
    injections[j] = injection_current(u_prev[j], i_d0[j], params);
  return propagate(u_pcc, feeder, inc, injections);
}

TerminalSolve solve_farm_voltages(Complex u_pcc, const FarmTopology& farm,
                                  const InjectionModel& injection, double tol,
                                  int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_farm_voltages: tol must be positive");
  TerminalSolve result;
  result.voltages.reserve(farm.turbine_count());

  std::size_t global_base = 0;
  for (const Feeder& feeder : farm.feeders) {
    const IncidenceMatrix inc = build_incidence(feeder);
    const std::size_t n = feeder.turbine_nodes.size();
    std::vector<Complex> u(n, u_pcc);
    std::vector<Complex> injections(n);

    double prev_residual = std::numeric_limits<double>::infinity();
    int grow_count = 0;
    bool damped = false;
    bool converged = false;
    for (int iter = 1; iter <= max_iter; ++iter) {
      for (std::size_t j = 0; j < n; ++j)
        injections[j] = injection(global_base + j, u[j]);
      std::vector<Complex> u_next = propagate(u_pcc, feeder, inc, injections);

      double residual = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        residual = std::max(residual, std::abs(u_next[j] - u[j]));

      if (damped) {
        for (std::size_t j = 0; j < n; ++j)
          u[j] += 0.5 * (u_next[j] - u[j]);
      } else {
        u = std::move(u_next);
      }

      result.iterations = std::max(result.iterations, iter);
      result.residual = std::max(result.residual, residual);
      if (residual < tol) {
        converged = true;
        break;
      }
      if (residual > prev_residual) {
        if (++grow_count >= 3) damped = true;
      } else {
        grow_count = 0;
      }
      prev_residual = residual;
    }
    if (!converged)
      throw ConvergenceError("terminal-voltage solve did not converge",
                             result.residual, max_iter);
    result.damped = result.damped || damped;
    result.voltages.insert(result.voltages.end(), u.begin(), u.end());
    global_base += n;
  }
  return result;
}

TerminalSolve solve_terminal_voltages(Complex u_pcc, const FarmTopology& farm,
                                      std::span<const double> i_d0,
                                      const TurbineParams& params, double tol,
                                      int max_iter) {
  if (i_d0.size() != farm.turbine_count())
    throw std::invalid_argument("solve_terminal_voltages: one i_d0 per turbine required");
  return solve_farm_voltages(
      u_pcc, farm,
      [&](std::size_t g, Complex u) {
        return injection_current(u, i_d0[g], params);
      },
      tol, max_iter);
}

std::vector<Complex> turbine_path_impedances(const FarmTopology& farm) {
  std::vector<Complex> path_z;
  path_z.reserve(farm.turbine_count());
  for (const Feeder& feeder : farm.feeders) {
    const auto parent = parent_branches(feeder);
    for (int node : feeder.turbine_nodes) {
      Complex z{};
      walk_root_path(feeder, parent, node,
                     [&](std::size_t b) { z += feeder.branches[b].z; });
      path_z.push_back(z);
    }
  }
  return path_z;
}

std::string voltages_csv(std::span<const Complex> voltages) {
  std::string csv = "node,u_mag,u_angle_rad\n";
  char line[96];
  for (std::size_t i = 0; i < voltages.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.12g,%.12g\n", i + 1,
                  std::abs(voltages[i]), std::arg(voltages[i]));
    csv += line;
  }
  return csv;
}

}  // namespace wfeq
