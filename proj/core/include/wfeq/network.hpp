#ifndef WFEQ_NETWORK_HPP_
#define WFEQ_NETWORK_HPP_

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wfeq/turbine.hpp"

namespace wfeq {

using Complex = std::complex<double>;

/// One collector-line section. `from` is the PCC-side end.
struct Branch {
  int from = 0;
  int to = 0;
  Complex z{0.0, 0.0};

  friend bool operator==(const Branch&, const Branch&) = default;
};

/// A radial feeder rooted at node 0 (the PCC bus). Turbines sit on a subset
/// of the nodes; other nodes are passive junctions.
struct Feeder {
  std::vector<Branch> branches;
  std::vector<int> turbine_nodes;

  friend bool operator==(const Feeder&, const Feeder&) = default;
};

/// Collector network of the whole farm plus its grid coupling.
struct FarmTopology {
  std::vector<Feeder> feeders;
  Complex pcc_transformer_z{0.0, 0.0};
  Complex grid_thevenin_z{0.0, 0.0};

  std::size_t turbine_count() const;
};

/// Branch-node path matrix of one feeder: rows are branches (in feeder
/// order), columns are turbine nodes (in feeder order); entry (b, j) is 1
/// iff node j's injection flows through branch b, i.e. branch b lies on the
/// root-to-node-j path.
class IncidenceMatrix {
public:
  IncidenceMatrix(std::size_t branches, std::vector<int> node_ids);

  std::size_t branch_count() const { return branches_; }
  std::size_t node_count() const { return node_ids_.size(); }
  int node_id(std::size_t col) const { return node_ids_[col]; }

  bool on_path(std::size_t branch, std::size_t col) const {
    return mark_[branch * node_ids_.size() + col] != 0;
  }
  void set(std::size_t branch, std::size_t col) {
    mark_[branch * node_ids_.size() + col] = 1;
  }

private:
  std::size_t branches_;
  std::vector<int> node_ids_;
  std::vector<unsigned char> mark_;
};

/// Build the path matrix of a feeder. Throws TopologyError when the feeder
/// is not a tree rooted at node 0 (missing parent, duplicate parent, cycle,
/// or a turbine on an unknown node).
IncidenceMatrix build_incidence(const Feeder& feeder);

/// Injected current of one turbine at terminal voltage u, from the support-
/// band control law: P = |u| * min(i_d0/|u|, id_max(|u|)), Q = |u| * iq_ref(|u|),
/// returned as conj((P + jQ)/u). |u| is floored before dividing.
Complex injection_current(Complex u, double i_d0, const TurbineParams& params);

/// Node voltages produced by given injections: u_pcc + C^T Z C I.
std::vector<Complex> propagate(Complex u_pcc, const Feeder& feeder,
                               const IncidenceMatrix& inc,
                               std::span<const Complex> injections);

/// One fixed-point pass over a feeder: currents from the previous voltage
/// iterate, then the revised voltages from the path matrix.
std::vector<Complex> sweep(Complex u_pcc, std::span<const Complex> u_prev,
                           const Feeder& feeder, const IncidenceMatrix& inc,
                           std::span<const double> i_d0,
                           const TurbineParams& params);

/// Result of a terminal-voltage solve. Voltages are in farm turbine order
/// (feeders in order, turbine nodes in feeder order).
struct TerminalSolve {
  std::vector<Complex> voltages;
  int iterations = 0;   ///< max sweep count over feeders
  double residual = 0.0;
  bool damped = false;  ///< divergence guard engaged on some feeder
};

/// Injection law used by the generic fixed point: turbine index (farm
/// order) and present voltage iterate to injected current.
using InjectionModel = std::function<Complex(std::size_t, Complex)>;

/// Fixed-point solve of all feeders for a given PCC voltage and an
/// arbitrary injection law. Initialized at u_pcc on every node; iterates
/// until max node |dU| < tol. If the residual grows three passes in a row,
/// the update is damped by 0.5 from then on. Throws ConvergenceError after
/// max_iter passes.
TerminalSolve solve_farm_voltages(Complex u_pcc, const FarmTopology& farm,
                                  const InjectionModel& injection, double tol,
                                  int max_iter);

/// Terminal voltages of every turbine under the support-band control law,
/// given the PCC voltage and the pre-fault active currents.
TerminalSolve solve_terminal_voltages(Complex u_pcc, const FarmTopology& farm,
                                      std::span<const double> i_d0,
                                      const TurbineParams& params, double tol,
                                      int max_iter);

/// Current phasor injected by a converter holding currents (i_d, i_q) at
/// terminal voltage u: (i_d - j*i_q) aligned with u's phase.
Complex phased_current(Complex u, double i_d, double i_q);

/// Sum of branch impedances along the root path of every turbine, farm order.
std::vector<Complex> turbine_path_impedances(const FarmTopology& farm);

/// CSV with header node,u_mag,u_angle_rad for solved voltages.
std::string voltages_csv(std::span<const Complex> voltages);

}  // namespace wfeq

#endif  // WFEQ_NETWORK_HPP_
