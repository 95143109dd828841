#ifndef WFEQ_WAKE_HPP_
#define WFEQ_WAKE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wfeq {

/// Jensen wake model constants for one row of turbines.
struct WakeParams {
  double c_t = 0.2;           ///< thrust coefficient
  double k_decay = 0.04;      ///< wake decay constant
  double rotor_radius = 40.0; ///< m
  double spacing = 500.0;     ///< m, downstream distance between turbines

  void validate() const;

  friend bool operator==(const WakeParams&, const WakeParams&) = default;
};

/// Per-turbine speed ratio between adjacent positions on a feeder:
/// 1 - (1 - sqrt(1 - c_t)) * (r / (r + k*x))^2, strictly inside (0, 1).
double deficit_factor(const WakeParams& params);

/// Operating wind speeds along one feeder: a geometric sequence
/// v_w0 * dec^(i-1) for i = 1..n, non-increasing downstream.
std::vector<double> feeder_speeds(double v_w0, std::size_t n,
                                  const WakeParams& params);

/// Deterministic uniform draw on [lo, hi] from a raw 64-bit word. Used for
/// feeder inflow speeds so scenario runs reproduce bit-for-bit on any
/// platform.
double uniform_from_bits(std::uint64_t bits, double lo, double hi);

/// Seeded per-feeder inflow speeds, uniform on [lo, hi].
std::vector<double> draw_feeder_inflows(std::uint64_t seed,
                                        std::size_t n_feeders, double lo,
                                        double hi);

}  // namespace wfeq

#endif  // WFEQ_WAKE_HPP_
