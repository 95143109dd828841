#include "wfeq/wake.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "wfeq/errors.hpp"

namespace wfeq {

void WakeParams::validate() const {
  if (!(c_t > 0.0) || !(c_t < 1.0))
    throw SchemaError("wake: thrust coefficient must be in (0, 1)");
  if (!(k_decay > 0.0)) throw SchemaError("wake: decay constant must be positive");
  if (!(rotor_radius > 0.0)) throw SchemaError("wake: rotor radius must be positive");
  if (!(spacing > 0.0)) throw SchemaError("wake: spacing must be positive");
}

double deficit_factor(const WakeParams& params) {
  params.validate();
  const double shadow =
      params.rotor_radius / (params.rotor_radius + params.k_decay * params.spacing);
  return 1.0 - (1.0 - std::sqrt(1.0 - params.c_t)) * shadow * shadow;
}

std::vector<double> feeder_speeds(double v_w0, std::size_t n,
                                  const WakeParams& params) {
  if (n == 0) throw std::invalid_argument("feeder_speeds: need at least one turbine");
  if (v_w0 < 0.0) throw std::invalid_argument("feeder_speeds: negative inflow speed");
  const double dec = deficit_factor(params);
  std::vector<double> speeds(n);
  double v = v_w0;
  for (std::size_t i = 0; i < n; ++i) {
    speeds[i] = v;
    v *= dec;
  }
  return speeds;
}

double uniform_from_bits(std::uint64_t bits, double lo, double hi) {
  // top 53 bits -> [0, 1) with full double resolution
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::vector<double> draw_feeder_inflows(std::uint64_t seed,
                                        std::size_t n_feeders, double lo,
                                        double hi) {
  std::mt19937_64 rng(seed);
  std::vector<double> inflows(n_feeders);
  for (auto& v : inflows) v = uniform_from_bits(rng(), lo, hi);
  return inflows;
}

}  // namespace wfeq
