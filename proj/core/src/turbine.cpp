#include "wfeq/turbine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wfeq/errors.hpp"

namespace wfeq {

void TurbineParams::validate() const {
  if (!(i_max >= i_n) || !(i_n > 0.0))
    throw SchemaError("turbine: need i_max >= i_n > 0");
  if (!(k_ramp > 0.0)) throw SchemaError("turbine: k_ramp must be positive");
  if (!(rated_power > 0.0))
    throw SchemaError("turbine: rated_power must be positive");
  if (!(v_cutin > 0.0) || !(v_cutin < v_rated))
    throw SchemaError("turbine: need 0 < v_cutin < v_rated");
  if (!(lvrt_lower >= 0.0) || !(lvrt_lower < lvrt_upper) ||
      !(lvrt_upper < 1.0))
    throw SchemaError("turbine: need 0 <= lvrt_lower < lvrt_upper < 1");
  if (!(lvrt_gain > 0.0))
    throw SchemaError("turbine: lvrt_gain must be positive");
}

double power_curve(double v_w, const TurbineParams& params) {
  if (v_w < 0.0) throw std::invalid_argument("power_curve: negative wind speed");
  if (v_w < params.v_cutin) return 0.0;
  if (v_w >= params.v_rated) return params.rated_power;
  const double r = v_w / params.v_rated;
  return r * r * r * params.rated_power;
}

double power_curve_inverse(double p, const TurbineParams& params,
                           bool* unreachable) {
  if (!(p > 0.0) || p > params.rated_power)
    throw std::invalid_argument("power_curve_inverse: target power outside (0, rated]");
  if (unreachable) *unreachable = false;
  const double v = params.v_rated * std::cbrt(p / params.rated_power);
  if (v < params.v_cutin) {
    if (unreachable) *unreachable = true;
    return params.v_cutin;
  }
  return std::min(v, params.v_rated);
}

double iq_ref(double u_t, const TurbineParams& params) {
  if (u_t < 0.0) throw std::invalid_argument("iq_ref: negative voltage");
  if (u_t > params.lvrt_upper) return 0.0;
  const double sag = params.lvrt_upper - std::max(u_t, params.lvrt_lower);
  return std::min(params.lvrt_gain * sag * params.i_n, params.i_max);
}

double id_max(double u_t, const TurbineParams& params) {
  const double iq = iq_ref(u_t, params);
  const double headroom = params.i_max * params.i_max - iq * iq;
  return headroom > 0.0 ? std::sqrt(headroom) : 0.0;
}

double id_ref(const CurrentState& state, double u_t,
              const TurbineParams& params) {
  const double u = std::max(u_t, kVoltageFloor);
  if (u_t <= params.lvrt_upper)
    return std::min(state.i_d0 / u, id_max(u_t, params));
  return std::min(state.i_d0 * state.e0 / u, params.i_max);
}

CurrentState step_current(const CurrentState& state, double u_t, double dt,
                          const TurbineParams& params, double rate) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_current: dt must be positive");
  CurrentState next = state;
  next.i_q = iq_ref(u_t, params);
  const double target = id_ref(state, u_t, params);
  if (u_t <= params.lvrt_upper || target <= state.i_d) {
    next.i_d = target;
  } else {
    next.i_d = std::min(target, state.i_d + rate * dt);
  }
  // reactive priority on the converter circle
  next.i_q = std::min(next.i_q, params.i_max);
  const double headroom =
      params.i_max * params.i_max - next.i_q * next.i_q;
  next.i_d = std::min(next.i_d, headroom > 0.0 ? std::sqrt(headroom) : 0.0);
  return next;
}

}  // namespace wfeq
