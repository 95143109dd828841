#ifndef WFEQ_TURBINE_HPP_
#define WFEQ_TURBINE_HPP_

namespace wfeq {

/// Terminal voltages are floored at this value before any division so a
/// bolted fault cannot blow up the current references.
inline constexpr double kVoltageFloor = 0.01;

/// Electrical limits, grid-code gains and power-curve constants of one
/// full-converter wind turbine. All electrical quantities are per-unit on
/// the single-machine base, with P = U*Id and Q = U*Iq.
struct TurbineParams {
  double rated_power = 1.0;  ///< pu on machine base
  double i_n = 1.0;          ///< rated current, pu
  double i_max = 1.1;        ///< converter current limit, pu
  double k_ramp = 0.5;       ///< active-current recovery rate, pu/s
  double v_cutin = 3.5;      ///< m/s
  double v_rated = 11.1;     ///< m/s
  double lvrt_gain = 1.5;    ///< grid-code reactive gain
  double lvrt_lower = 0.2;   ///< pu, lower edge of the reactive-support band
  double lvrt_upper = 0.9;   ///< pu, upper edge of the reactive-support band

  /// Throws SchemaError if the parameter set is inconsistent.
  void validate() const;

  friend bool operator==(const TurbineParams&, const TurbineParams&) = default;
};

/// Converter current state of one turbine (or one machine of a scaled
/// equivalent unit). i_d0 and e0 freeze the pre-fault operating point.
struct CurrentState {
  double i_d = 0.0;   ///< active current, pu
  double i_q = 0.0;   ///< reactive current, pu
  double i_d0 = 0.0;  ///< pre-fault active current, pu
  double e0 = 1.0;    ///< pre-fault terminal voltage magnitude, pu
};

/// Steady-state power curve: 0 below cut-in, cubic MPPT law up to rated
/// speed, flat at rated power above. Strictly increasing and invertible on
/// [v_cutin, v_rated]. Throws on negative wind speed.
double power_curve(double v_w, const TurbineParams& params);

/// Inverse of the power curve on (0, rated_power]. For targets below the
/// cut-in power the cut-in speed is returned and *unreachable is set.
/// Throws on p <= 0 or p > rated_power.
double power_curve_inverse(double p, const TurbineParams& params,
                           bool* unreachable = nullptr);

/// Grid-code reactive current reference. Zero above the support band,
/// proportional to the voltage sag inside it, clamped at the band-floor
/// value below it, and never above i_max.
double iq_ref(double u_t, const TurbineParams& params);

/// Active-current headroom left by the reactive-priority rule:
/// sqrt(i_max^2 - iq_ref^2), zero when reactive demand consumes the limit.
double id_max(double u_t, const TurbineParams& params);

/// Active current reference. Inside the support band (u_t <= lvrt_upper)
/// the constant-dc-voltage demand i_d0/u_t is limited by id_max; above the
/// band the pre-fault power is tracked (i_d0*e0/u_t capped at i_max).
double id_ref(const CurrentState& state, double u_t,
              const TurbineParams& params);

/// Advance the converter currents one step at terminal voltage u_t.
/// Reactive current follows iq_ref instantly. Active current tracks id_ref
/// instantly inside the support band; above it, upward motion is limited to
/// rate*dt per step and downward motion is instantaneous. The result is
/// re-capped to the i_max circle with reactive priority. `rate` defaults to
/// params.k_ramp; equivalent units pass their scheduled rate instead.
CurrentState step_current(const CurrentState& state, double u_t, double dt,
                          const TurbineParams& params, double rate);

inline CurrentState step_current(const CurrentState& state, double u_t,
                                 double dt, const TurbineParams& params) {
  return step_current(state, u_t, dt, params, params.k_ramp);
}

}  // namespace wfeq

#endif  // WFEQ_TURBINE_HPP_
