#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "wfeq/errors.hpp"
#include "wfeq/turbine.hpp"

using Catch::Approx;
using namespace wfeq;

namespace {
const TurbineParams kParams{};  // 1.5 pu-class defaults: i_n 1.0, i_max 1.1, k 0.5
}

TEST_CASE("power curve shape") {
  CHECK(power_curve(2.0, kParams) == 0.0);
  CHECK(power_curve(3.4999, kParams) == 0.0);
  CHECK(power_curve(11.1, kParams) == Approx(1.0));
  CHECK(power_curve(14.0, kParams) == 1.0);
  CHECK(power_curve(8.81, kParams) == Approx(std::pow(8.81 / 11.1, 3)));
  CHECK(power_curve(8.81, kParams) == Approx(0.5).epsilon(1e-3));
  CHECK_THROWS_AS(power_curve(-0.1, kParams), std::invalid_argument);
}

TEST_CASE("power curve inverse") {
  CHECK(power_curve_inverse(1.0, kParams) == Approx(11.1));
  CHECK(power_curve_inverse(0.5, kParams) == Approx(8.810075838423508));
  CHECK_THROWS_AS(power_curve_inverse(0.0, kParams), std::invalid_argument);
  CHECK_THROWS_AS(power_curve_inverse(1.01, kParams), std::invalid_argument);

  bool unreachable = false;
  const double v = power_curve_inverse(1e-4, kParams, &unreachable);
  CHECK(unreachable);
  CHECK(v == kParams.v_cutin);
}

TEST_CASE("power curve round-trips on the operating range") {
  for (double v = 3.5; v <= 11.1; v += 0.05) {
    const double p = power_curve(v, kParams);
    CHECK(power_curve_inverse(p, kParams) == Approx(v).margin(1e-10));
  }
}

TEST_CASE("reactive current reference") {
  CHECK(iq_ref(1.0, kParams) == 0.0);
  CHECK(iq_ref(0.9, kParams) == 0.0);
  CHECK(iq_ref(0.5, kParams) == Approx(0.6));
  CHECK(iq_ref(0.1, kParams) == Approx(1.05));  // clamped at the band floor
  CHECK(iq_ref(0.0, kParams) == Approx(1.05));
}

TEST_CASE("reactive reference never exceeds the converter limit") {
  TurbineParams tight = kParams;
  tight.i_max = 1.0;
  CHECK(iq_ref(0.1, tight) == Approx(1.0));
  CHECK(id_max(0.1, tight) == 0.0);
}

TEST_CASE("active current headroom") {
  CHECK(id_max(0.9, kParams) == Approx(1.1));
  CHECK(id_max(0.5, kParams) == Approx(0.9219544457292888));
}

TEST_CASE("active current reference") {
  CHECK(id_ref(CurrentState{0.0, 0.0, 0.5, 1.0}, 0.5, kParams) ==
        Approx(0.9219544457292888));  // limited by headroom
  CHECK(id_ref(CurrentState{0.0, 0.0, 0.3, 1.0}, 0.6, kParams) == Approx(0.5));
  CHECK(id_ref(CurrentState{0.0, 0.0, 0.7, 1.0}, 1.0, kParams) == Approx(0.7));
  // bolted fault: the voltage floor keeps the reference finite
  CHECK(id_ref(CurrentState{0.0, 0.0, 0.5, 1.0}, 0.0, kParams) ==
        id_max(0.0, kParams));
}

TEST_CASE("current step slews upward outside the support band") {
  CurrentState state{0.5, 0.0, 1.0, 1.0};
  state = step_current(state, 1.0, 0.01, kParams);
  CHECK(state.i_d == Approx(0.505));
  CHECK(state.i_q == 0.0);
}

TEST_CASE("current step drops downward instantly") {
  CurrentState state{1.0, 0.0, 0.8, 1.0};
  state = step_current(state, 1.0, 0.01, kParams);
  CHECK(state.i_d == Approx(0.8));
}

TEST_CASE("current step jumps to the reference during a dip") {
  CurrentState state{0.5, 0.0, 0.5, 1.0};
  state = step_current(state, 0.5, 0.01, kParams);
  CHECK(state.i_q == Approx(0.6));
  CHECK(state.i_d == Approx(std::min(0.5 / 0.5, id_max(0.5, kParams))));
}

TEST_CASE("pre-fault operating point is a fixed point") {
  CurrentState state{0.63, 0.0, 0.63, 1.0};
  for (int k = 0; k < 50; ++k) state = step_current(state, 1.0, 1e-3, kParams);
  CHECK(state.i_d == Approx(0.63));
  CHECK(state.i_q == 0.0);
}

TEST_CASE("current circle holds on random voltage trajectories") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> voltage(0.0, 1.2);
  for (int trial = 0; trial < 50; ++trial) {
    CurrentState state{0.9, 0.0, 0.9, 1.0};
    for (int k = 0; k < 200; ++k) {
      const double u = voltage(rng);
      state = step_current(state, u, 1e-3, kParams);
      CHECK(state.i_d * state.i_d + state.i_q * state.i_q <=
            kParams.i_max * kParams.i_max + 1e-9);
      CHECK(state.i_d >= 0.0);
      CHECK(state.i_q >= 0.0);
      // reactive priority: iq always gets its full reference
      if (u < 0.9) CHECK(state.i_q == Approx(iq_ref(u, kParams)));
    }
  }
}

TEST_CASE("slew invariant above the support band") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> voltage(0.9, 1.05);
  CurrentState state{0.2, 0.0, 1.0, 1.0};
  const double dt = 1e-3;
  std::vector<double> trajectory{state.i_d};
  for (int k = 0; k < 400; ++k) {
    state = step_current(state, voltage(rng), dt, kParams);
    trajectory.push_back(state.i_d);
  }
  for (std::size_t a = 0; a < trajectory.size(); ++a)
    for (std::size_t b = a + 1; b < trajectory.size(); b += 17)
      CHECK(trajectory[b] - trajectory[a] <=
            kParams.k_ramp * dt * static_cast<double>(b - a) + 1e-9);
}

TEST_CASE("parameter validation rejects inconsistent sets") {
  TurbineParams bad = kParams;
  bad.i_max = 0.5;  // below i_n
  CHECK_THROWS_AS(bad.validate(), SchemaError);
  bad = kParams;
  bad.k_ramp = 0.0;
  CHECK_THROWS_AS(bad.validate(), SchemaError);
  bad = kParams;
  bad.lvrt_lower = 0.95;
  CHECK_THROWS_AS(bad.validate(), SchemaError);
  CHECK_NOTHROW(kParams.validate());
}
