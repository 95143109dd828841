#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wfeq/errors.hpp"
#include "wfeq/wake.hpp"

using Catch::Approx;
using namespace wfeq;

TEST_CASE("deficit factor matches the closed form") {
  const WakeParams params{0.2, 0.04, 40.0, 500.0};
  const double shadow = 40.0 / (40.0 + 0.04 * 500.0);
  const double expected = 1.0 - (1.0 - std::sqrt(0.8)) * shadow * shadow;
  CHECK(deficit_factor(params) == Approx(expected).margin(1e-15));
  CHECK(deficit_factor(params) == Approx(0.95308).margin(1e-5));
}

TEST_CASE("deficit limits") {
  WakeParams params{0.2, 0.04, 40.0, 500.0};
  params.c_t = 1e-12;
  CHECK(deficit_factor(params) == Approx(1.0).margin(1e-9));
  params.c_t = 0.2;
  params.spacing = 1e9;
  CHECK(deficit_factor(params) == Approx(1.0).margin(1e-9));
  params.spacing = 500.0;
  const double dec = deficit_factor(params);
  CHECK(dec > 0.0);
  CHECK(dec < 1.0);
}

TEST_CASE("feeder speeds decay geometrically") {
  const WakeParams params{0.2, 0.04, 40.0, 500.0};
  const double dec = deficit_factor(params);
  const auto speeds = feeder_speeds(10.0, 5, params);
  REQUIRE(speeds.size() == 5);
  CHECK(speeds[0] == 10.0);
  for (std::size_t i = 0; i + 1 < speeds.size(); ++i) {
    CHECK(speeds[i + 1] / speeds[i] == Approx(dec).margin(1e-15));
    CHECK(speeds[i + 1] <= speeds[i]);
  }
  CHECK(speeds[2] == Approx(10.0 * dec * dec));
}

TEST_CASE("single turbine keeps the inflow speed") {
  const WakeParams params{0.2, 0.04, 40.0, 500.0};
  CHECK(feeder_speeds(9.3, 1, params) == std::vector<double>{9.3});
}

TEST_CASE("inflow draws are reproducible and in range") {
  const auto a = draw_feeder_inflows(42, 16, 9.0, 11.0);
  const auto b = draw_feeder_inflows(42, 16, 9.0, 11.0);
  CHECK(a == b);
  for (double v : a) {
    CHECK(v >= 9.0);
    CHECK(v <= 11.0);
  }
  const auto c = draw_feeder_inflows(43, 16, 9.0, 11.0);
  CHECK(a != c);
}

TEST_CASE("wake parameter validation") {
  WakeParams bad{0.2, 0.04, 40.0, 500.0};
  bad.c_t = 1.0;
  CHECK_THROWS_AS(bad.validate(), SchemaError);
  bad = {0.2, -0.1, 40.0, 500.0};
  CHECK_THROWS_AS(bad.validate(), SchemaError);
}
