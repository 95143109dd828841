#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "test_helpers.hpp"
#include "wfeq/aggregate.hpp"
#include "wfeq/errors.hpp"

using Catch::Approx;
using namespace wfeq;

namespace {
const TurbineParams kParams{};
}

TEST_CASE("equivalent wind speed preserves cluster power") {
  const std::vector<double> speeds{11.1, 8.81};
  const double v_eq = equivalent_wind_speed(speeds, kParams);
  CHECK(v_eq == Approx(10.085).margin(1e-3));
  const double cluster_power =
      power_curve(11.1, kParams) + power_curve(8.81, kParams);
  CHECK(2.0 * power_curve(v_eq, kParams) == Approx(cluster_power).margin(1e-12));
}

TEST_CASE("equivalent wind speed of a uniform cluster is the common speed") {
  const std::vector<double> speeds{9.4, 9.4, 9.4};
  CHECK(equivalent_wind_speed(speeds, kParams) == Approx(9.4).margin(1e-12));
}

TEST_CASE("equivalent wind speed stays within the cluster range") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> speed(4.0, 11.1);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> speeds(6);
    for (auto& v : speeds) v = speed(rng);
    const double v_eq = equivalent_wind_speed(speeds, kParams);
    CHECK(v_eq >= *std::min_element(speeds.begin(), speeds.end()) - 1e-12);
    CHECK(v_eq <= *std::max_element(speeds.begin(), speeds.end()) + 1e-12);
  }
}

TEST_CASE("ramp durations") {
  const std::vector<ClusterMember> cluster{{11.1, 0.5, 1.0}};
  const auto durations = ramp_durations(cluster, kParams);
  REQUIRE(durations.size() == 1);
  CHECK(durations[0] == Approx((1.0 - std::sqrt(0.85)) / 0.5));
  CHECK(durations[0] == Approx(0.156).margin(1e-3));
}

TEST_CASE("ramp durations grow with wind speed at fixed dip") {
  const std::vector<ClusterMember> cluster{
      {10.2, 0.4, 1.0}, {10.8, 0.4, 1.0}, {11.1, 0.4, 1.0}};
  const auto durations = ramp_durations(cluster, kParams);
  CHECK(std::is_sorted(durations.begin(), durations.end()));
  CHECK(durations.front() < durations.back());
}

TEST_CASE("ramp durations reject members without a recovery gap") {
  // far above the critical power boundary: id_max exceeds the pre-fault current
  const std::vector<ClusterMember> cluster{{5.0, 0.85, 1.0}};
  CHECK_THROWS_AS(ramp_durations(cluster, kParams), EquivalenceError);
}

TEST_CASE("rate schedule for two machines") {
  const std::vector<double> durations{0.1, 0.3};
  const auto schedule = klim_schedule(durations, kParams);
  REQUIRE(schedule.size() == 3);
  CHECK(schedule[0].t_start == 0.0);
  CHECK(schedule[0].rate == Approx(0.5));
  CHECK(schedule[1].t_start == Approx(0.1));
  CHECK(schedule[1].rate == Approx(0.25));
  CHECK(schedule[2].t_start == Approx(0.3));
  CHECK(schedule[2].rate == Approx(0.25));

  CHECK(schedule_rate(schedule, 0.05, 99.0) == Approx(0.5));
  CHECK(schedule_rate(schedule, 0.2, 99.0) == Approx(0.25));
  CHECK(schedule_rate(schedule, 1.0, 99.0) == Approx(0.25));
}

TEST_CASE("rate schedule for one machine degenerates to a plain ramp") {
  const std::vector<double> durations{0.2};
  const auto schedule = klim_schedule(durations, kParams);
  for (double t : {0.0, 0.1, 0.2, 0.5})
    CHECK(schedule_rate(schedule, t, 99.0) == Approx(kParams.k_ramp));
}

TEST_CASE("rates are positive and non-increasing") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dur(0.01, 0.5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> durations(1 + trial % 9);
    for (auto& t : durations) t = dur(rng);
    std::sort(durations.begin(), durations.end());
    const auto schedule = klim_schedule(durations, kParams);
    for (std::size_t s = 0; s < schedule.size(); ++s) {
      CHECK(schedule[s].rate > 0.0);
      if (s > 0) {
        CHECK(schedule[s].rate <= schedule[s - 1].rate + 1e-15);
        CHECK(schedule[s].t_start >= schedule[s - 1].t_start);
      }
    }
  }
}

TEST_CASE("schedule integral reproduces the summed individual ramps") {
  // the aggregate of per-machine trajectories min(b_i, a_i + k t) is exactly
  // n * (a_mean + integral of the schedule rate), capped at b_mean
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> alpha(0.25, 0.6);
  std::uniform_real_distribution<double> speed(9.0, 11.1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 6;
    std::vector<ClusterMember> cluster;
    std::vector<double> start, target;
    for (std::size_t i = 0; i < n; ++i) {
      const ClusterMember m{speed(rng), alpha(rng), 1.0};
      const double a = id_max(m.alpha, kParams);
      const double b = power_curve(m.v_w, kParams);
      if (b <= a) continue;  // keep only genuine ramp-recovery members
      cluster.push_back(m);
      start.push_back(a);
      target.push_back(b);
    }
    if (cluster.size() < 2) continue;

    const auto durations = ramp_durations(cluster, kParams);
    const auto schedule = klim_schedule(durations, kParams);
    const double nn = static_cast<double>(cluster.size());
    const double a_mean =
        std::accumulate(start.begin(), start.end(), 0.0) / nn;
    const double b_mean =
        std::accumulate(target.begin(), target.end(), 0.0) / nn;

    std::vector<double> samples{0.0, 1e-4};
    for (double t : durations) {
      samples.push_back(t);
      samples.push_back(t + 1e-3);
      samples.push_back(std::max(0.0, t - 1e-3));
    }
    samples.push_back(durations.back() + 0.5);

    for (double t : samples) {
      double aggregate = 0.0;
      for (std::size_t i = 0; i < cluster.size(); ++i)
        aggregate += std::min(target[i], start[i] + kParams.k_ramp * t);

      // piecewise integral of the schedule rate up to t
      double integral = 0.0;
      for (std::size_t s = 0; s < schedule.size(); ++s) {
        const double seg_end =
            s + 1 < schedule.size() ? schedule[s + 1].t_start : t;
        if (schedule[s].t_start >= t) break;
        integral +=
            schedule[s].rate * (std::min(t, seg_end) - schedule[s].t_start);
      }
      const double unit = std::min(b_mean, a_mean + integral);
      CHECK(nn * unit == Approx(aggregate).margin(1e-10));
    }
  }
}

TEST_CASE("cluster reactive power") {
  CHECK(cluster_reactive(std::vector<double>{0.5}, kParams) == Approx(0.3));
  CHECK(cluster_reactive(std::vector<double>{0.9, 0.9, 0.9}, kParams) == 0.0);
  const std::vector<double> alphas{0.3, 0.5, 0.7};
  double cap = 0.0;
  for (double a : alphas) cap += a * kParams.i_max;
  CHECK(cluster_reactive(alphas, kParams) <= cap);
}

TEST_CASE("equivalent terminal voltage inverts the reactive sum") {
  // constructed so the quadratic is a^2 - 0.9a + 0.2 with roots 0.5 and 0.4
  const double q = 0.2 * (1.5 * 1.0 * 10);
  CHECK(equivalent_terminal_voltage(q, 10, 0.48, kParams) == Approx(0.5));
  CHECK(equivalent_terminal_voltage(q, 10, 0.42, kParams) == Approx(0.4));
  // equidistant: the larger root wins
  CHECK(equivalent_terminal_voltage(q, 10, 0.45, kParams) == Approx(0.5));
}

TEST_CASE("equivalent terminal voltage degenerate and infeasible cases") {
  CHECK(equivalent_terminal_voltage(0.0, 4, 0.85, kParams) == Approx(0.9));
  CHECK(equivalent_terminal_voltage(0.0, 4, 0.1, kParams) == Approx(0.0));
  // capability peaks at q = gain*i_n*n*(0.45)^2
  const double beyond = 1.5 * 1.0 * 4 * 0.45 * 0.45 + 1e-3;
  CHECK_THROWS_AS(equivalent_terminal_voltage(beyond, 4, 0.5, kParams),
                  EquivalenceError);
}

TEST_CASE("equivalent terminal voltage reconstruction property") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> alpha(0.21, 0.89);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 12;
    std::vector<double> alphas(n);
    for (auto& a : alphas) a = alpha(rng);
    const double q = cluster_reactive(alphas, kParams);
    const double a_eq = equivalent_terminal_voltage(q, n, alphas[0], kParams);
    CHECK(kParams.lvrt_gain * kParams.i_n * n * (0.9 - a_eq) * a_eq ==
          Approx(q).margin(1e-10));
  }
}

TEST_CASE("root selection is invariant under joint scaling") {
  const double q = 1.1;
  const double base = equivalent_terminal_voltage(q, 5, 0.5, kParams);
  CHECK(equivalent_terminal_voltage(3.0 * q, 15, 0.5, kParams) == Approx(base));
}

TEST_CASE("equivalent power at clearance") {
  CHECK(equivalent_power_at_clearance(ResponseCategory::kUnaffected, 5, 0.0,
                                      11.1, kParams) == Approx(5.0));
  CHECK(equivalent_power_at_clearance(ResponseCategory::kRampRecovery, 2, 0.5,
                                      0.0, kParams) ==
        Approx(2.0 * 0.5 * std::sqrt(0.85)));
  CHECK(equivalent_power_at_clearance(ResponseCategory::kInstantRecovery, 3,
                                      0.9, 0.0, kParams) ==
        Approx(3.0 * 0.9 * kParams.i_max));
}

TEST_CASE("equivalent line hand value and back-substitution") {
  const LineImpedance line = equivalent_line(1.0, 0.5, 0.95, 0.90, 0.5);
  CHECK(line.x == Approx(0.04826).margin(1e-5));
  CHECK(line.r == Approx(0.02413).margin(1e-5));
  CHECK(line.r / line.x == Approx(0.5));
  CHECK(line_pcc_voltage(1.0, 0.5, 0.95, line.r, line.x) ==
        Approx(0.90).margin(1e-8));
}

TEST_CASE("equivalent line degenerate and error cases") {
  const LineImpedance zero = equivalent_line(1.0, 0.5, 0.8, 0.8, 0.5);
  CHECK(zero.r == 0.0);
  CHECK(zero.x == 0.0);
  CHECK_THROWS_AS(equivalent_line(1.0, 0.5, 0.7, 0.8, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(equivalent_line(0.0, 0.0, 0.9, 0.8, 0.5),
                  std::invalid_argument);
  // tiny flow cannot produce a big drop
  CHECK_THROWS_AS(equivalent_line(1e-3, 1e-3, 0.9, 0.2, 0.5),
                  EquivalenceError);
}

TEST_CASE("selected line root is the statically stable one") {
  const double p = 1.0, q = 0.5, ae = 0.95, ap = 0.90, k0 = 0.5;
  const LineImpedance line = equivalent_line(p, q, ae, ap, k0);
  const Complex u_pcc = line_pcc_phasor(p, q, ae, line.r, line.x);
  CHECK(std::abs(std::arg(u_pcc)) < M_PI / 2);

  // the rejected root (plus sign) swings the PCC phasor past pi/2
  const double a = ae * (k0 * p + q);
  const double b = (p * p + q * q) * (1.0 + k0 * k0);
  const double x2 =
      ae * (a + std::sqrt(a * a - b * (ae * ae - ap * ap))) / b;
  const Complex u_pcc2 = line_pcc_phasor(p, q, ae, k0 * x2, x2);
  CHECK(std::abs(line_pcc_voltage(p, q, ae, k0 * x2, x2) - ap) < 1e-8);
  CHECK(std::abs(std::arg(u_pcc2)) > M_PI / 2);
}

TEST_CASE("single-turbine farm equivalences to its physical line") {
  const Complex z{0.002, 0.004};
  FarmTopology farm;
  farm.feeders.push_back(wfeq_test::chain_feeder(1, z));

  const double v_w = 10.0;
  const double p0 = power_curve(v_w, kParams);
  const std::vector<double> speeds{v_w};
  const std::vector<double> e0{1.0};
  const std::vector<double> i_d0{p0};

  const double alpha_pcc = 0.4;
  const TerminalSolve solve = solve_terminal_voltages(
      {alpha_pcc, 0.0}, farm, i_d0, kParams, 1e-13, 200);

  const EquivalentFarm equivalent = build_equivalent_farm(
      farm, speeds, alpha_pcc, solve.voltages, e0, kParams);
  REQUIRE(equivalent.units.size() == 1);
  const EquivalentUnit& unit = equivalent.units[0];
  CHECK(unit.n_machines == 1);
  CHECK(unit.v_eq == Approx(v_w));
  CHECK(unit.alpha_equ == Approx(std::abs(solve.voltages[0])).margin(1e-10));
  CHECK(unit.line_r == Approx(z.real()).margin(1e-7));
  CHECK(unit.line_x == Approx(z.imag()).margin(1e-7));
}

TEST_CASE("equivalent farm conserves pre-fault power and reactive power") {
  // two feeders, mixed wind speeds, deep dip
  const Complex z{0.0005, 0.001};
  FarmTopology farm;
  farm.feeders.push_back(wfeq_test::chain_feeder(4, z));
  farm.feeders.push_back(wfeq_test::chain_feeder(4, z));
  const std::vector<double> speeds{11.1, 10.2, 9.4, 8.7, 10.8, 9.9, 9.1, 8.4};
  std::vector<double> e0(8, 1.0), i_d0(8);
  for (int i = 0; i < 8; ++i) i_d0[i] = power_curve(speeds[i], kParams);

  const double alpha_pcc = 0.3;
  const TerminalSolve solve = solve_terminal_voltages(
      {alpha_pcc, 0.0}, farm, i_d0, kParams, 1e-12, 200);
  const EquivalentFarm equivalent = build_equivalent_farm(
      farm, speeds, alpha_pcc, solve.voltages, e0, kParams);

  double unit_power = 0.0, unit_reactive = 0.0;
  int machines = 0;
  for (const EquivalentUnit& unit : equivalent.units) {
    unit_power += unit.n_machines * power_curve(unit.v_eq, kParams);
    unit_reactive += unit.q_equ;
    machines += unit.n_machines;
    CHECK(unit.line_r / std::max(unit.line_x, 1e-30) == Approx(0.5));
    if (unit.q_equ > 0.0) {
      CHECK(unit.alpha_equ >= 0.0);
      CHECK(unit.alpha_equ <= 0.9);
    }
    CHECK(line_pcc_voltage(unit.p_equ, unit.q_equ, unit.alpha_equ, unit.line_r,
                           unit.line_x) == Approx(alpha_pcc).margin(1e-8));
  }
  CHECK(machines == 8);

  double turbine_power = 0.0, turbine_reactive = 0.0;
  for (int i = 0; i < 8; ++i) {
    turbine_power += power_curve(speeds[i], kParams);
    const double alpha = std::abs(solve.voltages[i]);
    turbine_reactive += alpha * iq_ref(alpha, kParams);
  }
  CHECK(unit_power == Approx(turbine_power).margin(1e-9));
  CHECK(unit_reactive == Approx(turbine_reactive).margin(1e-12));
}

TEST_CASE("traditional baseline lumps the whole farm") {
  const Complex z{0.001, 0.002};
  FarmTopology farm;
  farm.feeders.push_back(wfeq_test::chain_feeder(3, z));
  const std::vector<double> speeds{11.1, 10.0, 9.0};
  const EquivalentFarm baseline = build_traditional_farm(farm, speeds, kParams);
  REQUIRE(baseline.units.size() == 1);
  const EquivalentUnit& unit = baseline.units[0];
  CHECK(unit.n_machines == 3);
  CHECK(unit.ramp_schedule.empty());
  CHECK(3.0 * power_curve(unit.v_eq, kParams) ==
        Approx(power_curve(11.1, kParams) + power_curve(10.0, kParams) +
               power_curve(9.0, kParams))
            .margin(1e-12));
  // mean path impedance over {1, 2, 3} sections, divided by the 3 machines
  CHECK(unit.line_x == Approx(2.0 * z.imag() / 3.0));
  CHECK(unit.line_r == Approx(2.0 * z.real() / 3.0));
}
