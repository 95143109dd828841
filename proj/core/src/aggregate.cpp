#include "wfeq/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wfeq/errors.hpp"

namespace wfeq {

namespace {
constexpr double kReactiveEps = 1e-12;  // below this the cluster has no LVRT duty
constexpr double kDurationEps = 1e-9;
}  // namespace

double schedule_rate(std::span<const RampSegment> schedule, double t,
                     double fallback) {
  double rate = fallback;
  for (const RampSegment& seg : schedule) {
    if (seg.t_start > t) break;
    rate = seg.rate;
  }
  return rate;
}

double equivalent_wind_speed(std::span<const double> cluster_speeds,
                             const TurbineParams& params) {
  if (cluster_speeds.empty())
    throw std::invalid_argument("equivalent_wind_speed: empty cluster");
  double p_sum = 0.0;
  for (double v : cluster_speeds) p_sum += power_curve(v, params);
  const double p_mean = p_sum / static_cast<double>(cluster_speeds.size());
  if (p_mean <= 0.0) {
    // idle cluster: any speed below cut-in reproduces zero power
    return std::accumulate(cluster_speeds.begin(), cluster_speeds.end(), 0.0) /
           static_cast<double>(cluster_speeds.size());
  }
  return power_curve_inverse(p_mean, params);
}

std::vector<double> ramp_durations(std::span<const ClusterMember> cluster,
                                   const TurbineParams& params) {
  std::vector<double> durations;
  durations.reserve(cluster.size());
  for (const ClusterMember& m : cluster) {
    const double i_d0 = power_curve(m.v_w, params) / m.e;
    const double t = (i_d0 - id_max(m.alpha, params)) / params.k_ramp;
    if (t < -kDurationEps)
      throw EquivalenceError(
          "ramp_durations: member has no ramp recovery (misclassified)");
    durations.push_back(std::max(t, 0.0));
  }
  std::sort(durations.begin(), durations.end());
  return durations;
}

std::vector<RampSegment> klim_schedule(std::span<const double> durations_sorted,
                                       const TurbineParams& params) {
  if (durations_sorted.empty())
    throw std::invalid_argument("klim_schedule: empty cluster");
  if (!std::is_sorted(durations_sorted.begin(), durations_sorted.end()))
    throw std::invalid_argument("klim_schedule: durations must be sorted");
  const double n = static_cast<double>(durations_sorted.size());
  std::vector<RampSegment> schedule;
  schedule.reserve(durations_sorted.size() + 1);
  schedule.push_back({0.0, params.k_ramp});
  for (std::size_t j = 1; j < durations_sorted.size(); ++j)
    schedule.push_back(
        {durations_sorted[j - 1], (n - static_cast<double>(j)) * params.k_ramp / n});
  schedule.push_back({durations_sorted.back(), params.k_ramp / n});
  return schedule;
}

double cluster_reactive(std::span<const double> alphas,
                        const TurbineParams& params) {
  double q = 0.0;
  for (double alpha : alphas) q += alpha * iq_ref(alpha, params);
  return q;
}

double equivalent_terminal_voltage(double q_equ, int n_c, double alpha_pcc,
                                   const TurbineParams& params) {
  if (n_c < 1) throw std::invalid_argument("equivalent_terminal_voltage: empty cluster");
  if (q_equ < 0.0)
    throw std::invalid_argument("equivalent_terminal_voltage: negative reactive power");
  const double upper = params.lvrt_upper;
  const double c = q_equ / (params.lvrt_gain * params.i_n * n_c);
  double disc = upper * upper - 4.0 * c;
  if (disc < 0.0) {
    if (disc < -1e-12)
      throw EquivalenceError(
          "equivalent_terminal_voltage: reactive power exceeds cluster capability");
    disc = 0.0;
  }
  const double s = std::sqrt(disc);
  const double hi = 0.5 * (upper + s);
  const double lo = 0.5 * (upper - s);
  return std::abs(hi - alpha_pcc) <= std::abs(lo - alpha_pcc) ? hi : lo;
}

double equivalent_power_at_clearance(ResponseCategory category, int n_c,
                                     double alpha_equ, double v_eq,
                                     const TurbineParams& params) {
  if (category == ResponseCategory::kUnaffected)
    return n_c * power_curve(v_eq, params);
  return n_c * alpha_equ * id_max(alpha_equ, params);
}

Complex line_pcc_phasor(double p, double q, double alpha_equ, double r,
                        double x) {
  const double d_long = (p * r + q * x) / alpha_equ;
  const double d_lat = (p * x - q * r) / alpha_equ;
  return {alpha_equ - d_long, -d_lat};
}

double line_pcc_voltage(double p, double q, double alpha_equ, double r,
                        double x) {
  return std::abs(line_pcc_phasor(p, q, alpha_equ, r, x));
}

LineImpedance equivalent_line(double p_equ, double q_equ, double alpha_equ,
                              double alpha_pcc, double k0) {
  if (alpha_equ < alpha_pcc)
    throw std::invalid_argument(
        "equivalent_line: unit terminal voltage below the PCC voltage");
  if (!(p_equ * p_equ + q_equ * q_equ > 0.0))
    throw std::invalid_argument("equivalent_line: zero power flow");
  if (alpha_equ == alpha_pcc) return {0.0, 0.0};

  const double a = alpha_equ * (k0 * p_equ + q_equ);
  const double b = (p_equ * p_equ + q_equ * q_equ) * (1.0 + k0 * k0);
  const double disc =
      a * a - b * (alpha_equ * alpha_equ - alpha_pcc * alpha_pcc);
  if (disc < 0.0)
    throw EquivalenceError("equivalent_line: no feasible line impedance");
  const double x = alpha_equ * (a - std::sqrt(disc)) / b;
  const LineImpedance line{k0 * x, x};
  if (std::abs(line_pcc_voltage(p_equ, q_equ, alpha_equ, line.r, line.x) -
               alpha_pcc) > 1e-6)
    throw EquivalenceError("equivalent_line: back-substitution check failed");
  return line;
}

std::vector<ClusterAssignment> classify_farm(
    std::span<const double> speeds, std::span<const Complex> terminal_voltages,
    std::span<const double> e_prefault, const TurbineParams& params) {
  if (speeds.size() != terminal_voltages.size() ||
      speeds.size() != e_prefault.size())
    throw std::invalid_argument("classify_farm: size mismatch");
  std::vector<ClusterAssignment> assignments;
  assignments.reserve(speeds.size());
  for (std::size_t i = 0; i < speeds.size(); ++i)
    assignments.push_back(classify_wtg(speeds[i],
                                       std::abs(terminal_voltages[i]),
                                       e_prefault[i], params));
  return assignments;
}

namespace {

double weighted_ratio_k0(std::span<const Complex> path_z,
                         std::span<const double> weights,
                         std::span<const int> members) {
  double ratio_sum = 0.0, weight_sum = 0.0;
  for (int m : members) {
    const Complex z = path_z[m];
    if (!(z.imag() > 0.0))
      throw EquivalenceError("equivalent line ratio: collector path has no reactance");
    const double w = weights[m];
    ratio_sum += w * (z.real() / z.imag());
    weight_sum += w;
  }
  if (weight_sum <= 0.0) {
    // idle cluster: plain mean of the ratios
    ratio_sum = 0.0;
    for (int m : members) ratio_sum += path_z[m].real() / path_z[m].imag();
    return ratio_sum / static_cast<double>(members.size());
  }
  return ratio_sum / weight_sum;
}

double fallback_alpha_equ(std::span<const ClusterAssignment> assignments,
                          std::span<const int> members) {
  // no LVRT duty to invert: power-weighted mean of the member voltages
  double num = 0.0, den = 0.0, plain = 0.0;
  for (int m : members) {
    num += assignments[m].p0 * assignments[m].alpha_fminus;
    den += assignments[m].p0;
    plain += assignments[m].alpha_fminus;
  }
  return den > 0.0 ? num / den : plain / static_cast<double>(members.size());
}

}  // namespace

EquivalentFarm build_equivalent_farm(const FarmTopology& farm,
                                     std::span<const double> speeds,
                                     double alpha_pcc,
                                     std::span<const Complex> terminal_voltages,
                                     std::span<const double> e_prefault,
                                     const TurbineParams& params) {
  if (speeds.size() != farm.turbine_count())
    throw std::invalid_argument("build_equivalent_farm: one speed per turbine required");
  const std::vector<ClusterAssignment> assignments =
      classify_farm(speeds, terminal_voltages, e_prefault, params);
  const std::vector<Complex> path_z = turbine_path_impedances(farm);
  std::vector<double> p0(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i) p0[i] = assignments[i].p0;

  EquivalentFarm result;
  result.pcc_voltage_used = alpha_pcc;
  for (ResponseCategory category :
       {ResponseCategory::kRampRecovery, ResponseCategory::kInstantRecovery,
        ResponseCategory::kUnaffected}) {
    std::vector<int> members;
    for (std::size_t i = 0; i < assignments.size(); ++i)
      if (assignments[i].category == category) members.push_back(static_cast<int>(i));
    if (members.empty()) continue;

    EquivalentUnit unit;
    unit.category = category;
    unit.n_machines = static_cast<int>(members.size());
    unit.members = members;

    std::vector<double> member_speeds, member_alphas;
    member_speeds.reserve(members.size());
    member_alphas.reserve(members.size());
    for (int m : members) {
      member_speeds.push_back(speeds[m]);
      member_alphas.push_back(assignments[m].alpha_fminus);
    }
    unit.v_eq = equivalent_wind_speed(member_speeds, params);
    unit.q_equ = cluster_reactive(member_alphas, params);
    unit.alpha_equ =
        unit.q_equ > kReactiveEps
            ? equivalent_terminal_voltage(unit.q_equ, unit.n_machines,
                                          alpha_pcc, params)
            : fallback_alpha_equ(assignments, members);
    unit.p_equ = equivalent_power_at_clearance(category, unit.n_machines,
                                               unit.alpha_equ, unit.v_eq, params);

    if (unit.p_equ * unit.p_equ + unit.q_equ * unit.q_equ > 0.0) {
      const double k0 = weighted_ratio_k0(path_z, p0, members);
      const LineImpedance line = equivalent_line(
          unit.p_equ, unit.q_equ, unit.alpha_equ, alpha_pcc, k0);
      unit.line_r = line.r;
      unit.line_x = line.x;
    }

    if (category == ResponseCategory::kRampRecovery) {
      std::vector<ClusterMember> cluster;
      cluster.reserve(members.size());
      for (int m : members)
        cluster.push_back({speeds[m], assignments[m].alpha_fminus, e_prefault[m]});
      unit.ramp_schedule = klim_schedule(ramp_durations(cluster, params), params);
    }
    result.units.push_back(std::move(unit));
  }
  return result;
}

EquivalentFarm build_traditional_farm(const FarmTopology& farm,
                                      std::span<const double> speeds,
                                      const TurbineParams& params) {
  if (speeds.size() != farm.turbine_count() || speeds.empty())
    throw std::invalid_argument("build_traditional_farm: one speed per turbine required");
  const std::vector<Complex> path_z = turbine_path_impedances(farm);
  Complex z_mean{};
  for (const Complex& z : path_z) z_mean += z;
  z_mean /= static_cast<double>(path_z.size());
  z_mean /= static_cast<double>(path_z.size());  // n machines in parallel

  EquivalentUnit unit;
  unit.category = ResponseCategory::kUnaffected;  // label only; plain ramp behavior
  unit.n_machines = static_cast<int>(speeds.size());
  unit.v_eq = equivalent_wind_speed(speeds, params);
  unit.line_r = z_mean.real();
  unit.line_x = z_mean.imag();
  unit.p_equ = unit.n_machines * power_curve(unit.v_eq, params);
  unit.members.resize(speeds.size());
  std::iota(unit.members.begin(), unit.members.end(), 0);

  EquivalentFarm result;
  result.units.push_back(std::move(unit));
  return result;
}

}  // namespace wfeq
