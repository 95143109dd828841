#include "wfeq/classify.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "wfeq/errors.hpp"

namespace wfeq {

std::string to_string(ResponseCategory category) {
  switch (category) {
    case ResponseCategory::kRampRecovery: return "I";
    case ResponseCategory::kInstantRecovery: return "II";
    case ResponseCategory::kUnaffected: return "III";
  }
  throw std::logic_error("unknown response category");
}

ResponseCategory category_from_string(const std::string& label) {
  if (label == "I") return ResponseCategory::kRampRecovery;
  if (label == "II") return ResponseCategory::kInstantRecovery;
  if (label == "III") return ResponseCategory::kUnaffected;
  throw SchemaError("unknown response category '" + label + "'");
}

CriticalPowers critical_powers(double alpha, double e,
                               const TurbineParams& params) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("critical_powers: alpha outside [0, 1]");
  if (!(e > 0.0))
    throw std::invalid_argument("critical_powers: pre-fault voltage must be positive");
  const double p_cri1 = e * id_max(alpha, params);
  return {p_cri1, alpha * p_cri1};
}

CriticalSpeeds critical_speeds(double alpha, double e,
                               const TurbineParams& params) {
  const CriticalPowers powers = critical_powers(alpha, e, params);
  CriticalSpeeds out{};
  auto invert = [&](double p, double* v, bool* clamped) {
    if (p >= params.rated_power) {
      *v = params.v_rated;
      *clamped = p > params.rated_power;
      return;
    }
    if (p <= 0.0) {
      *v = params.v_cutin;
      *clamped = true;
      return;
    }
    bool unreachable = false;
    *v = power_curve_inverse(p, params, &unreachable);
    *clamped = unreachable;
  };
  invert(powers.p_cri1, &out.v_cri1, &out.cri1_clamped);
  invert(powers.p_cri2, &out.v_cri2, &out.cri2_clamped);
  return out;
}

ClusterAssignment classify_wtg(double v_w, double alpha, double e,
                               const TurbineParams& params) {
  const CriticalPowers powers = critical_powers(alpha, e, params);
  ClusterAssignment out{};
  out.v_w = v_w;
  out.alpha_fminus = alpha;
  out.p0 = power_curve(v_w, params);
  out.p_cri1 = powers.p_cri1;
  out.p_cri2 = powers.p_cri2;
  if (alpha > params.lvrt_upper || out.p0 <= powers.p_cri2) {
    out.category = ResponseCategory::kUnaffected;
  } else if (out.p0 > powers.p_cri1) {
    out.category = ResponseCategory::kRampRecovery;
  } else {
    out.category = ResponseCategory::kInstantRecovery;
  }
  return out;
}

std::vector<BoundaryRow> boundary_table(std::span<const double> alpha_grid,
                                        double e, const TurbineParams& params) {
  std::vector<BoundaryRow> rows;
  rows.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    const CriticalSpeeds speeds = critical_speeds(alpha, e, params);
    rows.push_back({alpha, speeds.v_cri1, speeds.v_cri2, speeds.cri1_clamped,
                    speeds.cri2_clamped});
  }
  return rows;
}

std::string boundary_table_csv(std::span<const BoundaryRow> rows) {
  std::string csv = "alpha,v_cri1,v_cri2,v_cri1_clamped,v_cri2_clamped\n";
  char line[160];
  for (const BoundaryRow& row : rows) {
    std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%d,%d\n", row.alpha,
                  row.v_cri1, row.v_cri2, row.cri1_clamped ? 1 : 0,
                  row.cri2_clamped ? 1 : 0);
    csv += line;
  }
  return csv;
}

}  // namespace wfeq
