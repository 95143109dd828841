#include "wfeq/timeseries.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wfeq/errors.hpp"

namespace wfeq {

std::string timeseries_csv(const TimeSeries& series) {
  std::string csv = "t,p_pcc,q_pcc,u_pcc\n";
  csv.reserve(csv.size() + series.size() * 80);
  char line[160];
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", series.t[k],
                  series.p_pcc[k], series.q_pcc[k], series.u_pcc[k]);
    csv += line;
  }
  return csv;
}

TimeSeries timeseries_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,p_pcc,q_pcc,u_pcc")
    throw SchemaError("time-series CSV: bad header");
  TimeSeries series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t, p, q, u;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg", &t, &p, &q, &u) != 4)
      throw SchemaError("time-series CSV: bad row '" + line + "'");
    series.t.push_back(t);
    series.p_pcc.push_back(p);
    series.q_pcc.push_back(q);
    series.u_pcc.push_back(u);
  }
  return series;
}

CompareMetrics compare(const TimeSeries& reference, const TimeSeries& candidate,
                       double w0, double w1) {
  if (reference.size() != candidate.size())
    throw std::invalid_argument("compare: series lengths differ");
  for (std::size_t k = 0; k < reference.size(); ++k)
    if (reference.t[k] != candidate.t[k])
      throw std::invalid_argument("compare: sampling grids differ");
  if (!(w0 <= w1)) throw std::invalid_argument("compare: empty window");

  CompareMetrics metrics{0.0, 0.0, 0.0,
                         std::numeric_limits<double>::quiet_NaN()};
  double ape_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < reference.size(); ++k) {
    if (reference.t[k] < w0 || reference.t[k] > w1) continue;
    const double dp = std::abs(candidate.p_pcc[k] - reference.p_pcc[k]);
    const double dq = std::abs(candidate.q_pcc[k] - reference.q_pcc[k]);
    ape_sum += dp / std::max(std::abs(reference.p_pcc[k]), 0.01);
    metrics.max_abs_dp = std::max(metrics.max_abs_dp, dp);
    metrics.max_abs_dq = std::max(metrics.max_abs_dq, dq);
    ++count;
  }
  if (count == 0) throw std::invalid_argument("compare: no samples in window");
  metrics.mape_p_percent = 100.0 * ape_sum / static_cast<double>(count);
  if (reference.wall_clock_s > 0.0 && candidate.wall_clock_s > 0.0)
    metrics.wall_clock_ratio = reference.wall_clock_s / candidate.wall_clock_s;
  return metrics;
}

std::string metrics_json(const CompareMetrics& metrics, double w0, double w1) {
  char buf[320];
  if (std::isnan(metrics.wall_clock_ratio)) {
    std::snprintf(buf, sizeof(buf),
                  "{\"mape_p_percent\": %.12g, \"max_abs_dp\": %.12g, "
                  "\"max_abs_dq\": %.12g, \"wall_clock_ratio\": null, "
                  "\"window\": [%.12g, %.12g]}",
                  metrics.mape_p_percent, metrics.max_abs_dp,
                  metrics.max_abs_dq, w0, w1);
  } else {
    std::snprintf(buf, sizeof(buf),
                  "{\"mape_p_percent\": %.12g, \"max_abs_dp\": %.12g, "
                  "\"max_abs_dq\": %.12g, \"wall_clock_ratio\": %.12g, "
                  "\"window\": [%.12g, %.12g]}",
                  metrics.mape_p_percent, metrics.max_abs_dp,
                  metrics.max_abs_dq, metrics.wall_clock_ratio, w0, w1);
  }
  return buf;
}

}  // namespace wfeq
