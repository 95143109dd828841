#ifndef WFEQ_TIMESERIES_HPP_
#define WFEQ_TIMESERIES_HPP_

#include <string>
#include <vector>

namespace wfeq {

/// PCC quantities of one simulation run, sampled on a uniform grid.
/// node_u / unit_p are filled only when recording is requested.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> p_pcc;
  std::vector<double> q_pcc;
  std::vector<double> u_pcc;
  std::vector<std::vector<double>> node_u;   ///< per step: |U| of every unit node
  std::vector<std::vector<double>> unit_p;   ///< per step: active power of every unit
  double wall_clock_s = 0.0;

  std::size_t size() const { return t.size(); }
};

/// CSV round-trip of the PCC columns. Header t,p_pcc,q_pcc,u_pcc; values
/// carry 17 significant digits so doubles survive exactly.
std::string timeseries_csv(const TimeSeries& series);
TimeSeries timeseries_from_csv(const std::string& text);

struct CompareMetrics {
  double mape_p_percent;   ///< mean |dP|/max(|P_ref|, 0.01) over the window, %
  double max_abs_dp;
  double max_abs_dq;
  double wall_clock_ratio; ///< reference time / candidate time; NaN if unknown
};

/// Error metrics of `candidate` against `reference` over t in [w0, w1].
/// Both series must share the sampling grid exactly.
CompareMetrics compare(const TimeSeries& reference, const TimeSeries& candidate,
                       double w0, double w1);

std::string metrics_json(const CompareMetrics& metrics, double w0, double w1);

}  // namespace wfeq

#endif  // WFEQ_TIMESERIES_HPP_
