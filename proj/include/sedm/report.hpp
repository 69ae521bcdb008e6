#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sedm/benchmark.hpp"
#include "sedm/curves.hpp"
#include "sedm/forecast.hpp"
#include "sedm/network.hpp"

namespace sedm {

/// "NA" for a missing value, shortest round-trip text otherwise.
std::string format_optional(const std::optional<double>& value);

void write_schedule_csv(std::ostream& out, const ProjectNetwork& network, const Schedule& schedule);

/// method,control_time,edac,p_delay,anomaly_percentile
void write_forecast_csv(std::ostream& out, const MapeReport& report);
void write_forecast_row(std::ostream& out, const ForecastResult& forecast);
inline constexpr const char* kForecastHeader = "method,control_time,edac,p_delay,anomaly_percentile";

/// method,mape
void write_mape_csv(std::ostream& out, const MapeReport& report);

/// percent,control_time and one EDAC column per method.
void write_checkpoint_csv(std::ostream& out, const MapeReport& report);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<double> reference_y;  // dashed horizontal line (e.g. RD)
  std::string reference_label;
};

/// One <polyline> per series with exactly one point per data row.
void write_line_chart_svg(std::ostream& out, const LineChart& chart);

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> labels;
  std::vector<double> values;
};

void write_bar_chart_svg(std::ostream& out, const BarChart& chart);

/// EDAC against control time, one line per method, RD as reference.
void write_edac_svg(std::ostream& out, const MapeReport& report);
/// MAPE per method.
void write_mape_svg(std::ostream& out, const MapeReport& report);

}  // namespace sedm
