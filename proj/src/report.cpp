#include "sedm/report.hpp"

#include <ostream>

#include "sedm/text.hpp"

namespace sedm {

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
  return quoted + '"';
}

}  // namespace

std::string format_optional(const std::optional<double>& value) { return value ? format_number(*value) : "NA"; }

void write_schedule_csv(std::ostream& out, const ProjectNetwork& network, const Schedule& schedule) {
  out << "id,name,pd,start,finish\n";
  for (std::size_t i = 0; i < network.size(); ++i) {
    const auto& a = network[i];
    out << csv_field(a.id) << ',' << csv_field(a.name) << ',' << format_number(a.planned_duration) << ',' << format_number(schedule.start[i]) << ','
        << format_number(schedule.finish[i]) << '\n';
  }
}

void write_forecast_row(std::ostream& out, const ForecastResult& f) {
  out << to_string(f.method) << ',' << f.control_time << ',' << format_number(f.edac) << ',' << format_optional(f.p_delay)
      << ',' << format_optional(f.anomaly_percentile) << '\n';
}

void write_forecast_csv(std::ostream& out, const MapeReport& report) {
  out << kForecastHeader << '\n';
  for (const auto& s : report.series)
    for (const auto& f : s.forecasts) write_forecast_row(out, f);
}

void write_mape_csv(std::ostream& out, const MapeReport& report) {
  out << "method,mape\n";
  for (const auto& s : report.series) out << to_string(s.method) << ',' << format_fixed(s.mape, 6) << '\n';
}

void write_checkpoint_csv(std::ostream& out, const MapeReport& report) {
  out << "percent,control_time";
  for (const auto& s : report.series) out << ',' << to_string(s.method);
  out << '\n';
  for (const auto& row : report.checkpoints) {
    out << format_number(row.percent) << ',' << row.control_time;
    for (double e : row.edac) out << ',' << format_fixed(e, 2);
    out << '\n';
  }
}

}  // namespace sedm
