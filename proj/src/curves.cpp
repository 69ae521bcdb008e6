#include "sedm/curves.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sedm/text.hpp"

namespace sedm {

std::string to_string(ValueMeasure measure) {
  return measure == ValueMeasure::cost ? "cost" : "work-periods";
}

ValueMeasure parse_measure(std::string_view text) {
  if (text == "work-periods") return ValueMeasure::work_periods;
  if (text == "cost") return ValueMeasure::cost;
  throw std::invalid_argument("unknown value measure '" + std::string(text) + "'");
}

double CumulativeCurve::value_at(double t) const {
  if (values.empty()) return 0.0;
  const int last = horizon();
  if (!(t > 0.0)) return values.front();
  if (t >= last) return values.back();
  const int i = static_cast<int>(std::floor(t));
  const double frac = t - i;
  if (frac == 0.0) return values[i];
  return values[i] + frac * (values[i + 1] - values[i]);
}

std::vector<double> period_weights(const ProjectNetwork& network, ValueMeasure measure) {
  std::vector<double> weights(network.size(), 1.0);
  if (measure == ValueMeasure::work_periods) return weights;
  for (std::size_t i = 0; i < network.size(); ++i) {
    const auto& cost = network[i].cost_per_period;
    if (!cost) throw std::invalid_argument("activity '" + network[i].id + "' has no cost_per_period");
    weights[i] = *cost;
  }
  return weights;
}

CumulativeCurve planned_curve(const ProjectNetwork& network, const Schedule& baseline, ValueMeasure measure) {
  const auto weights = period_weights(network, measure);
  const int horizon = static_cast<int>(std::ceil(baseline.project_duration));
  CumulativeCurve curve{measure, std::vector<double>(horizon + 1, 0.0)};
  for (int p = 1; p <= horizon; ++p) {
    double total = 0.0;
    for (std::size_t i = 0; i < network.size(); ++i) {
      const double done = std::clamp(p - baseline.start[i], 0.0, static_cast<double>(network[i].planned_duration));
      total += weights[i] * done;
    }
    curve.values[p] = total;
  }
  return curve;
}

RealizedCurves realized_curves(const ProjectNetwork& network, const std::vector<double>& durations,
                               const Schedule& schedule, ValueMeasure measure) {
  if (durations.size() != network.size()) throw std::invalid_argument("realized_curves: one duration per activity");
  const auto weights = period_weights(network, measure);
  const int horizon = std::max(1, static_cast<int>(std::ceil(schedule.project_duration)));
  RealizedCurves out{{measure, std::vector<double>(horizon + 1, 0.0)}, {measure, std::vector<double>(horizon + 1, 0.0)}};
  for (int p = 1; p <= horizon; ++p) {
    double earned = 0.0;
    double actual = 0.0;
    for (std::size_t i = 0; i < network.size(); ++i) {
      const double value = weights[i] * network[i].planned_duration;
      if (p >= schedule.finish[i]) {
        earned += value;
        actual += weights[i] * durations[i];
      } else {
        const double elapsed = std::clamp(p - schedule.start[i], 0.0, durations[i]);
        earned += value * (elapsed / durations[i]);
        actual += weights[i] * elapsed;
      }
    }
    out.earned.values[p] = earned;
    out.actual.values[p] = actual;
  }
  return out;
}

TrackingLog::TrackingLog(const ProjectNetwork& network, const std::vector<TrackingPeriod>& periods,
                         std::optional<double> actual_finish)
    : activity_count_(network.size()), actual_finish_(actual_finish) {
  const std::size_t n = network.size();
  worked_.assign(1, std::vector<double>(n, 0.0));
  completion_.assign(1, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < periods.size(); ++k) {
    const auto& period = periods[k];
    const std::string where = "tracking period " + std::to_string(period.period);
    if (period.period != static_cast<int>(k) + 1)
      throw std::invalid_argument(where + ": periods must be numbered consecutively from 1");
    std::vector<double> worked(n, 0.0);
    std::vector<double> completion = completion_.back();
    std::vector<bool> listed(n, false);
    for (const auto& entry : period.entries) {
      auto idx = network.index_of(entry.activity_id);
      if (!idx) throw std::invalid_argument(where + ": unknown activity '" + entry.activity_id + "'");
      const std::string who = where + ", activity '" + entry.activity_id + "'";
      if (listed[*idx]) throw std::invalid_argument(who + ": listed twice");
      listed[*idx] = true;
      if (!(entry.worked >= 0.0 && entry.worked <= 1.0)) throw std::invalid_argument(who + ": worked must lie in [0, 1]");
      if (!(entry.completion >= 0.0 && entry.completion <= 1.0))
        throw std::invalid_argument(who + ": completion must lie in [0, 1]");
      const double previous = completion_.back()[*idx];
      if (entry.completion < previous) throw std::invalid_argument(who + ": completion decreased");
      if (entry.worked > 0.0 && entry.completion == previous)
        throw std::invalid_argument(who + ": active activity with zero completion increment");
      if (entry.worked == 0.0 && entry.completion > previous)
        throw std::invalid_argument(who + ": completion increased without work");
      worked[*idx] = entry.worked;
      completion[*idx] = entry.completion;
    }
    worked_.push_back(std::move(worked));
    completion_.push_back(std::move(completion));
  }
  if (actual_finish_) {
    auto done = completion_period();
    if (!done) throw std::invalid_argument("tracking: actual_finish given but the project never completes");
    if (!(*actual_finish_ > *done - 1 && *actual_finish_ <= *done))
      throw std::invalid_argument("tracking: actual_finish must fall inside the completion period");
  }
}

TrackingLog TrackingLog::from_execution(const ProjectNetwork& network, const std::vector<double>& durations,
                                        const Schedule& schedule) {
  TrackingLog log;
  const std::size_t n = network.size();
  log.activity_count_ = n;
  const int horizon = std::max(1, static_cast<int>(std::ceil(schedule.project_duration)));
  log.worked_.assign(horizon + 1, std::vector<double>(n, 0.0));
  log.completion_.assign(horizon + 1, std::vector<double>(n, 0.0));
  for (int p = 1; p <= horizon; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      const double now = std::clamp(p - schedule.start[i], 0.0, durations[i]);
      const double before = std::clamp(p - 1 - schedule.start[i], 0.0, durations[i]);
      log.worked_[p][i] = now - before;
      log.completion_[p][i] = p >= schedule.finish[i] ? 1.0 : now / durations[i];
    }
  }
  log.actual_finish_ = schedule.project_duration;
  return log;
}

bool TrackingLog::complete_at(int period) const {
  const auto& row = completion_.at(period);
  return std::all_of(row.begin(), row.end(), [](double c) { return c == 1.0; });
}

std::optional<int> TrackingLog::completion_period() const {
  for (int p = 0; p <= periods(); ++p) {
    if (complete_at(p)) return p;
  }
  return std::nullopt;
}

std::optional<double> TrackingLog::finish_time() const {
  if (actual_finish_) return actual_finish_;
  if (auto p = completion_period()) return static_cast<double>(*p);
  return std::nullopt;
}

std::vector<TrackingPeriod> TrackingLog::to_periods(const ProjectNetwork& network) const {
  std::vector<TrackingPeriod> out;
  for (int p = 1; p <= periods(); ++p) {
    TrackingPeriod period{p, {}};
    for (std::size_t i = 0; i < activity_count_; ++i) {
      if (worked_[p][i] > 0.0 || completion_[p][i] != completion_[p - 1][i])
        period.entries.push_back({network[i].id, worked_[p][i], completion_[p][i]});
    }
    out.push_back(std::move(period));
  }
  return out;
}

RealizedCurves tracking_curves(const ProjectNetwork& network, const TrackingLog& log, ValueMeasure measure) {
  if (log.activity_count() != network.size()) throw std::invalid_argument("tracking log does not match the network");
  const auto weights = period_weights(network, measure);
  const int last = log.periods();
  RealizedCurves out{{measure, std::vector<double>(last + 1, 0.0)}, {measure, std::vector<double>(last + 1, 0.0)}};
  double actual = 0.0;
  for (int p = 1; p <= last; ++p) {
    double earned = 0.0;
    for (std::size_t i = 0; i < network.size(); ++i) {
      const double value = weights[i] * network[i].planned_duration;
      earned += value * log.completion(p, i);
      actual += weights[i] * log.worked(p, i);
    }
    out.earned.values[p] = earned;
    out.actual.values[p] = actual;
  }
  return out;
}

double earned_time(const CumulativeCurve& curve, double earned_value) {
  if (curve.values.empty()) throw std::invalid_argument("earned_time: empty curve");
  const double first = curve.values.front();
  const double last = curve.values.back();
  const double slack = 1e-9 * std::max(1.0, std::abs(last));
  if (!(earned_value >= first - slack && earned_value <= last + slack))
    throw std::out_of_range("earned_time: value " + format_number(earned_value) + " outside curve range [" +
                            format_number(first) + ", " + format_number(last) + "]");
  if (earned_value >= last) return curve.horizon();
  if (earned_value < first) earned_value = first;
  // Last period whose value does not exceed the earned value; the next one is strictly larger.
  auto it = std::upper_bound(curve.values.begin(), curve.values.end(), earned_value);
  const auto t = static_cast<std::size_t>(std::distance(curve.values.begin(), it)) - 1;
  const double lo = curve.values[t];
  const double hi = curve.values[t + 1];
  return static_cast<double>(t) + (earned_value - lo) / (hi - lo);
}

double ppi(double earned_time, double bpd) {
  if (!(bpd > 0.0)) throw std::invalid_argument("ppi: baseline planned duration must be positive");
  if (earned_time < 0.0 || earned_time > bpd) throw std::invalid_argument("ppi: earned time outside [0, BPD]");
  return earned_time / bpd;
}

double esm_forecast(double actual_time, double earned_schedule, double bpd) {
  if (actual_time <= 0.0 || earned_schedule <= 0.0) return bpd;
  const double spi_t = earned_schedule / actual_time;
  return actual_time + (bpd - earned_schedule) / spi_t;
}

ControlSnapshot take_snapshot(const ProjectNetwork& network, const TrackingLog& log, int actual_time,
                              ValueMeasure measure) {
  if (actual_time < 0 || actual_time > log.periods())
    throw std::out_of_range("control time " + std::to_string(actual_time) + " outside tracked range [0, " +
                            std::to_string(log.periods()) + "]");
  const auto baseline = baseline_schedule(network);
  const auto planned = planned_curve(network, baseline, measure);
  const auto tracked = tracking_curves(network, log, measure);

  ControlSnapshot s;
  s.measure = measure;
  s.actual_time = actual_time;
  s.actual_value = tracked.actual.values[actual_time];
  s.earned_value = std::min(tracked.earned.values[actual_time], planned.final_value());
  s.earned_time = earned_time(planned, s.earned_value);
  s.bpd = baseline.project_duration;
  s.ppi = ppi(s.earned_time, s.bpd);
  s.planned_total = planned.final_value();
  s.complete = log.complete_at(actual_time);
  if (s.complete) s.finish_time = log.finish_time().value_or(actual_time);
  s.fingerprint = network_fingerprint(network);
  return s;
}

void write_curve_csv(std::ostream& out, const CumulativeCurve& curve) {
  out << "# measure: " << to_string(curve.measure) << '\n' << "period,value\n";
  for (std::size_t p = 0; p < curve.values.size(); ++p) out << p << ',' << format_number(curve.values[p]) << '\n';
}

CumulativeCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# measure: ", 0) != 0)
    throw std::invalid_argument("curve file: missing '# measure:' line");
  CumulativeCurve curve;
  curve.measure = parse_measure(line.substr(11));
  if (!std::getline(in, line) || line != "period,value") throw std::invalid_argument("curve file: missing header row");
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 2) throw std::invalid_argument("curve file: expected 2 fields on row " + std::to_string(row));
    if (parse_integer<int>(fields[0]) != row) throw std::invalid_argument("curve file: periods must be 0, 1, 2, ...");
    curve.values.push_back(parse_number(fields[1]));
    ++row;
  }
  return curve;
}

}  // namespace sedm
