#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sedm/network.hpp"

namespace sedm {

/// What a cumulative curve counts: planned work periods (EDM) or money (EVM).
enum class ValueMeasure { work_periods, cost };

std::string to_string(ValueMeasure measure);
ValueMeasure parse_measure(std::string_view text);

/// Non-decreasing cumulative series sampled at integer periods 0..T, value(0) = 0.
/// Between samples the curve is linear.
struct CumulativeCurve {
  ValueMeasure measure = ValueMeasure::work_periods;
  std::vector<double> values;

  int horizon() const { return values.empty() ? 0 : static_cast<int>(values.size()) - 1; }
  double final_value() const { return values.empty() ? 0.0 : values.back(); }

  /// Linear interpolation at real time t, clamped to [0, T].
  double value_at(double t) const;

  bool operator==(const CumulativeCurve&) const = default;
};

/// Per-activity value of one planned period: 1 for work periods, the cost rate for cost.
/// Throws std::invalid_argument when a cost rate is missing.
std::vector<double> period_weights(const ProjectNetwork& network, ValueMeasure measure);

/// TPD (work periods) or PV (cost) curve of the baseline schedule.
CumulativeCurve planned_curve(const ProjectNetwork& network, const Schedule& baseline, ValueMeasure measure);

struct RealizedCurves {
  CumulativeCurve earned;  // TED or EV
  CumulativeCurve actual;  // TAD or AC
};

/// Earned and actual curves of one execution with the given real durations.
///
/// Work is accounted by overlap with each unit period, so the last partial
/// period of an activity contributes its fraction. Each period an activity
/// works earns PD_i / AD_i per unit of time; a finished activity contributes
/// exactly its planned value. Curves run to T = ceil(project duration).
RealizedCurves realized_curves(const ProjectNetwork& network, const std::vector<double>& durations,
                               const Schedule& schedule, ValueMeasure measure);

/// Progress reported for one activity in one control period.
struct ActivityProgress {
  std::string activity_id;
  double worked = 0.0;      // fraction of the period spent on the activity, in [0, 1]
  double completion = 0.0;  // cumulative completion fraction after the period
};

struct TrackingPeriod {
  int period = 0;
  std::vector<ActivityProgress> entries;
};

/// Dense per-period progress of an underway (or finished) project.
///
/// Activities not listed in a period keep their previous completion and did
/// not work. Period 0 is the project start with nothing done.
class TrackingLog {
public:
  TrackingLog() = default;

  /// Resolves and checks sparse per-period entries against the network.
  /// Periods must be numbered 1, 2, ... without gaps.
  TrackingLog(const ProjectNetwork& network, const std::vector<TrackingPeriod>& periods,
              std::optional<double> actual_finish = std::nullopt);

  /// Uniform-progress log of an execution with known durations.
  static TrackingLog from_execution(const ProjectNetwork& network, const std::vector<double>& durations,
                                    const Schedule& schedule);

  int periods() const { return static_cast<int>(completion_.size()) - 1; }
  std::size_t activity_count() const { return activity_count_; }
  double worked(int period, std::size_t activity) const { return worked_[period][activity]; }
  double completion(int period, std::size_t activity) const { return completion_[period][activity]; }

  bool complete_at(int period) const;
  std::optional<int> completion_period() const;

  /// Actual finish time when the project is complete; falls back to the completion period.
  std::optional<double> finish_time() const;

  /// Sparse representation, suitable for writing a tracking file.
  std::vector<TrackingPeriod> to_periods(const ProjectNetwork& network) const;

private:
  std::size_t activity_count_ = 0;
  std::vector<std::vector<double>> worked_;
  std::vector<std::vector<double>> completion_;
  std::optional<double> actual_finish_;
};

/// TED(p) = sum PD_i * pc_i(p) and TAD(p) = cumulative worked periods, both
/// weighted by the measure, for p = 0..latest tracked period.
RealizedCurves tracking_curves(const ProjectNetwork& network, const TrackingLog& log, ValueMeasure measure);

/// Time at which `curve` reaches `earned_value`, by linear interpolation
/// inside the last segment starting at or below the value. Flat segments are
/// skipped forward. Returns T for the final value.
double earned_time(const CumulativeCurve& curve, double earned_value);

/// Project progress index ED(t) / BPD.
double ppi(double earned_time, double bpd);

/// Earned schedule duration forecast AD + (BPD - ES) / SPI(t), with SPI(t) = ES / AD.
/// Falls back to BPD before any progress.
double esm_forecast(double actual_time, double earned_schedule, double bpd);

/// State of the tracked project at control period AD.
struct ControlSnapshot {
  ValueMeasure measure = ValueMeasure::work_periods;
  int actual_time = 0;          // AD
  double actual_value = 0.0;    // TAD_AD (or AC)
  double earned_value = 0.0;    // TED_AD (or EV)
  double earned_time = 0.0;     // ED(t) (or ES)
  double ppi = 0.0;
  double bpd = 0.0;
  double planned_total = 0.0;   // TPD_final (or BAC)
  bool complete = false;
  double finish_time = 0.0;     // valid when complete
  std::uint64_t fingerprint = 0;
};

ControlSnapshot take_snapshot(const ProjectNetwork& network, const TrackingLog& log, int actual_time,
                              ValueMeasure measure);

/// "# measure: <measure>" line followed by a period,value table.
void write_curve_csv(std::ostream& out, const CumulativeCurve& curve);
CumulativeCurve read_curve_csv(std::istream& in);

}  // namespace sedm
