#include <gtest/gtest.h>

#include <sstream>

#include "sedm/curves.hpp"
#include "sedm/project_io.hpp"

using namespace sedm;

namespace {

const std::string kData = SEDM_DATA_DIR;

Activity single(int pd, std::optional<double> cost = std::nullopt) {
  Activity a;
  a.id = "A";
  a.planned_duration = pd;
  a.distribution = Uniform{1, 5};
  a.cost_per_period = cost;
  return a;
}

}  // namespace

TEST(Curves, PlannedCurveOfSerialChain) {
  const auto net = load_project(kData + "/serial_fixed.yaml");
  const auto base = baseline_schedule(net);
  const auto tpd = planned_curve(net, base, ValueMeasure::work_periods);
  ASSERT_EQ(tpd.horizon(), 13);
  for (int t = 0; t <= 13; ++t) EXPECT_DOUBLE_EQ(tpd.values[t], t);
  const auto pv = planned_curve(net, base, ValueMeasure::cost);
  EXPECT_DOUBLE_EQ(pv.values[4], 2000.0);
  EXPECT_DOUBLE_EQ(pv.values[5], 2800.0);
  EXPECT_DOUBLE_EQ(pv.final_value(), 7700.0);
}

TEST(Curves, MissingCostRateIsRejected) {
  ProjectNetwork net({single(3)});
  EXPECT_THROW(period_weights(net, ValueMeasure::cost), std::invalid_argument);
  EXPECT_EQ(period_weights(net, ValueMeasure::work_periods), std::vector<double>{1.0});
}

TEST(Curves, RealizedCurvesCountFractionalLastPeriod) {
  ProjectNetwork net({single(2)});
  const std::vector<double> d{2.5};
  const auto curves = realized_curves(net, d, forward_pass(net, d), ValueMeasure::work_periods);
  EXPECT_EQ(curves.actual.values, (std::vector<double>{0.0, 1.0, 2.0, 2.5}));
  ASSERT_EQ(curves.earned.values.size(), 4u);
  EXPECT_NEAR(curves.earned.values[1], 0.8, 1e-12);
  EXPECT_NEAR(curves.earned.values[2], 1.6, 1e-12);
  EXPECT_DOUBLE_EQ(curves.earned.values[3], 2.0);
}

TEST(Curves, ValueAtInterpolatesAndClamps) {
  CumulativeCurve c{ValueMeasure::work_periods, {0, 2, 2, 6}};
  EXPECT_DOUBLE_EQ(c.value_at(0.5), 1.0);
  EXPECT_DOUBLE_EQ(c.value_at(2.25), 3.0);
  EXPECT_DOUBLE_EQ(c.value_at(-1), 0.0);
  EXPECT_DOUBLE_EQ(c.value_at(10), 6.0);
}

TEST(Curves, EarnedTimeSkipsFlatSegments) {
  CumulativeCurve c{ValueMeasure::work_periods, {0, 2, 2, 6}};
  EXPECT_DOUBLE_EQ(earned_time(c, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(earned_time(c, 2.0), 2.0);  // end of the flat stretch
  EXPECT_DOUBLE_EQ(earned_time(c, 4.0), 2.5);
  EXPECT_DOUBLE_EQ(earned_time(c, 6.0), 3.0);
  EXPECT_DOUBLE_EQ(earned_time(c, 0.0), 0.0);
}

TEST(Curves, EarnedScheduleForecast) {
  EXPECT_DOUBLE_EQ(esm_forecast(10.0, 8.0, 20.0), 25.0);  // SPI 0.8
  EXPECT_DOUBLE_EQ(esm_forecast(10.0, 10.0, 20.0), 20.0);
  EXPECT_DOUBLE_EQ(esm_forecast(0.0, 0.0, 20.0), 20.0);
  EXPECT_DOUBLE_EQ(ppi(63.0, 126.0), 0.5);
}

TEST(Tracking, ExecutionLogReproducesRealizedCurves) {
  const auto net = load_project(kData + "/residential13.yaml");
  std::vector<double> d;
  for (const auto& a : net.activities()) d.push_back(a.planned_duration * 1.07);
  const auto schedule = forward_pass(net, d);
  const auto log = TrackingLog::from_execution(net, d, schedule);
  ASSERT_TRUE(log.completion_period().has_value());
  EXPECT_EQ(*log.completion_period(), static_cast<int>(std::ceil(schedule.project_duration)));
  EXPECT_NEAR(*log.finish_time(), schedule.project_duration, 1e-9);
  for (auto m : {ValueMeasure::work_periods, ValueMeasure::cost}) {
    const auto direct = realized_curves(net, d, schedule, m);
    const auto tracked = tracking_curves(net, log, m);
    ASSERT_EQ(direct.earned.values.size(), tracked.earned.values.size());
    for (std::size_t p = 0; p < direct.earned.values.size(); ++p) {
      EXPECT_NEAR(direct.earned.values[p], tracked.earned.values[p], 1e-6 * (1 + direct.earned.values[p]));
      EXPECT_NEAR(direct.actual.values[p], tracked.actual.values[p], 1e-6 * (1 + direct.actual.values[p]));
    }
  }
}

TEST(Tracking, RejectsInconsistentEntries) {
  ProjectNetwork net({single(2)});
  auto make = [&](std::vector<TrackingPeriod> periods) { return TrackingLog(net, periods); };
  EXPECT_THROW(make({{2, {{"A", 1.0, 0.5}}}}), std::invalid_argument);            // gap
  EXPECT_THROW(make({{1, {{"B", 1.0, 0.5}}}}), std::invalid_argument);            // unknown id
  EXPECT_THROW(make({{1, {{"A", 1.0, 0.6}}}, {2, {{"A", 1.0, 0.4}}}}), std::invalid_argument);  // decreasing
  EXPECT_THROW(make({{1, {{"A", 0.0, 0.4}}}}), std::invalid_argument);            // progress without work
  EXPECT_THROW(make({{1, {{"A", 1.5, 0.4}}}}), std::invalid_argument);            // worked > 1
  const auto ok = make({{1, {{"A", 1.0, 0.5}}}, {2, {{"A", 1.0, 1.0}}}});
  EXPECT_TRUE(ok.complete_at(2));
  EXPECT_FALSE(ok.complete_at(1));
}

TEST(Tracking, SnapshotReadsEarnedAndActual) {
  ProjectNetwork net({single(4)});
  const TrackingLog log(net, {{1, {{"A", 1.0, 0.2}}}, {2, {{"A", 1.0, 0.4}}}});
  const auto s = take_snapshot(net, log, 2, ValueMeasure::work_periods);
  EXPECT_EQ(s.actual_time, 2);
  EXPECT_DOUBLE_EQ(s.actual_value, 2.0);
  EXPECT_NEAR(s.earned_value, 1.6, 1e-12);
  EXPECT_NEAR(s.earned_time, 1.6, 1e-12);
  EXPECT_DOUBLE_EQ(s.bpd, 4.0);
  EXPECT_NEAR(s.ppi, 0.4, 1e-12);
  EXPECT_FALSE(s.complete);
  EXPECT_THROW(take_snapshot(net, log, 3, ValueMeasure::work_periods), std::exception);
}

TEST(Curves, CsvRoundTrip) {
  CumulativeCurve c{ValueMeasure::cost, {0, 1.25, 3.5, 1e-3 + 7}};
  std::stringstream buf;
  write_curve_csv(buf, c);
  EXPECT_EQ(read_curve_csv(buf), c);
  EXPECT_EQ(parse_measure("cost"), ValueMeasure::cost);
  EXPECT_THROW(parse_measure("apples"), std::exception);
}
