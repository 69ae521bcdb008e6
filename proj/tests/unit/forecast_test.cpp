#include <gtest/gtest.h>

#include <cmath>

#include "sedm/benchmark.hpp"
#include "sedm/forecast.hpp"
#include "sedm/project_io.hpp"

using namespace sedm;

namespace {

const std::string kData = SEDM_DATA_DIR;

struct Tracked {
  ProjectNetwork network;
  Schedule schedule;
  TrackingLog log;
};

Tracked sampled_execution(const std::string& file, std::uint64_t seed) {
  Tracked t{load_project(kData + "/" + file), {}, {}};
  const auto r = sample_realization(t.network, seed, 0);
  t.schedule = forward_pass(t.network, r.durations);
  t.log = TrackingLog::from_execution(t.network, r.durations, t.schedule);
  return t;
}

}  // namespace

TEST(Mape, WorkedExamples) {
  EXPECT_DOUBLE_EQ(mape(100.0, std::vector<double>{90.0, 110.0}), 10.0);
  EXPECT_DOUBLE_EQ(mape(126.0, std::vector<double>{126.0, 126.0, 126.0}), 0.0);
  EXPECT_NEAR(mape(130.0, std::vector<double>{126.0, 133.0}), 100.0 * (4.0 / 130 + 3.0 / 130) / 2, 1e-12);
  EXPECT_THROW(mape(0.0, std::vector<double>{1.0}), std::invalid_argument);
  EXPECT_THROW(mape(10.0, std::vector<double>{}), std::invalid_argument);
}

TEST(Methods, Parsing) {
  EXPECT_EQ(parse_methods("esm, sedm"), (std::vector<Method>{Method::esm, Method::sedm}));
  EXPECT_EQ(parse_methods("SEVM,sevm"), (std::vector<Method>{Method::sevm}));
  EXPECT_THROW(parse_methods("esm,foo"), std::invalid_argument);
  EXPECT_EQ(to_string(Method::sedm), "SEDM");
}

TEST(Forecast, DeterministicProjectNeedsNoModels) {
  const auto t = sampled_execution("serial_fixed.yaml", 1);
  RunConfig c;
  c.n_runs = 200;
  const auto store = run_simulation(t.network, c);
  const auto snap = take_snapshot(t.network, t.log, 5, ValueMeasure::work_periods);
  const auto f = sedm_forecast(snap, store);
  EXPECT_EQ(f.basis, "single-class");
  EXPECT_DOUBLE_EQ(*f.p_delay, 0.0);
  EXPECT_DOUBLE_EQ(f.edac, 13.0);
  EXPECT_FALSE(f.classifier.has_value());
  EXPECT_DOUBLE_EQ(esm_forecast(snap).edac, 13.0);
}

TEST(Forecast, StochasticForecastIsCoherentAndReproducible) {
  const auto t = sampled_execution("residential13.yaml", 3);
  RunConfig c;
  c.n_runs = 800;
  c.master_seed = 3;
  const auto store = run_simulation(t.network, c);
  const auto snap = take_snapshot(t.network, t.log, 60, ValueMeasure::work_periods);
  ForecastOptions opt;
  opt.seed = 9;
  const auto a = sedm_forecast(snap, store, opt);
  const auto b = sedm_forecast(snap, store, opt);
  EXPECT_EQ(a.basis, "models");
  EXPECT_EQ(a.edac, a.bpd + a.expected_deviation);
  EXPECT_EQ(a.edac, b.edac);
  EXPECT_EQ(a.p_delay, b.p_delay);
  ASSERT_TRUE(a.p_delay.has_value());
  EXPECT_GE(*a.p_delay, 0.0);
  EXPECT_LE(*a.p_delay, 1.0);
  ASSERT_TRUE(a.anomaly_percentile.has_value());
  ASSERT_TRUE(a.classifier && a.regressor);
  EXPECT_EQ(a.classifier->cv.results.size(), 3u);
  EXPECT_EQ(a.regressor->cv.results.size(), 4u);
  EXPECT_EQ(a.regressor->holdout.size(), 3u);
  EXPECT_DOUBLE_EQ(a.observed.time, 60.0);
}

TEST(Forecast, FinishedProjectReportsObservedDuration) {
  const auto t = sampled_execution("residential13.yaml", 4);
  RunConfig c;
  c.n_runs = 100;
  const auto store = run_simulation(t.network, c);
  const int n = *t.log.completion_period();
  const auto snap = take_snapshot(t.network, t.log, n, ValueMeasure::work_periods);
  const auto f = sedm_forecast(snap, store);
  EXPECT_EQ(f.basis, "observed");
  EXPECT_NEAR(f.edac, t.schedule.project_duration, 1e-9);
  EXPECT_NEAR(esm_forecast(snap).edac, t.schedule.project_duration, 1e-9);
}

TEST(Forecast, RejectsMismatchedStores) {
  const auto t = sampled_execution("residential13.yaml", 5);
  const auto other = load_project(kData + "/chain3_discrete.yaml");
  RunConfig c;
  c.n_runs = 50;
  const auto foreign = run_simulation(other, c);
  const auto snap = take_snapshot(t.network, t.log, 20, ValueMeasure::work_periods);
  EXPECT_THROW(sedm_forecast(snap, foreign), FingerprintMismatch);
  c.value_measure = ValueMeasure::cost;
  const auto cost_store = run_simulation(t.network, c);
  EXPECT_THROW(sedm_forecast(snap, cost_store), std::invalid_argument);
  EXPECT_THROW(sevm_forecast(snap, cost_store), std::invalid_argument);
  c.value_measure = ValueMeasure::work_periods;
  c.store_trajectories = false;
  EXPECT_THROW(sedm_forecast(snap, run_simulation(t.network, c)), std::invalid_argument);
}

TEST(Benchmark, CheckpointPeriodsRound) {
  EXPECT_EQ(checkpoint_period(0, 131), 0);
  EXPECT_EQ(checkpoint_period(10, 131), 13);
  EXPECT_EQ(checkpoint_period(50, 131), 66);
  EXPECT_EQ(checkpoint_period(100, 131), 131);
  EXPECT_THROW(checkpoint_period(120, 131), std::invalid_argument);
}

TEST(Benchmark, DeterministicProjectHasZeroError) {
  const auto t = sampled_execution("serial_fixed.yaml", 1);
  BenchmarkConfig config;
  config.run.n_runs = 100;
  const auto report = run_benchmark(t.network, t.log, 13.0, config);
  ASSERT_EQ(report.series.size(), 3u);
  EXPECT_EQ(report.control_times.size(), 14u);
  for (const auto& s : report.series) {
    EXPECT_EQ(s.forecasts.size(), 14u);
    EXPECT_DOUBLE_EQ(s.mape, 0.0) << to_string(s.method);
  }
  EXPECT_EQ(report.checkpoints.size(), 11u);
  EXPECT_EQ(report.checkpoints[5].control_time, 7);
}

TEST(Benchmark, MapeAveragesControlTimesAfterStart) {
  const auto t = sampled_execution("residential13.yaml", 12);
  BenchmarkConfig config;
  config.methods = {Method::esm};
  const double rd = t.schedule.project_duration;
  const auto report = run_benchmark(t.network, t.log, rd, config);
  const auto& esm = report.method(Method::esm);
  std::vector<double> edac;
  for (std::size_t i = 1; i < esm.forecasts.size(); ++i) edac.push_back(esm.forecasts[i].edac);
  EXPECT_DOUBLE_EQ(esm.mape, mape(rd, edac));
  EXPECT_DOUBLE_EQ(esm.forecasts[0].edac, 126.0);
  EXPECT_THROW(report.method(Method::sedm), std::invalid_argument);
  EXPECT_EQ(esm_measure(t.network), ValueMeasure::cost);
}

TEST(Benchmark, NeedsAFinishedLog) {
  const auto t = sampled_execution("residential13.yaml", 13);
  const auto periods = t.log.to_periods(t.network);
  const TrackingLog partial(t.network, std::vector<TrackingPeriod>(periods.begin(), periods.begin() + 5));
  BenchmarkConfig config;
  config.methods = {Method::esm};
  EXPECT_THROW(run_benchmark(t.network, partial, 130.0, config), std::invalid_argument);
}
