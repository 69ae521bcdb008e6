#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "sedm/montecarlo.hpp"
#include "sedm/project_io.hpp"

using namespace sedm;

namespace {

const std::string kData = SEDM_DATA_DIR;

double triangular_cdf(double x, double a, double m, double b) {
  if (x <= m) return (x - a) * (x - a) / ((b - a) * (m - a));
  return 1.0 - (b - x) * (b - x) / ((b - a) * (b - m));
}

double normal_cdf(double x, double mean, double sd) { return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0))); }

}  // namespace

TEST(Sampling, TriangularInverseMatchesCdf) {
  const Triangular t{7.8, 10.0, 12.2};
  EXPECT_DOUBLE_EQ(sample_duration(t, 0.0), 7.8);
  EXPECT_NEAR(sample_duration(t, 0.5), 10.0, 1e-12);
  for (double u : {0.01, 0.2, 0.37, 0.5, 0.73, 0.99}) EXPECT_NEAR(triangular_cdf(sample_duration(t, u), 7.8, 10.0, 12.2), u, 1e-12);
  const Triangular skew{2, 3, 9};
  for (double u : {0.05, 0.142857, 0.5, 0.95}) EXPECT_NEAR(triangular_cdf(sample_duration(skew, u), 2, 3, 9), u, 1e-12);
}

TEST(Sampling, UniformAndDiscrete) {
  EXPECT_DOUBLE_EQ(sample_duration(Uniform{2, 6}, 0.25), 3.0);
  const Discrete d{{{2, 0.5}, {4, 0.3}, {7, 0.2}}};
  EXPECT_EQ(sample_duration(d, 0.0), 2);
  EXPECT_EQ(sample_duration(d, 0.49), 2);
  EXPECT_EQ(sample_duration(d, 0.5), 4);
  EXPECT_EQ(sample_duration(d, 0.79), 4);
  EXPECT_EQ(sample_duration(d, 0.8), 7);
  EXPECT_EQ(sample_duration(d, 0.999999), 7);
}

TEST(Sampling, NormalInverseMatchesCdfAndRespectsFloor) {
  const TruncatedNormal n{20.0, 3.0};
  EXPECT_NEAR(sample_duration(n, 0.5), 20.0, 1e-9);
  EXPECT_NEAR(sample_duration(n, 0.975), 20.0 + 1.959963984540054 * 3.0, 1e-9);
  for (double u : {0.001, 0.1, 0.6, 0.9}) EXPECT_NEAR(normal_cdf(sample_duration(n, u), 20.0, 3.0), u, 1e-10);
  // Mostly below zero: every draw stays at or above the floor.
  const TruncatedNormal wide{0.5, 5.0};
  for (double u : {0.0, 0.1, 0.5, 0.99}) EXPECT_GE(sample_duration(wide, u), kNormalFloor);
}

TEST(Outcome, OnPlanIsNotLate) {
  const auto o = classify_outcome(126.0, 141.0, 126.0, 141.0);
  EXPECT_EQ(o.delay_flag, 0);
  EXPECT_EQ(o.overwork_flag, 0);
  EXPECT_DOUBLE_EQ(o.delay_amount, 0.0);
  const auto late = classify_outcome(130.0, 139.0, 126.0, 141.0);
  EXPECT_EQ(late.delay_flag, 1);
  EXPECT_EQ(late.overwork_flag, 0);
  EXPECT_DOUBLE_EQ(late.delay_amount, 4.0);
  EXPECT_DOUBLE_EQ(late.overwork_amount, -2.0);
}

TEST(Simulation, RejectsZeroRuns) {
  RunConfig c;
  c.n_runs = 0;
  EXPECT_THROW(check_config(c), std::invalid_argument);
}

TEST(Simulation, FixedDurationsGiveThePlanEveryRun) {
  const auto net = load_project(kData + "/serial_fixed.yaml");
  RunConfig c;
  c.n_runs = 50;
  c.master_seed = 1;
  const auto store = run_simulation(net, c);
  EXPECT_DOUBLE_EQ(store.bpd, 13.0);
  EXPECT_DOUBLE_EQ(store.tpd_final, 13.0);
  for (const auto& r : store.records) {
    EXPECT_DOUBLE_EQ(r.afd, 13.0);
    EXPECT_DOUBLE_EQ(r.tad_final, 13.0);
    EXPECT_EQ(r.outcome.delay_flag, 0);
    EXPECT_EQ(r.earned.values.size(), 14u);
  }
}

TEST(Simulation, CostStoreEndsAtBudget) {
  const auto net = load_project(kData + "/serial_fixed.yaml");
  RunConfig c;
  c.n_runs = 5;
  c.value_measure = ValueMeasure::cost;
  const auto store = run_simulation(net, c);
  EXPECT_DOUBLE_EQ(store.tpd_final, 4 * 500.0 + 6 * 800.0 + 3 * 300.0);
  for (const auto& r : store.records) EXPECT_NEAR(r.earned.final_value(), store.tpd_final, 1e-9);
}

TEST(Simulation, RealizationIsPerRunSubstream) {
  const auto net = load_project(kData + "/residential13.yaml");
  const auto a = sample_realization(net, 11, 5), b = sample_realization(net, 11, 5), c = sample_realization(net, 11, 6);
  EXPECT_EQ(a.durations, b.durations);
  EXPECT_NE(a.durations, c.durations);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& t = std::get<Triangular>(net[i].distribution);
    EXPECT_GE(a.durations[i], t.optimistic);
    EXPECT_LE(a.durations[i], t.pessimistic);
  }
}

TEST(Simulation, IndependentOfThreadCount) {
  const auto net = load_project(kData + "/residential13.yaml");
  RunConfig c;
  c.n_runs = 300;
  c.master_seed = 77;
  EXPECT_EQ(run_simulation(net, c, 1), run_simulation(net, c, 3));
}

TEST(Store, RoundTripsExactly) {
  const auto net = load_project(kData + "/residential13.yaml");
  RunConfig c;
  c.n_runs = 40;
  c.master_seed = 3;
  const auto store = run_simulation(net, c);
  std::stringstream buf;
  write_store(buf, store);
  const auto back = read_store(buf);
  EXPECT_EQ(back, store);

  const auto path = std::filesystem::temp_directory_path() / "sedm_store_roundtrip.store";
  save_store(store, path);
  EXPECT_EQ(load_store(path, net), store);
  const auto other = load_project(kData + "/serial_fixed.yaml");
  EXPECT_THROW(load_store(path, other), FingerprintMismatch);
  std::filesystem::remove(path);
}

TEST(Store, SummaryOnlyStoreRoundTrips) {
  const auto net = load_project(kData + "/chain3_discrete.yaml");
  RunConfig c;
  c.n_runs = 25;
  c.store_trajectories = false;
  const auto store = run_simulation(net, c);
  EXPECT_FALSE(store.has_trajectories());
  std::stringstream buf;
  write_store(buf, store);
  EXPECT_EQ(read_store(buf), store);
}

TEST(Store, RejectsMalformedInput) {
  std::stringstream junk("not a store\n1,2,3\n");
  EXPECT_THROW(read_store(junk), StoreFormatError);

  const auto net = load_project(kData + "/chain3_discrete.yaml");
  RunConfig c;
  c.n_runs = 3;
  std::stringstream buf;
  write_store(buf, run_simulation(net, c));
  std::string text = buf.str();
  text.resize(text.size() / 2);  // truncated file
  std::stringstream cut(text);
  EXPECT_THROW(read_store(cut), StoreFormatError);
}
