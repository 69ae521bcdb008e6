#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sedm/milestone.hpp"
#include "sedm/random.hpp"

using namespace sedm;

namespace {

PointCloud cloud_of(const std::vector<std::pair<double, double>>& xy) {
  PointCloud c;
  for (std::size_t i = 0; i < xy.size(); ++i) c.points.push_back({i, xy[i].first, xy[i].second});
  return c;
}

PointCloud normal_cloud(std::size_t n, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({i, 50 + 3 * standard_normal(rng), 40 + 5 * standard_normal(rng)});
  return c;
}

}  // namespace

TEST(Milestone, MatchProgressInterpolatesBothCurves) {
  TrajectoryRecord r;
  r.earned = {ValueMeasure::work_periods, {0, 2, 4, 6}};
  r.actual = {ValueMeasure::work_periods, {0, 1.5, 3, 4}};
  const auto m = match_progress(r, 3.0);
  EXPECT_DOUBLE_EQ(m.time, 1.5);
  EXPECT_DOUBLE_EQ(m.actual, 2.25);
}

TEST(Milestone, CloudNeedsTrajectories) {
  SimulationStore store;
  store.config.store_trajectories = false;
  store.records.resize(3);
  EXPECT_THROW(build_point_cloud(store, 1.0), std::invalid_argument);
}

TEST(Bandwidth, UsesSdWhenItIsTheSmallerSpread) {
  std::vector<double> x(100);
  for (int i = 0; i < 100; ++i) x[i] = i < 50 ? 0.0 : 10.0;
  const double sd = std::sqrt(50 * 25.0 * 2 / 99.0);  // IQR / 1.349 = 7.41 is larger
  EXPECT_NEAR(bandwidth_nrd(x), 4 * 1.06 * sd * std::pow(100.0, -0.2), 1e-12);
}

TEST(Bandwidth, UsesInterquartileRangeWhenSmaller) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 1000};
  // Order-statistic interpolation: Q1 = 3.25, Q3 = 7.75.
  EXPECT_NEAR(bandwidth_nrd(x), 4 * 1.06 * (4.5 / 1.349) * std::pow(10.0, -0.2), 1e-12);
}

TEST(Bandwidth, ConstantSamplesAreDegenerate) {
  const std::vector<double> x(10, 3.0);
  EXPECT_THROW(bandwidth_nrd(x), DegenerateBandwidth);
  EXPECT_THROW(bandwidth_nrd(std::vector<double>{1.0}), DegenerateBandwidth);
}

TEST(Kde, DensityMatchesDirectProductKernelSum) {
  const auto cloud = cloud_of({{1, 2}, {2, 5}, {4, 3}});
  KdeOptions opt;
  opt.bandwidth_time = 2.0;
  opt.bandwidth_actual = 4.0;
  const KdeModel kde(cloud, opt);
  const double st = 0.5, sa = 1.0;
  double expected = 0.0;
  for (const auto& p : cloud.points) {
    const double dt = (2.5 - p.time) / st, da = (3.5 - p.actual) / sa;
    expected += std::exp(-0.5 * (dt * dt + da * da)) / (2 * std::numbers::pi * st * sa);
  }
  expected /= 3.0;
  EXPECT_NEAR(kde.density(2.5, 3.5), expected, 1e-15);
  EXPECT_DOUBLE_EQ(kde_density(kde, 2.5, 3.5), kde.density(2.5, 3.5));
  const auto own = kde.point_densities();
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(own[i], kde.density(cloud.points[i].time, cloud.points[i].actual), 1e-15);
}

TEST(Kde, PercentileIsLowAtCentreAndHighFarAway) {
  const auto cloud = normal_cloud(2000, 5);
  const KdeModel kde(cloud);
  EXPECT_LE(anomaly_percentile(kde, 50, 40), 0.05);
  EXPECT_GE(anomaly_percentile(kde, 50 + 18, 40 - 30), 0.99);
  EXPECT_DOUBLE_EQ(anomaly_percentile(cloud, 50 + 18, 40 - 30), anomaly_percentile(kde, 50 + 18, 40 - 30));
}

TEST(Kde, ObservationOnAPointTiesWithItself) {
  // Three identical clusters: a point's own density ties with its twins, which do not count as exceeding.
  const auto cloud = cloud_of({{0, 0}, {10, 10}, {20, 0}});
  KdeOptions opt;
  opt.bandwidth_time = 1.0;
  opt.bandwidth_actual = 1.0;
  EXPECT_DOUBLE_EQ(anomaly_percentile(KdeModel(cloud, opt), 10, 10), 0.0);
}

TEST(Kde, ConstantAxisFallbacks) {
  const auto flat_time = cloud_of({{5, 1}, {5, 2}, {5, 3}, {5, 4}, {5, 9}});
  EXPECT_DOUBLE_EQ(anomaly_percentile(flat_time, 6, 2), 1.0);  // off the constant axis
  const double on_axis = anomaly_percentile(flat_time, 5, 2.5);
  EXPECT_GE(on_axis, 0.0);
  EXPECT_LE(on_axis, 0.4);
  EXPECT_GE(anomaly_percentile(flat_time, 5, 40), 0.99);
  const auto single = cloud_of({{5, 1}, {5, 1}});
  EXPECT_DOUBLE_EQ(anomaly_percentile(single, 5, 1), 0.0);
  EXPECT_DOUBLE_EQ(anomaly_percentile(single, 5, 2), 1.0);
}

TEST(Kde, CsvOutputs) {
  const auto cloud = cloud_of({{1, 2}, {2, 5}, {4, 3}});
  std::ostringstream c;
  write_cloud_csv(c, cloud);
  EXPECT_EQ(c.str(), "run_id,ad_j,tad_j\n0,1,2\n1,2,5\n2,4,3\n");
  std::ostringstream g;
  write_density_grid_csv(g, KdeModel(cloud), 4);
  const std::string grid = g.str();
  EXPECT_EQ(std::count(grid.begin(), grid.end(), '\n'), 17);
  EXPECT_EQ(grid.rfind("x,y,density\n", 0), 0u);
}
