#include "sedm/milestone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "sedm/text.hpp"

namespace sedm {

namespace {

double sample_sd(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

// Quantile with linear interpolation between order statistics (R type 7).
double quantile7(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

bool same_value(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

bool exceeds(double density, double reference) { return density > reference * (1.0 + 1e-10); }

// Percentile for a Gaussian KDE on one axis (used when the other axis is constant).
double percentile_1d(std::span<const double> x, double observed) {
  const double sd = bandwidth_nrd(x) / 4.0;
  const std::size_t n = x.size();
  auto kernel = [sd](double d) { return std::exp(-0.5 * (d / sd) * (d / sd)); };
  std::vector<double> acc(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = kernel(x[i] - x[j]);
      acc[i] += k;
      acc[j] += k;
    }
  }
  double at_observed = 0.0;
  for (double v : x) at_observed += kernel(observed - v);
  const auto count = std::count_if(acc.begin(), acc.end(), [&](double d) { return exceeds(d, at_observed); });
  return static_cast<double>(count) / static_cast<double>(n);
}

}  // namespace

std::vector<double> PointCloud::times() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.time);
  return out;
}

std::vector<double> PointCloud::actuals() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.actual);
  return out;
}

MatchedPoint match_progress(const TrajectoryRecord& trajectory, double earned_target) {
  MatchedPoint m;
  m.time = earned_time(trajectory.earned, earned_target);
  m.actual = trajectory.actual.value_at(m.time);
  return m;
}

PointCloud build_point_cloud(const SimulationStore& store, double earned_target) {
  if (!store.has_trajectories() || store.records.empty())
    throw std::invalid_argument("simulation store was saved without trajectories; cannot build a point cloud");
  PointCloud cloud;
  cloud.measure = store.config.value_measure;
  cloud.earned_target = earned_target;
  cloud.points.reserve(store.records.size());
  for (const auto& r : store.records) {
    const auto m = match_progress(r, earned_target);
    cloud.points.push_back({r.run_id, m.time, m.actual});
  }
  return cloud;
}

double bandwidth_nrd(std::span<const double> samples) {
  if (samples.size() < 2) throw DegenerateBandwidth("bandwidth needs at least two samples; skip the KDE");
  const double sd = sample_sd(samples);
  if (!(sd > 0.0)) throw DegenerateBandwidth("samples have zero spread; skip the KDE for this axis");
  std::vector<double> copy(samples.begin(), samples.end());
  const double iqr = quantile7(copy, 0.75) - quantile7(copy, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.349) : sd;
  return 4.0 * 1.06 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

KdeModel::KdeModel(const PointCloud& cloud, const KdeOptions& options)
    : time_(cloud.times()), actual_(cloud.actuals()) {
  if (time_.empty()) throw std::invalid_argument("KDE needs a nonempty cloud");
  h_time_ = options.bandwidth_time ? *options.bandwidth_time : bandwidth_nrd(time_);
  h_actual_ = options.bandwidth_actual ? *options.bandwidth_actual : bandwidth_nrd(actual_);
  if (!(h_time_ > 0.0) || !(h_actual_ > 0.0)) throw DegenerateBandwidth("bandwidths must be positive");
  if (!(options.kernel_sd_fraction > 0.0)) throw std::invalid_argument("kernel sd fraction must be positive");
  sd_time_ = options.kernel_sd_fraction * h_time_;
  sd_actual_ = options.kernel_sd_fraction * h_actual_;
}

double KdeModel::density(double time, double actual) const {
  const double inv_t = 1.0 / sd_time_;
  const double inv_a = 1.0 / sd_actual_;
  double sum = 0.0;
  for (std::size_t i = 0; i < time_.size(); ++i) {
    const double dt = (time - time_[i]) * inv_t;
    const double da = (actual - actual_[i]) * inv_a;
    sum += std::exp(-0.5 * (dt * dt + da * da));
  }
  const double norm = 1.0 / (2.0 * std::numbers::pi * sd_time_ * sd_actual_);
  return norm * sum / static_cast<double>(time_.size());
}

std::vector<double> KdeModel::point_densities() const {
  const std::size_t n = time_.size();
  const double inv_t = 1.0 / sd_time_;
  const double inv_a = 1.0 / sd_actual_;
  // Kernel values are symmetric, so each pair is evaluated once.
  std::vector<double> acc(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = time_[i], ai = actual_[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dt = (ti - time_[j]) * inv_t;
      const double da = (ai - actual_[j]) * inv_a;
      const double k = std::exp(-0.5 * (dt * dt + da * da));
      acc[i] += k;
      acc[j] += k;
    }
  }
  const double scale = 1.0 / (2.0 * std::numbers::pi * sd_time_ * sd_actual_ * static_cast<double>(n));
  for (double& d : acc) d *= scale;
  return acc;
}

double kde_density(const KdeModel& model, double time, double actual) { return model.density(time, actual); }

double anomaly_percentile(const KdeModel& model, double time, double actual) {
  const double at_observed = model.density(time, actual);
  const auto densities = model.point_densities();
  const auto count = std::count_if(densities.begin(), densities.end(), [&](double d) { return exceeds(d, at_observed); });
  return static_cast<double>(count) / static_cast<double>(densities.size());
}

double anomaly_percentile(const PointCloud& cloud, double time, double actual, const KdeOptions& options) {
  if (cloud.points.empty()) throw std::invalid_argument("anomaly percentile needs a nonempty cloud");
  const auto t = cloud.times();
  const auto a = cloud.actuals();
  const bool flat_t = !options.bandwidth_time && constant(t);
  const bool flat_a = !options.bandwidth_actual && constant(a);
  if (!flat_t && !flat_a) return anomaly_percentile(KdeModel(cloud, options), time, actual);
  if ((flat_t && !same_value(time, t.front())) || (flat_a && !same_value(actual, a.front()))) return 1.0;
  if (flat_t && flat_a) return 0.0;
  return flat_t ? percentile_1d(a, actual) : percentile_1d(t, time);
}

void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  out << "run_id,ad_j,tad_j\n";
  for (const auto& p : cloud.points) out << p.run_id << ',' << format_number(p.time) << ',' << format_number(p.actual) << '\n';
}

void write_density_grid_csv(std::ostream& out, const KdeModel& model, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("density grid needs at least 2 points per axis");
  const auto [tmin, tmax] = std::minmax_element(model.times().begin(), model.times().end());
  const auto [amin, amax] = std::minmax_element(model.actuals().begin(), model.actuals().end());
  const double t0 = *tmin - model.bandwidth_time(), t1 = *tmax + model.bandwidth_time();
  const double a0 = *amin - model.bandwidth_actual(), a1 = *amax + model.bandwidth_actual();
  out << "x,y,density\n";
  for (int i = 0; i < grid_size; ++i) {
    const double x = t0 + (t1 - t0) * i / (grid_size - 1);
    for (int j = 0; j < grid_size; ++j) {
      const double y = a0 + (a1 - a0) * j / (grid_size - 1);
      out << format_number(x) << ',' << format_number(y) << ',' << format_number(model.density(x, y)) << '\n';
    }
  }
}

}  // namespace sedm
