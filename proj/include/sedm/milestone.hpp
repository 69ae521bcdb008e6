#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sedm/curves.hpp"
#include "sedm/montecarlo.hpp"

namespace sedm {

/// Where a simulated run stood when it had earned the same value as the
/// tracked project: its own elapsed time and accumulated actual value.
struct MatchedPoint {
  double time = 0.0;    // AD_j (or AT_j)
  double actual = 0.0;  // TAD_ADj (or AC_ATj)
};

struct CloudPoint {
  std::size_t run_id = 0;
  double time = 0.0;
  double actual = 0.0;
};

struct PointCloud {
  ValueMeasure measure = ValueMeasure::work_periods;
  double earned_target = 0.0;
  std::vector<CloudPoint> points;

  std::vector<double> times() const;
  std::vector<double> actuals() const;
};

MatchedPoint match_progress(const TrajectoryRecord& trajectory, double earned_target);

/// One point per run. Throws std::invalid_argument when the store has no trajectories.
PointCloud build_point_cloud(const SimulationStore& store, double earned_target);

class DegenerateBandwidth : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Normal reference bandwidth 4 * 1.06 * min(sd, IQR / 1.349) * n^(-1/5).
/// The robust spread falls back to sd when the IQR is zero. Throws
/// DegenerateBandwidth for constant samples; skip the KDE in that case.
double bandwidth_nrd(std::span<const double> samples);

struct KdeOptions {
  std::optional<double> bandwidth_time;    // overrides bandwidth_nrd on the time axis
  std::optional<double> bandwidth_actual;  // overrides bandwidth_nrd on the actual axis
  double kernel_sd_fraction = 0.25;        // kernel sd = fraction * bandwidth
};

/// Gaussian product-kernel density over a point cloud.
class KdeModel {
public:
  KdeModel(const PointCloud& cloud, const KdeOptions& options = {});

  double bandwidth_time() const { return h_time_; }
  double bandwidth_actual() const { return h_actual_; }
  std::size_t size() const { return time_.size(); }

  double density(double time, double actual) const;

  /// Density at every cloud point (each point's own kernel included).
  std::vector<double> point_densities() const;

  std::span<const double> times() const { return time_; }
  std::span<const double> actuals() const { return actual_; }

private:
  std::vector<double> time_;
  std::vector<double> actual_;
  double h_time_ = 0.0;
  double h_actual_ = 0.0;
  double sd_time_ = 0.0;
  double sd_actual_ = 0.0;
};

double kde_density(const KdeModel& model, double time, double actual);

/// Fraction of cloud points whose density strictly exceeds the density at the
/// observed point. Values within a relative 1e-10 count as ties (not exceeding).
double anomaly_percentile(const KdeModel& model, double time, double actual);

/// Same statistic straight from a cloud. Axes without spread are handled as the
/// zero-bandwidth limit: an observation off the constant value gets 1, one on it
/// is scored on the remaining axis (or gets 0 when both axes are constant).
double anomaly_percentile(const PointCloud& cloud, double time, double actual, const KdeOptions& options = {});

void write_cloud_csv(std::ostream& out, const PointCloud& cloud);

/// (x, y, density) rows over the cloud's range padded by one bandwidth.
void write_density_grid_csv(std::ostream& out, const KdeModel& model, int grid_size = 50);

}  // namespace sedm
