#pragma once

#include <optional>
#include <vector>

#include "sedm/curves.hpp"
#include "sedm/forecast.hpp"
#include "sedm/montecarlo.hpp"
#include "sedm/network.hpp"

namespace sedm {

struct BenchmarkConfig {
  std::vector<Method> methods{Method::esm, Method::sevm, Method::sedm};
  RunConfig run;  // used when a store has to be simulated; its measure is overridden per method
  ForecastOptions forecast;
  std::vector<double> checkpoints{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};  // percent of the tracked duration
  bool anomaly_at_checkpoints_only = true;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct MethodSeries {
  Method method = Method::sedm;
  std::vector<ForecastResult> forecasts;  // control times 0..n
  double mape = 0.0;                      // over control times 1..n
};

struct CheckpointRow {
  double percent = 0.0;
  int control_time = 0;
  std::vector<double> edac;  // one per method, in report order
};

struct MapeReport {
  double rd = 0.0;
  double bpd = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> control_times;
  std::vector<MethodSeries> series;
  std::vector<CheckpointRow> checkpoints;

  const MethodSeries& method(Method m) const;
};

/// Control period for a percent-complete checkpoint: round(percent / 100 * n).
int checkpoint_period(double percent, int completion_period);

/// Forecasts at every control period 0..n of a finished tracking log, where n is
/// the period in which it completes. Stochastic methods reuse one store each
/// (simulated from config.run when not supplied) and retrain per period.
MapeReport run_benchmark(const ProjectNetwork& network, const TrackingLog& log, double rd, const BenchmarkConfig& config,
                         const SimulationStore* sedm_store = nullptr, const SimulationStore* sevm_store = nullptr);

/// Measure used by ESM: cost when every activity has a cost rate, work periods otherwise.
ValueMeasure esm_measure(const ProjectNetwork& network);

}  // namespace sedm
