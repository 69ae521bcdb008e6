#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sedm/curves.hpp"
#include "sedm/milestone.hpp"
#include "sedm/montecarlo.hpp"
#include "sedm/statlearn/model_selection.hpp"

namespace sedm {

enum class Method { esm, sevm, sedm };

std::string to_string(Method method);
Method parse_method(const std::string& text);
std::vector<Method> parse_methods(const std::string& comma_list);

struct ForecastOptions {
  double train_fraction = 0.8;
  int folds = 10;
  int classification_repeats = 1;
  int regression_repeats = 3;
  learn::Grid grid;
  std::uint64_t seed = 0;
  bool anomaly = true;
  KdeOptions kde;
  double late_threshold = 0.5;
};

/// The model picked for one learning task with its evidence.
struct SelectedModel {
  learn::Algorithm algorithm = learn::Algorithm::cart;
  learn::Hyper hyper;
  learn::CVReport cv;
  std::vector<learn::MetricSamples> holdout;  // one value per metric on the held-out split
  std::string note;
};

struct ForecastResult {
  Method method = Method::sedm;
  int control_time = 0;
  double bpd = 0.0;
  std::optional<double> p_delay;  // stochastic methods only
  double expected_deviation = 0.0;
  double edac = 0.0;
  std::optional<double> anomaly_percentile;
  /// "models", "single-class", "constant-target", "observed" (project finished) or "earned-schedule".
  std::string basis;
  MatchedPoint observed;  // (AD, TAD_AD) or (AT, AC_AT)
  std::optional<SelectedModel> classifier;
  std::optional<SelectedModel> regressor;

  bool likely_late(double threshold = 0.5) const { return p_delay && *p_delay > threshold; }
};

/// Shared SEDM/SEVM pipeline: the store's measure must match the snapshot's.
ForecastResult stochastic_forecast(Method method, const ControlSnapshot& snapshot, const SimulationStore& store,
                                   const ForecastOptions& options = {});

/// Work-period (earned duration) forecast.
ForecastResult sedm_forecast(const ControlSnapshot& snapshot, const SimulationStore& store, const ForecastOptions& options = {});

/// Cost-valued (earned value) forecast; needs a cost snapshot and a cost store.
ForecastResult sevm_forecast(const ControlSnapshot& snapshot, const SimulationStore& store, const ForecastOptions& options = {});

/// Earned schedule forecast from the snapshot alone.
ForecastResult esm_forecast(const ControlSnapshot& snapshot);

/// Mean absolute percentage error of an EDAC series against the realized duration.
double mape(double rd, std::span<const double> edac_series);

}  // namespace sedm
