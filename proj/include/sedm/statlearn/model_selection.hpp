#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sedm/statlearn/dataset.hpp"
#include "sedm/statlearn/kfold.hpp"
#include "sedm/statlearn/models.hpp"

namespace sedm::learn {

struct Candidate {
  Algorithm algorithm;
  Hyper hyper;
};

struct Grid {
  std::vector<int> knn_k{5, 9, 15, 25};
  std::vector<double> ridge_lambda{0.0, 0.01, 0.1, 1.0, 10.0};
  int cart_min_leaf = 20;
  int cart_max_depth = 8;
};

std::vector<Algorithm> classification_roster();  // lda, cart, knn
std::vector<Algorithm> regression_roster();      // ols, ridge, cart, knn

std::vector<Candidate> expand_grid(const std::vector<Algorithm>& roster, const Grid& grid);

/// R-style five-number summary plus mean and missing count.
struct MetricSummary {
  double min = 0.0, q1 = 0.0, median = 0.0, mean = 0.0, q3 = 0.0, max = 0.0;
  int missing = 0;
  int available = 0;
  bool defined() const { return available > 0; }
};

MetricSummary summarize(const std::vector<std::optional<double>>& samples);

struct MetricSamples {
  std::string name;
  std::vector<std::optional<double>> values;  // one per fold and repeat; empty optional = NA
  MetricSummary summary() const;
};

struct AlgorithmResult {
  Algorithm algorithm;
  Hyper hyper;                        // best configuration for this algorithm
  std::vector<MetricSamples> metrics; // accuracy, kappa  or  mae, rmse, r2
  std::string failure;                // reason when no fold could be fitted

  const MetricSamples& metric(const std::string& name) const;
  bool usable() const;
};

struct CVReport {
  Task task = Task::regression;
  CVPlan plan;
  std::vector<AlgorithmResult> results;  // roster order
};

/// Cross-validates every candidate; per algorithm only its best configuration
/// is kept. Folds where fitting throws are recorded as NA.
CVReport cross_validate(const Dataset& data, const CVPlan& plan, const std::vector<Candidate>& candidates);

/// Index into report.results. Classification: highest mean accuracy, then mean
/// kappa, then roster order. Regression: lowest mean RMSE, then MAE, then roster order.
std::size_t select_model(const CVReport& report);

/// One row per algorithm and metric: Min, 1st Qu, Median, Mean, 3rd Qu, Max, NA's.
void write_cv_table(std::ostream& out, const CVReport& report);

}  // namespace sedm::learn
