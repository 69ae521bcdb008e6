#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sedm/benchmark.hpp"
#include "sedm/curves.hpp"
#include "sedm/network.hpp"

namespace sedm {

/// Malformed or invalid input file. what() reads "<source>:<line>: <message>".
class InputError : public std::runtime_error {
public:
  InputError(const std::string& source, int line, const std::string& message);
  const std::string& source() const { return source_; }
  int line() const { return line_; }

private:
  std::string source_;
  int line_;
};

/// Project document:
///
///   project: <name>
///   bpd: <number>                 # optional; checked against the schedule
///   activities:
///     - id: A
///       name: Foundations        # optional
///       predecessors: [ ]        # optional
///       pd: 10
///       distribution: {type: triangular, optimistic: 9, most_likely: 10, pessimistic: 13}
///       cost_per_period: 1200    # optional
///
/// Distribution types: triangular (optimistic, most_likely, pessimistic),
/// uniform (lo, hi), normal (mean, sd), discrete (atoms: [{value, probability}]).
ProjectNetwork parse_project(const std::string& text, const std::string& source = "<project>");
ProjectNetwork load_project(const std::filesystem::path& path);
std::string project_to_yaml(const ProjectNetwork& network);

/// Tracking document:
///
///   actual_finish: 129.4         # optional
///   periods:
///     - period: 1
///       progress:
///         - {activity: A, worked: 1, completion: 0.1}
TrackingLog parse_tracking(const std::string& text, const ProjectNetwork& network, const std::string& source = "<tracking>");
TrackingLog load_tracking(const std::filesystem::path& path, const ProjectNetwork& network);
std::string tracking_to_yaml(const ProjectNetwork& network, const TrackingLog& log);

enum class AnomalyMode { none, checkpoints, all };

/// Settings shared by the commands; every key of the config document is optional.
struct AppConfig {
  RunConfig run;
  ForecastOptions forecast;
  std::vector<double> checkpoints{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<Method> methods{Method::esm, Method::sevm, Method::sedm};
  AnomalyMode anomaly = AnomalyMode::checkpoints;
  unsigned threads = 0;

  BenchmarkConfig benchmark() const;
};

/// Config document keys: runs, seed, threads, folds, classification_repeats,
/// regression_repeats, split, knn_k, ridge_lambda, cart_min_leaf,
/// cart_max_depth, bandwidth (nrd or {time, actual}), kernel_sd_fraction,
/// checkpoints, methods, anomaly (none, checkpoints, all).
AppConfig parse_config(const std::string& text, const std::string& source = "<config>");
AppConfig load_config(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace sedm
