#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace sedm {

/// Triangular duration with optimistic, most likely and pessimistic bounds.
struct Triangular {
  double optimistic = 0.0;
  double most_likely = 0.0;
  double pessimistic = 0.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 0.0;
};

/// Normal duration, truncated from below at kNormalFloor periods when sampled.
struct TruncatedNormal {
  double mean = 0.0;
  double sd = 0.0;
};

struct DiscreteAtom {
  double value = 0.0;
  double probability = 0.0;
};

struct Discrete {
  std::vector<DiscreteAtom> atoms;
};

using DurationDistribution = std::variant<Triangular, Uniform, TruncatedNormal, Discrete>;

inline constexpr double kNormalFloor = 0.01;

/// Returns a list of human readable problems; empty when the parameters are valid.
std::vector<std::string> check_distribution(const DurationDistribution& dist);

/// Short type tag ("triangular", "uniform", "normal", "discrete").
std::string distribution_kind(const DurationDistribution& dist);

struct Activity {
  std::string id;
  std::string name;
  std::vector<std::string> predecessors;
  int planned_duration = 1;
  DurationDistribution distribution = Discrete{{{1.0, 1.0}}};
  std::optional<double> cost_per_period;
};

struct ValidationIssue {
  enum class Kind { duplicate_id, unknown_predecessor, self_reference, cycle, planned_duration, distribution, cost };
  Kind kind;
  std::string activity_id;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(ValidationIssue::Kind kind) const;
  std::string to_string() const;
};

class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

private:
  ValidationReport report_;
};

/// Activity network with finish-to-start, zero-lag precedence.
///
/// Construction only indexes the activities; call validate() before using the
/// analytics, which throw ValidationError on an invalid network.
class ProjectNetwork {
public:
  ProjectNetwork() = default;
  explicit ProjectNetwork(std::vector<Activity> activities, std::string name = {});

  const std::string& name() const { return name_; }
  const std::vector<Activity>& activities() const { return activities_; }
  std::size_t size() const { return activities_.size(); }
  const Activity& operator[](std::size_t i) const { return activities_[i]; }

  std::optional<std::size_t> index_of(const std::string& id) const;

  /// Sum of planned durations (final value of the planned work-period curve).
  double total_planned_work() const;
  bool has_costs() const;

private:
  std::string name_;
  std::vector<Activity> activities_;
  std::unordered_map<std::string, std::size_t> index_;
};

ValidationReport validate(const ProjectNetwork& network);

/// 64-bit FNV-1a hash of a canonical text rendering of the network. Any change
/// to ids, precedence, planned durations, distributions or costs changes it.
std::uint64_t network_fingerprint(const ProjectNetwork& network);
std::string fingerprint_hex(std::uint64_t fingerprint);

/// Throws ValidationError when validate() reports any issue.
void require_valid(const ProjectNetwork& network);

/// Activity indices in a precedence-respecting order. Throws on cycles.
std::vector<std::size_t> topological_order(const ProjectNetwork& network);

/// Predecessor indices per activity (resolved ids).
std::vector<std::vector<std::size_t>> predecessor_indices(const ProjectNetwork& network);

struct ProgressiveLevels {
  std::vector<int> level;  // 1-based, per activity
  int depth = 0;           // n_s
};

ProgressiveLevels progressive_levels(const ProjectNetwork& network);

/// (n_s - 1) / (n_t - 1). Empty when n_t == 1, where the indicator is undefined.
std::optional<double> serial_parallel_indicator(int serial_levels, int activity_count);

struct Schedule {
  std::vector<double> start;
  std::vector<double> finish;
  double project_duration = 0.0;
};

/// Resolved precedence structure, reusable across many forward passes.
struct PrecedenceIndex {
  std::vector<std::size_t> order;
  std::vector<std::vector<std::size_t>> predecessors;
};

PrecedenceIndex index_precedence(const ProjectNetwork& network);

/// Earliest-start schedule for the given per-activity durations.
Schedule forward_pass(const ProjectNetwork& network, const std::vector<double>& durations);
Schedule forward_pass(const PrecedenceIndex& index, const std::vector<double>& durations);

/// Forward pass over the planned durations; project_duration is the BPD.
Schedule baseline_schedule(const ProjectNetwork& network);

}  // namespace sedm
