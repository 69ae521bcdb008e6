#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sedm/curves.hpp"
#include "sedm/network.hpp"

namespace sedm {

inline constexpr std::size_t kDefaultRuns = 25000;

struct RunConfig {
  std::size_t n_runs = kDefaultRuns;
  std::uint64_t master_seed = 0;
  ValueMeasure value_measure = ValueMeasure::work_periods;
  bool store_trajectories = true;

  bool operator==(const RunConfig&) const = default;
};

/// Throws std::invalid_argument for an unusable configuration (n_runs == 0).
void check_config(const RunConfig& config);

/// Inverse-CDF transform of a uniform variate u in [0, 1).
double sample_duration(const DurationDistribution& dist, double u);

/// Sampled durations of one simulated execution.
struct Realization {
  std::size_t run_id = 0;
  std::vector<double> durations;
};

/// Draws run `run_id` from its own substream of `master_seed`, one uniform per
/// activity in network order.
Realization sample_realization(const ProjectNetwork& network, std::uint64_t master_seed, std::size_t run_id);

struct Outcome {
  int delay_flag = 0;
  int overwork_flag = 0;
  double delay_amount = 0.0;
  double overwork_amount = 0.0;
};

/// Late (or overworked) strictly beyond the plan; finishing exactly on plan is not late.
Outcome classify_outcome(double afd, double tad_final, double bpd, double tpd_final);

struct TrajectoryRecord {
  std::size_t run_id = 0;
  double afd = 0.0;
  double tad_final = 0.0;
  Outcome outcome;
  CumulativeCurve earned;  // TED (or EV); empty when trajectories are not stored
  CumulativeCurve actual;  // TAD (or AC)

  bool operator==(const TrajectoryRecord&) const;
};

struct SimulationStore {
  RunConfig config;
  std::uint64_t fingerprint = 0;
  std::string generator;
  double bpd = 0.0;
  double tpd_final = 0.0;
  std::vector<TrajectoryRecord> records;

  bool has_trajectories() const { return config.store_trajectories; }
  bool operator==(const SimulationStore&) const = default;
};

class FingerprintMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class StoreFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Builds one trajectory record from sampled durations.
TrajectoryRecord simulate_run(const ProjectNetwork& network, const PrecedenceIndex& index, const Realization& realization,
                              double bpd, double tpd_final, ValueMeasure measure, bool keep_curves);

/// Runs config.n_runs simulated executions. The result depends only on the
/// network and the config, never on `threads` (0 = hardware concurrency).
SimulationStore run_simulation(const ProjectNetwork& network, const RunConfig& config, unsigned threads = 0);

void write_store(std::ostream& out, const SimulationStore& store);
SimulationStore read_store(std::istream& in);

void save_store(const SimulationStore& store, const std::filesystem::path& path);
SimulationStore load_store(const std::filesystem::path& path);
/// Loads and checks the fingerprint against `network`.
SimulationStore load_store(const std::filesystem::path& path, const ProjectNetwork& network);

void require_fingerprint(const SimulationStore& store, const ProjectNetwork& network);

}  // namespace sedm
