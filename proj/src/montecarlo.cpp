#include "sedm/montecarlo.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <thread>

#include "sedm/random.hpp"

namespace sedm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p); }

}  // namespace

void check_config(const RunConfig& config) {
  if (config.n_runs < 1) throw std::invalid_argument("run configuration: n_runs must be at least 1");
}

double sample_duration(const DurationDistribution& dist, double u) {
  return std::visit(
      Overloaded{
          [u](const Triangular& t) {
            const double a = t.optimistic, m = t.most_likely, b = t.pessimistic;
            const double split = (m - a) / (b - a);
            if (u < split) return a + std::sqrt(u * (b - a) * (m - a));
            return b - std::sqrt((1.0 - u) * (b - a) * (b - m));
          },
          [u](const Uniform& r) { return r.lo + u * (r.hi - r.lo); },
          [u](const TruncatedNormal& n) {
            // Inverse CDF restricted to the part of the normal above the floor.
            const double below = normal_cdf((kNormalFloor - n.mean) / n.sd);
            const double p = below + u * (1.0 - below);
            if (p <= 0.0) return kNormalFloor;
            return std::max(kNormalFloor, n.mean + n.sd * normal_quantile(p));
          },
          [u](const Discrete& d) {
            double cumulative = 0.0;
            for (const auto& atom : d.atoms) {
              cumulative += atom.probability;
              if (u < cumulative) return atom.value;
            }
            return d.atoms.back().value;
          },
      },
      dist);
}

Realization sample_realization(const ProjectNetwork& network, std::uint64_t master_seed, std::size_t run_id) {
  auto engine = make_stream(master_seed, run_id);
  Realization r{run_id, {}};
  r.durations.reserve(network.size());
  for (const auto& activity : network.activities()) r.durations.push_back(sample_duration(activity.distribution, uniform01(engine)));
  return r;
}

Outcome classify_outcome(double afd, double tad_final, double bpd, double tpd_final) {
  Outcome o;
  o.delay_amount = afd - bpd;
  o.overwork_amount = tad_final - tpd_final;
  o.delay_flag = afd > bpd ? 1 : 0;
  o.overwork_flag = tad_final > tpd_final ? 1 : 0;
  return o;
}

bool TrajectoryRecord::operator==(const TrajectoryRecord& other) const {
  return run_id == other.run_id && afd == other.afd && tad_final == other.tad_final &&
         outcome.delay_flag == other.outcome.delay_flag && outcome.overwork_flag == other.outcome.overwork_flag &&
         outcome.delay_amount == other.outcome.delay_amount && outcome.overwork_amount == other.outcome.overwork_amount &&
         earned == other.earned && actual == other.actual;
}

TrajectoryRecord simulate_run(const ProjectNetwork& network, const PrecedenceIndex& index, const Realization& realization,
                              double bpd, double tpd_final, ValueMeasure measure, bool keep_curves) {
  const auto schedule = forward_pass(index, realization.durations);
  TrajectoryRecord rec;
  rec.run_id = realization.run_id;
  rec.afd = schedule.project_duration;
  rec.tad_final = 0.0;
  for (double d : realization.durations) rec.tad_final += d;
  rec.outcome = classify_outcome(rec.afd, rec.tad_final, bpd, tpd_final);
  if (keep_curves) {
    auto curves = realized_curves(network, realization.durations, schedule, measure);
    rec.earned = std::move(curves.earned);
    rec.actual = std::move(curves.actual);
  } else {
    rec.earned.measure = rec.actual.measure = measure;
  }
  return rec;
}

SimulationStore run_simulation(const ProjectNetwork& network, const RunConfig& config, unsigned threads) {
  check_config(config);
  require_valid(network);
  const auto weights = period_weights(network, config.value_measure);  // throws for cost without rates

  const auto index = index_precedence(network);
  SimulationStore store;
  store.config = config;
  store.fingerprint = network_fingerprint(network);
  store.generator = kGeneratorId;
  store.bpd = baseline_schedule(network).project_duration;
  // Planned total in the store's measure: TPD_final, or the budget at completion for cost.
  store.tpd_final = 0.0;
  for (std::size_t i = 0; i < network.size(); ++i) store.tpd_final += weights[i] * network[i].planned_duration;
  store.records.resize(config.n_runs);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.n_runs));

  // Each worker fills a disjoint, strided set of slots; a run only reads its own substream.
  auto work = [&](unsigned worker) {
    for (std::size_t j = worker; j < config.n_runs; j += threads) {
      const auto realization = sample_realization(network, config.master_seed, j);
      store.records[j] = simulate_run(network, index, realization, store.bpd, store.tpd_final, config.value_measure,
                                      config.store_trajectories);
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  return store;
}

void require_fingerprint(const SimulationStore& store, const ProjectNetwork& network) {
  const auto expected = network_fingerprint(network);
  if (store.fingerprint != expected)
    throw FingerprintMismatch("simulation store fingerprint " + fingerprint_hex(store.fingerprint) +
                              " does not match project fingerprint " + fingerprint_hex(expected));
}

}  // namespace sedm
