#include "sedm/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace sedm {

const MethodSeries& MapeReport::method(Method m) const {
  for (const auto& s : series)
    if (s.method == m) return s;
  throw std::invalid_argument("benchmark report has no " + to_string(m) + " series");
}

int checkpoint_period(double percent, int completion_period) {
  if (!(percent >= 0.0 && percent <= 100.0)) throw std::invalid_argument("checkpoints are percentages in [0, 100]");
  return static_cast<int>(std::lround(percent / 100.0 * completion_period));
}

ValueMeasure esm_measure(const ProjectNetwork& network) {
  return network.has_costs() ? ValueMeasure::cost : ValueMeasure::work_periods;
}

MapeReport run_benchmark(const ProjectNetwork& network, const TrackingLog& log, double rd, const BenchmarkConfig& config,
                         const SimulationStore* sedm_store, const SimulationStore* sevm_store) {
  require_valid(network);
  if (config.methods.empty()) throw std::invalid_argument("benchmark needs at least one method");
  if (!(rd > 0.0)) throw std::invalid_argument("realized duration must be positive");
  const auto completion = log.completion_period();
  if (!completion) throw std::invalid_argument("benchmark needs a tracking log that runs to project completion");
  const int n = *completion;

  // Stores are simulated on demand, once per stochastic method.
  std::optional<SimulationStore> own_sedm, own_sevm;
  auto store_for = [&](Method m) -> const SimulationStore& {
    const bool cost = m == Method::sevm;
    const SimulationStore* given = cost ? sevm_store : sedm_store;
    auto& own = cost ? own_sevm : own_sedm;
    if (given) return *given;
    if (!own) {
      RunConfig run = config.run;
      run.value_measure = cost ? ValueMeasure::cost : ValueMeasure::work_periods;
      run.store_trajectories = true;
      own = run_simulation(network, run, config.threads);
    }
    return *own;
  };

  MapeReport report;
  report.rd = rd;
  report.bpd = baseline_schedule(network).project_duration;
  report.seed = config.forecast.seed;
  for (int t = 0; t <= n; ++t) report.control_times.push_back(t);

  std::vector<int> checkpoint_times;
  for (double p : config.checkpoints) checkpoint_times.push_back(checkpoint_period(p, n));

  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n + 1));

  for (Method m : config.methods) {
    MethodSeries series;
    series.method = m;
    series.forecasts.resize(static_cast<std::size_t>(n + 1));
    const ValueMeasure measure = m == Method::esm ? esm_measure(network) : m == Method::sevm ? ValueMeasure::cost : ValueMeasure::work_periods;
    const SimulationStore* store = m == Method::esm ? nullptr : &store_for(m);
    if (store) require_fingerprint(*store, network);

    // Control times are independent; each worker takes a strided share.
    auto work = [&](unsigned worker) {
      for (int t = static_cast<int>(worker); t <= n; t += static_cast<int>(threads)) {
        const auto snapshot = take_snapshot(network, log, t, measure);
        if (!store) {
          series.forecasts[t] = esm_forecast(snapshot);
          continue;
        }
        ForecastOptions options = config.forecast;
        if (config.anomaly_at_checkpoints_only)
          options.anomaly = options.anomaly && std::find(checkpoint_times.begin(), checkpoint_times.end(), t) != checkpoint_times.end();
        series.forecasts[t] = stochastic_forecast(m, snapshot, *store, options);
      }
    };
    if (threads <= 1) {
      work(0);
    } else {
      std::vector<std::exception_ptr> errors(threads);
      {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
          pool.emplace_back([&, w] {
            try {
              work(w);
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }

    std::vector<double> edac;
    for (int t = 1; t <= n; ++t) edac.push_back(series.forecasts[t].edac);
    series.mape = n >= 1 ? mape(rd, edac) : 0.0;
    report.series.push_back(std::move(series));
  }

  for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
    CheckpointRow row{config.checkpoints[c], checkpoint_times[c], {}};
    for (const auto& s : report.series) row.edac.push_back(s.forecasts[checkpoint_times[c]].edac);
    report.checkpoints.push_back(std::move(row));
  }
  return report;
}

}  // namespace sedm
