// Command-line front end: plan, simulate, control, benchmark, sample-execution.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sedm/benchmark.hpp"
#include "sedm/curves.hpp"
#include "sedm/forecast.hpp"
#include "sedm/milestone.hpp"
#include "sedm/montecarlo.hpp"
#include "sedm/network.hpp"
#include "sedm/project_io.hpp"
#include "sedm/report.hpp"
#include "sedm/text.hpp"

namespace fs = std::filesystem;
using namespace sedm;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitInput = 2;

/// Bad command-line values; reported like input errors.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// Three decimals, truncated, the way topology indicators are usually tabulated.
std::string indicator_text(double value) {
  return format_fixed(std::floor(value * 1000.0 + 1e-9) / 1000.0, 3);
}

std::string percent(double fraction, int digits = 2) { return format_fixed(100.0 * fraction, digits) + "%"; }

struct Common {
  std::string config_path;
  AppConfig config;

  void load() {
    if (!config_path.empty()) config = load_config(config_path);
  }
};

// ---------------------------------------------------------------- plan

struct PlanArgs {
  std::string project;
  std::string schedule_csv;
  std::string curve_csv;
  std::string curve_svg;
  std::string measure = "work-periods";
};

int run_plan(const PlanArgs& a) {
  const auto network = load_project(a.project);
  const auto measure = parse_measure(a.measure);
  const auto schedule = baseline_schedule(network);
  const auto levels = progressive_levels(network);
  const auto n_t = static_cast<int>(network.size());
  const auto sp = serial_parallel_indicator(levels.depth, n_t);
  const auto curve = planned_curve(network, schedule, measure);

  std::cout << "project: " << (network.name().empty() ? "(unnamed)" : network.name()) << '\n'
            << "fingerprint: " << fingerprint_hex(network_fingerprint(network)) << '\n'
            << "activities (n_t): " << n_t << '\n'
            << "progressive levels (n_s): " << levels.depth << '\n'
            << "SP: " << (sp ? indicator_text(*sp) + " (" + format_fixed(*sp, 6) + ")" : std::string("undefined for a single activity"))
            << '\n'
            << "BPD: " << format_number(schedule.project_duration) << '\n'
            << "TPD_final: " << format_number(network.total_planned_work()) << '\n';
  if (measure == ValueMeasure::cost) std::cout << "BAC: " << format_number(curve.final_value()) << '\n';
  std::cout << "\nschedule:\n";
  write_schedule_csv(std::cout, network, schedule);

  if (!a.schedule_csv.empty()) {
    auto out = open_output(a.schedule_csv);
    write_schedule_csv(out, network, schedule);
    finish_output(out, a.schedule_csv);
  }
  if (!a.curve_csv.empty()) {
    auto out = open_output(a.curve_csv);
    write_curve_csv(out, curve);
    finish_output(out, a.curve_csv);
  }
  if (!a.curve_svg.empty()) {
    LineChart chart;
    chart.title = measure == ValueMeasure::cost ? "Planned value" : "Total planned duration";
    chart.x_label = "period";
    chart.y_label = measure == ValueMeasure::cost ? "cumulative cost" : "cumulative work periods";
    Series s{chart.title, {}, curve.values};
    for (std::size_t p = 0; p < curve.values.size(); ++p) s.x.push_back(static_cast<double>(p));
    chart.series.push_back(std::move(s));
    auto out = open_output(a.curve_svg);
    write_line_chart_svg(out, chart);
    finish_output(out, a.curve_svg);
  }
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  Common common;
  std::string project;
  std::string out;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string measure = "work-periods";
  bool finals_only = false;
};

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int run_simulate(SimulateArgs a) {
  a.common.load();
  auto& cfg = a.common.config;
  const auto network = load_project(a.project);
  RunConfig run = cfg.run;
  if (a.runs) run.n_runs = *a.runs;
  if (a.seed) run.master_seed = *a.seed;
  run.value_measure = parse_measure(a.measure);
  run.store_trajectories = !a.finals_only;
  const unsigned threads = a.threads ? *a.threads : cfg.threads;

  const auto store = run_simulation(network, run, threads);
  save_store(store, a.out);

  std::vector<double> afd;
  double late = 0.0, over = 0.0;
  for (const auto& r : store.records) {
    afd.push_back(r.afd);
    late += r.outcome.delay_flag;
    over += r.outcome.overwork_flag;
  }
  const double n = static_cast<double>(store.records.size());
  double mean = 0.0;
  for (double v : afd) mean += v;
  mean /= n;
  std::cout << "# seed=" << run.master_seed << '\n'
            << "store: " << a.out << '\n'
            << "runs: " << run.n_runs << '\n'
            << "measure: " << to_string(run.value_measure) << '\n'
            << "fingerprint: " << fingerprint_hex(store.fingerprint) << '\n'
            << "BPD: " << format_number(store.bpd) << '\n'
            << "P(delay): " << format_fixed(late / n, 4) << '\n'
            << "P(overwork): " << format_fixed(over / n, 4) << '\n'
            << "mean AFD: " << format_fixed(mean, 4) << '\n'
            << "AFD quantiles: 5%=" << format_fixed(quantile(afd, 0.05), 3) << " 25%=" << format_fixed(quantile(afd, 0.25), 3)
            << " 50%=" << format_fixed(quantile(afd, 0.5), 3) << " 75%=" << format_fixed(quantile(afd, 0.75), 3)
            << " 95%=" << format_fixed(quantile(afd, 0.95), 3) << '\n';
  return 0;
}

// ---------------------------------------------------------------- control

struct ControlArgs {
  Common common;
  std::string project;
  std::string tracking;
  std::string store;
  int at = 0;
  std::optional<std::uint64_t> seed;
  std::string cloud_csv;
  std::string grid_csv;
  std::string cv_dir;
};

void print_selected(std::ostream& out, const char* task, const SelectedModel& m) {
  out << '\n' << task << " cross-validation (" << m.cv.plan.folds << " folds x " << m.cv.plan.repeats << " repeats):\n";
  learn::write_cv_table(out, m.cv);
  out << "selected: " << learn::to_string(m.algorithm);
  const auto hp = m.hyper.describe(m.algorithm);
  if (!hp.empty()) out << " (" << hp << ')';
  out << '\n';
  if (!m.note.empty()) out << "note: " << m.note << '\n';
  if (!m.holdout.empty()) {
    out << "holdout:";
    for (const auto& metric : m.holdout) out << ' ' << metric.name << '=' << format_optional(metric.values.front());
    out << '\n';
  }
}

int run_control(ControlArgs a) {
  a.common.load();
  auto& cfg = a.common.config;
  const auto network = load_project(a.project);
  const auto log = load_tracking(a.tracking, network);
  const auto store = load_store(a.store);
  require_fingerprint(store, network);
  if (a.at < 0 || a.at > log.periods())
    throw UsageError("--at " + std::to_string(a.at) + " is outside the tracked range 0.." + std::to_string(log.periods()));

  ForecastOptions options = cfg.forecast;
  if (a.seed) options.seed = *a.seed;
  options.anomaly = cfg.anomaly != AnomalyMode::none;
  const auto measure = store.config.value_measure;
  const Method method = measure == ValueMeasure::cost ? Method::sevm : Method::sedm;
  const auto snapshot = take_snapshot(network, log, a.at, measure);
  const auto forecast = stochastic_forecast(method, snapshot, store, options);
  const auto esm = esm_forecast(take_snapshot(network, log, a.at, esm_measure(network)));
  const bool cost = measure == ValueMeasure::cost;

  auto& out = std::cout;
  out << "# seed=" << options.seed << '\n'
      << "method: " << to_string(method) << " (" << to_string(measure) << ")\n"
      << "control time AD: " << a.at << '\n'
      << (cost ? "AC: " : "TAD: ") << format_number(snapshot.actual_value) << '\n'
      << (cost ? "EV: " : "TED: ") << format_number(snapshot.earned_value) << '\n'
      << (cost ? "ES: " : "ED(t): ") << format_fixed(snapshot.earned_time, 4) << '\n'
      << "PPI: " << percent(snapshot.ppi) << '\n'
      << "BPD: " << format_number(snapshot.bpd) << '\n';
  if (snapshot.complete) out << "project complete; finish time " << format_number(snapshot.finish_time) << '\n';
  out << "anomaly percentile: " << format_optional(forecast.anomaly_percentile) << '\n';
  if (forecast.classifier) print_selected(out, "classification (delay_flag)", *forecast.classifier);
  if (forecast.regressor) print_selected(out, "regression (delay_amount)", *forecast.regressor);
  out << '\n'
      << "basis: " << forecast.basis << '\n'
      << "P(delay): " << (forecast.p_delay ? percent(*forecast.p_delay) : std::string("NA")) << '\n'
      << "verdict: " << (forecast.likely_late(options.late_threshold) ? "likely to finish late" : "likely to finish on time") << '\n'
      << "expected deviation: " << format_fixed(forecast.expected_deviation, 3) << '\n'
      << "EDAC: " << format_fixed(forecast.edac, 2) << '\n'
      << "ESM EDAC: " << format_fixed(esm.edac, 2) << '\n';

  if (!a.cloud_csv.empty() || !a.grid_csv.empty()) {
    const auto cloud = build_point_cloud(store, snapshot.earned_value);
    if (!a.cloud_csv.empty()) {
      auto f = open_output(a.cloud_csv);
      f << "# seed=" << store.config.master_seed << '\n';
      write_cloud_csv(f, cloud);
      finish_output(f, a.cloud_csv);
    }
    if (!a.grid_csv.empty()) {
      const KdeModel model(cloud, options.kde);
      auto f = open_output(a.grid_csv);
      f << "# seed=" << store.config.master_seed << '\n';
      write_density_grid_csv(f, model);
      finish_output(f, a.grid_csv);
    }
  }
  if (!a.cv_dir.empty()) {
    for (const auto& [name, model] : {std::pair{"cv_classification.csv", &forecast.classifier},
                                      std::pair{"cv_regression.csv", &forecast.regressor}}) {
      if (!*model) continue;
      const fs::path path = fs::path(a.cv_dir) / name;
      auto f = open_output(path);
      f << "# seed=" << options.seed << '\n';
      learn::write_cv_table(f, (*model)->cv);
      finish_output(f, path);
    }
  }
  return 0;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  Common common;
  std::string project;
  std::string tracking;
  double rd = 0.0;
  std::string methods;
  std::string store;
  std::string cost_store;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir = "benchmark_out";
};

int run_benchmark_command(BenchmarkArgs a) {
  a.common.load();
  const auto network = load_project(a.project);
  const auto log = load_tracking(a.tracking, network);
  auto config = a.common.config.benchmark();
  if (!a.methods.empty()) config.methods = parse_methods(a.methods);
  if (a.runs) config.run.n_runs = *a.runs;
  if (a.seed) config.run.master_seed = config.forecast.seed = *a.seed;
  if (a.threads) config.threads = *a.threads;

  std::optional<SimulationStore> sedm_store, sevm_store;
  if (!a.store.empty()) sedm_store = load_store(a.store, network);
  if (!a.cost_store.empty()) sevm_store = load_store(a.cost_store, network);
  if (sedm_store && sedm_store->config.value_measure != ValueMeasure::work_periods)
    throw UsageError("--store must hold a work-periods simulation");
  if (sevm_store && sevm_store->config.value_measure != ValueMeasure::cost)
    throw UsageError("--cost-store must hold a cost simulation");

  const auto report = run_benchmark(network, log, a.rd, config, sedm_store ? &*sedm_store : nullptr,
                                    sevm_store ? &*sevm_store : nullptr);

  const fs::path dir(a.out_dir);
  auto emit = [&](const char* name, auto&& writer, bool seeded) {
    const fs::path path = dir / name;
    auto f = open_output(path);
    if (seeded) f << "# seed=" << report.seed << '\n';
    writer(f);
    finish_output(f, path);
  };
  emit("forecasts.csv", [&](std::ostream& o) { write_forecast_csv(o, report); }, true);
  emit("mape.csv", [&](std::ostream& o) { write_mape_csv(o, report); }, true);
  emit("checkpoints.csv", [&](std::ostream& o) { write_checkpoint_csv(o, report); }, true);
  emit("edac.svg", [&](std::ostream& o) { write_edac_svg(o, report); }, false);
  emit("mape.svg", [&](std::ostream& o) { write_mape_svg(o, report); }, false);

  std::cout << "# seed=" << report.seed << '\n'
            << "RD: " << format_number(report.rd) << "  BPD: " << format_number(report.bpd)
            << "  control times: 0.." << report.control_times.back() << '\n'
            << '\n';
  write_mape_csv(std::cout, report);
  std::cout << '\n';
  write_checkpoint_csv(std::cout, report);
  std::cout << "\noutputs written to " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- sample-execution

struct SampleArgs {
  std::string project;
  std::uint64_t seed = 0;
  std::string out;
};

int run_sample(const SampleArgs& a) {
  const auto network = load_project(a.project);
  const auto realization = sample_realization(network, a.seed, 0);
  const auto schedule = forward_pass(index_precedence(network), realization.durations);
  const auto log = TrackingLog::from_execution(network, realization.durations, schedule);
  auto f = open_output(a.out);
  f << "# seed=" << a.seed << '\n' << tracking_to_yaml(network, log);
  finish_output(f, a.out);
  std::cout << "# seed=" << a.seed << '\n'
            << "tracking: " << a.out << '\n'
            << "RD: " << format_number(schedule.project_duration) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic earned duration management: plan, simulate, control and benchmark projects"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Baseline schedule, BPD, TPD and the SP topology indicator");
  plan_cmd->add_option("project", plan.project, "Project file (YAML)")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--schedule", plan.schedule_csv, "Write the per-activity schedule as CSV");
  plan_cmd->add_option("--curve", plan.curve_csv, "Write the planned cumulative curve as CSV");
  plan_cmd->add_option("--svg", plan.curve_svg, "Plot the planned cumulative curve as SVG");
  plan_cmd->add_option("--measure", plan.measure, "work-periods or cost")->capture_default_str();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo simulation of the project; writes a store file");
  sim_cmd->add_option("project", sim.project, "Project file (YAML)")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", sim.out, "Store file to write")->required();
  sim_cmd->add_option("--runs", sim.runs, "Number of simulated executions (default 25000)");
  sim_cmd->add_option("--seed", sim.seed, "Master seed");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--measure", sim.measure, "work-periods (SEDM) or cost (SEVM)")->capture_default_str();
  sim_cmd->add_flag("--finals-only", sim.finals_only, "Do not store per-period trajectories");
  sim_cmd->add_option("--config", sim.common.config_path, "Config file (YAML)")->check(CLI::ExistingFile);

  ControlArgs ctl;
  auto* ctl_cmd = app.add_subcommand("control", "Milestone analysis at control time AD");
  ctl_cmd->add_option("project", ctl.project, "Project file (YAML)")->required()->check(CLI::ExistingFile);
  ctl_cmd->add_option("tracking", ctl.tracking, "Tracking file (YAML)")->required()->check(CLI::ExistingFile);
  ctl_cmd->add_option("store", ctl.store, "Store file from 'simulate'")->required()->check(CLI::ExistingFile);
  ctl_cmd->add_option("--at", ctl.at, "Control time AD (a tracked period)")->required();
  ctl_cmd->add_option("--seed", ctl.seed, "Seed for splits and cross-validation");
  ctl_cmd->add_option("--cloud", ctl.cloud_csv, "Write the matched point cloud as CSV");
  ctl_cmd->add_option("--grid", ctl.grid_csv, "Write the KDE density grid as CSV");
  ctl_cmd->add_option("--cv-dir", ctl.cv_dir, "Write cross-validation tables into this directory");
  ctl_cmd->add_option("--config", ctl.common.config_path, "Config file (YAML)")->check(CLI::ExistingFile);

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "EDAC series and MAPE of ESM, SEVM and SEDM over a finished project");
  bench_cmd->add_option("project", bench.project, "Project file (YAML)")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("tracking", bench.tracking, "Tracking file covering the whole execution")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--rd", bench.rd, "Realized duration")->required();
  bench_cmd->add_option("--methods", bench.methods, "Comma list of esm, sevm, sedm");
  bench_cmd->add_option("--store", bench.store, "Work-periods store to reuse")->check(CLI::ExistingFile);
  bench_cmd->add_option("--cost-store", bench.cost_store, "Cost store to reuse")->check(CLI::ExistingFile);
  bench_cmd->add_option("--runs", bench.runs, "Runs per simulated store");
  bench_cmd->add_option("--seed", bench.seed, "Master seed");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0 = all cores)");
  bench_cmd->add_option("--out-dir", bench.out_dir, "Directory for CSV and SVG outputs")->capture_default_str();
  bench_cmd->add_option("--config", bench.common.config_path, "Config file (YAML)")->check(CLI::ExistingFile);

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample-execution", "Draw one execution and write it as a tracking file");
  sample_cmd->add_option("project", sample.project, "Project file (YAML)")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--seed", sample.seed, "Seed of the execution")->required();
  sample_cmd->add_option("--out", sample.out, "Tracking file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*plan_cmd) return run_plan(plan);
    if (*sim_cmd) return run_simulate(sim);
    if (*ctl_cmd) return run_control(ctl);
    if (*bench_cmd) return run_benchmark_command(bench);
    if (*sample_cmd) return run_sample(sample);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: invalid project: " << e.what() << '\n';
    return kExitInput;
  } catch (const FingerprintMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const StoreFormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
