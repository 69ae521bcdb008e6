#include "sedm/forecast.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "sedm/random.hpp"
#include "sedm/statlearn/metrics.hpp"

namespace sedm {

namespace {

using learn::Dataset;
using learn::Task;

struct LearningData {
  Dataset delay;      // classification on delay_flag
  Dataset deviation;  // regression on delay_amount
};

LearningData learning_data(const PointCloud& cloud, const SimulationStore& store) {
  const bool cost = cloud.measure == ValueMeasure::cost;
  std::vector<std::string> names = cost ? std::vector<std::string>{"at_j", "ac_j"} : std::vector<std::string>{"ad_j", "tad_j"};
  LearningData d{{learn::FeatureMatrix(2, names), {}, Task::classification},
                 {learn::FeatureMatrix(2, names), {}, Task::regression}};
  for (std::size_t j = 0; j < cloud.points.size(); ++j) {
    const double row[2] = {cloud.points[j].time, cloud.points[j].actual};
    d.delay.x.add_row(row);
    d.deviation.x.add_row(row);
    d.delay.y.push_back(store.records[j].outcome.delay_flag);
    d.deviation.y.push_back(store.records[j].outcome.delay_amount);
  }
  return d;
}

std::vector<learn::MetricSamples> holdout_metrics(const learn::TrainedModel& model, const Dataset& test) {
  std::vector<double> predicted;
  predicted.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) predicted.push_back(model.predict(test.x.row(i)));
  if (test.task == Task::classification) {
    std::vector<int> p, o;
    for (double v : predicted) p.push_back(v > 0.5 ? 1 : 0);
    for (double v : test.y) o.push_back(static_cast<int>(v));
    const auto c = learn::confusion(p, o);
    return {{"Accuracy", {learn::accuracy(c)}}, {"Kappa", {learn::kappa(c)}}};
  }
  return {{"MAE", {learn::mae(predicted, test.y)}},
          {"RMSE", {learn::rmse(predicted, test.y)}},
          {"Rsquared", {learn::r_squared(predicted, test.y)}}};
}

// Cross-validates on the training part, refits the winner on all of it and scores the test part.
std::pair<learn::ModelPtr, SelectedModel> fit_selected(const Dataset& train, const Dataset& test, const learn::CVPlan& plan,
                                                        const std::vector<learn::Candidate>& candidates) {
  SelectedModel selected;
  selected.cv = learn::cross_validate(train, plan, candidates);
  const auto& best = selected.cv.results[learn::select_model(selected.cv)];
  selected.algorithm = best.algorithm;
  selected.hyper = best.hyper;
  auto model = learn::train(best.algorithm, train, best.hyper);
  selected.note = model->note();
  if (test.size() > 0) selected.holdout = holdout_metrics(*model, test);
  return {std::move(model), std::move(selected)};
}

learn::CVPlan make_plan(const ForecastOptions& options, std::uint64_t seed, int repeats, bool stratified, std::size_t n) {
  if (n < 2) throw std::invalid_argument("too few simulated runs in the training split to cross-validate");
  learn::CVPlan plan;
  plan.folds = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.folds), n));
  plan.repeats = repeats;
  plan.stratified = stratified;
  plan.seed = seed;
  return plan;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::esm: return "ESM";
    case Method::sevm: return "SEVM";
    case Method::sedm: return "SEDM";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  std::string lower;
  for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "esm") return Method::esm;
  if (lower == "sevm") return Method::sevm;
  if (lower == "sedm") return Method::sedm;
  throw std::invalid_argument("unknown method '" + text + "' (expected esm, sevm or sedm)");
}

std::vector<Method> parse_methods(const std::string& comma_list) {
  std::vector<Method> out;
  std::stringstream in(comma_list);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    item = item.substr(first, item.find_last_not_of(" \t") - first + 1);
    const auto m = parse_method(item);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw std::invalid_argument("no forecasting method given");
  return out;
}

ForecastResult stochastic_forecast(Method method, const ControlSnapshot& snapshot, const SimulationStore& store,
                                   const ForecastOptions& options) {
  if (method == Method::esm) throw std::invalid_argument("ESM is not a stochastic method");
  if (snapshot.fingerprint != store.fingerprint)
    throw FingerprintMismatch("simulation store fingerprint " + fingerprint_hex(store.fingerprint) +
                              " does not match project fingerprint " + fingerprint_hex(snapshot.fingerprint));
  if (snapshot.measure != store.config.value_measure)
    throw std::invalid_argument("snapshot is valued in " + to_string(snapshot.measure) + " but the store in " +
                                to_string(store.config.value_measure));
  if (!store.has_trajectories()) throw std::invalid_argument("simulation store has no trajectories");

  ForecastResult r;
  r.method = method;
  r.control_time = snapshot.actual_time;
  r.bpd = store.bpd;
  r.observed = {static_cast<double>(snapshot.actual_time), snapshot.actual_value};

  if (snapshot.complete) {
    r.basis = "observed";
    r.edac = snapshot.finish_time;
    r.expected_deviation = r.edac - r.bpd;
    r.p_delay = r.edac > r.bpd ? 1.0 : 0.0;
    return r;
  }

  const auto cloud = build_point_cloud(store, snapshot.earned_value);
  const auto data = learning_data(cloud, store);
  const std::uint64_t seed = substream_seed(options.seed, static_cast<std::uint64_t>(snapshot.actual_time));
  const auto labels = data.delay.labels();
  const auto split = learn::train_test_split(data.delay.size(), options.train_fraction, seed, labels);
  const double x[2] = {r.observed.time, r.observed.actual};

  // Classification: probability of finishing late.
  const Dataset delay_train = data.delay.subset(split.train);
  const Dataset delay_test = data.delay.subset(split.test);
  double late = 0.0;
  for (double v : delay_train.y) late += v;
  if (late == 0.0 || late == static_cast<double>(delay_train.size())) {
    r.p_delay = late / static_cast<double>(delay_train.size());
    r.basis = "single-class";
  } else {
    const auto plan = make_plan(options, mix64(seed ^ 0xc1a55), options.classification_repeats, true, delay_train.size());
    auto [model, selected] = fit_selected(delay_train, delay_test, plan,
                                          learn::expand_grid(learn::classification_roster(), options.grid));
    r.p_delay = learn::predict_proba(*model, x);
    r.classifier = std::move(selected);
    r.basis = "models";
  }

  // Regression: expected deviation from the baseline duration.
  const Dataset dev_train = data.deviation.subset(split.train);
  const Dataset dev_test = data.deviation.subset(split.test);
  const bool constant = std::all_of(dev_train.y.begin(), dev_train.y.end(), [&](double v) { return v == dev_train.y.front(); });
  if (constant) {
    r.expected_deviation = dev_train.y.front();
    if (r.basis != "single-class") r.basis = "constant-target";
  } else {
    const auto plan = make_plan(options, mix64(seed ^ 0x4e6), options.regression_repeats, false, dev_train.size());
    auto [model, selected] = fit_selected(dev_train, dev_test, plan, learn::expand_grid(learn::regression_roster(), options.grid));
    r.expected_deviation = model->predict(x);
    r.regressor = std::move(selected);
  }
  r.edac = r.bpd + r.expected_deviation;

  if (options.anomaly) r.anomaly_percentile = anomaly_percentile(cloud, r.observed.time, r.observed.actual, options.kde);
  return r;
}

ForecastResult sedm_forecast(const ControlSnapshot& snapshot, const SimulationStore& store, const ForecastOptions& options) {
  if (snapshot.measure != ValueMeasure::work_periods) throw std::invalid_argument("SEDM needs a work-period snapshot");
  return stochastic_forecast(Method::sedm, snapshot, store, options);
}

ForecastResult sevm_forecast(const ControlSnapshot& snapshot, const SimulationStore& store, const ForecastOptions& options) {
  if (snapshot.measure != ValueMeasure::cost) throw std::invalid_argument("SEVM needs a cost-valued snapshot");
  return stochastic_forecast(Method::sevm, snapshot, store, options);
}

ForecastResult esm_forecast(const ControlSnapshot& snapshot) {
  ForecastResult r;
  r.method = Method::esm;
  r.control_time = snapshot.actual_time;
  r.bpd = snapshot.bpd;
  r.observed = {static_cast<double>(snapshot.actual_time), snapshot.actual_value};
  if (snapshot.complete) {
    r.basis = "observed";
    r.edac = snapshot.finish_time;
  } else {
    r.basis = "earned-schedule";
    r.edac = esm_forecast(snapshot.actual_time, snapshot.earned_time, snapshot.bpd);
  }
  r.expected_deviation = r.edac - r.bpd;
  return r;
}

double mape(double rd, std::span<const double> edac_series) {
  if (!(rd > 0.0)) throw std::invalid_argument("MAPE needs a positive realized duration");
  if (edac_series.empty()) throw std::invalid_argument("MAPE needs at least one forecast");
  double sum = 0.0;
  for (double e : edac_series) sum += std::abs(rd - e) / rd;
  return 100.0 * sum / static_cast<double>(edac_series.size());
}

}  // namespace sedm
