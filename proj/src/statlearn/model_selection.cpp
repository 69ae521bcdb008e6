#include "sedm/statlearn/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "sedm/statlearn/metrics.hpp"
#include "sedm/text.hpp"

namespace sedm::learn {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::lda: return "lda";
    case Algorithm::cart: return "cart";
    case Algorithm::knn: return "knn";
    case Algorithm::ols: return "ols";
    case Algorithm::ridge: return "ridge";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& text) {
  for (auto a : {Algorithm::lda, Algorithm::cart, Algorithm::knn, Algorithm::ols, Algorithm::ridge})
    if (to_string(a) == text) return a;
  throw std::invalid_argument("unknown algorithm '" + text + "' (expected lda, cart, knn, ols or ridge)");
}

std::string Hyper::describe(Algorithm algorithm) const {
  switch (algorithm) {
    case Algorithm::knn: return "k=" + std::to_string(k);
    case Algorithm::ridge: return "lambda=" + format_number(lambda);
    case Algorithm::cart: return "min_leaf=" + std::to_string(min_leaf) + " max_depth=" + std::to_string(max_depth);
    default: return "";
  }
}

ModelPtr train(Algorithm algorithm, const Dataset& data, const Hyper& hyper) {
  switch (algorithm) {
    case Algorithm::lda: return std::make_shared<LdaModel>(data);
    case Algorithm::cart: return std::make_shared<CartModel>(data, hyper.min_leaf, hyper.max_depth);
    case Algorithm::knn: return std::make_shared<KnnModel>(data, hyper.k);
    case Algorithm::ols:
      if (data.task != Task::regression) throw std::invalid_argument("ols is a regression algorithm");
      return std::make_shared<LinearModel>(LinearModel::ols(data));
    case Algorithm::ridge:
      if (data.task != Task::regression) throw std::invalid_argument("ridge is a regression algorithm");
      return std::make_shared<LinearModel>(LinearModel::ridge(data, hyper.lambda));
  }
  throw std::invalid_argument("unknown algorithm");
}

ModelPtr train_classifier(Algorithm algorithm, const Dataset& data, const Hyper& hyper) {
  if (data.task != Task::classification) throw std::invalid_argument("train_classifier needs a classification dataset");
  if (algorithm != Algorithm::lda && algorithm != Algorithm::cart && algorithm != Algorithm::knn)
    throw std::invalid_argument(to_string(algorithm) + " is not a classifier");
  return train(algorithm, data, hyper);
}

ModelPtr train_regressor(Algorithm algorithm, const Dataset& data, const Hyper& hyper) {
  if (data.task != Task::regression) throw std::invalid_argument("train_regressor needs a regression dataset");
  if (algorithm == Algorithm::lda) throw std::invalid_argument("lda is not a regressor");
  return train(algorithm, data, hyper);
}

double predict_proba(const TrainedModel& model, std::span<const double> x) {
  if (model.task() != Task::classification) throw std::invalid_argument("predict_proba needs a classifier");
  return std::clamp(model.predict(x), 0.0, 1.0);
}

std::vector<Algorithm> classification_roster() { return {Algorithm::lda, Algorithm::cart, Algorithm::knn}; }

std::vector<Algorithm> regression_roster() { return {Algorithm::ols, Algorithm::ridge, Algorithm::cart, Algorithm::knn}; }

std::vector<Candidate> expand_grid(const std::vector<Algorithm>& roster, const Grid& grid) {
  std::vector<Candidate> out;
  for (auto a : roster) {
    Hyper h;
    h.min_leaf = grid.cart_min_leaf;
    h.max_depth = grid.cart_max_depth;
    if (a == Algorithm::knn) {
      for (int k : grid.knn_k) {
        h.k = k;
        out.push_back({a, h});
      }
    } else if (a == Algorithm::ridge) {
      for (double l : grid.ridge_lambda) {
        h.lambda = l;
        out.push_back({a, h});
      }
    } else {
      out.push_back({a, h});
    }
  }
  return out;
}

namespace {

double quantile7(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<std::string> metric_names(Task task) {
  if (task == Task::classification) return {"Accuracy", "Kappa"};
  return {"MAE", "RMSE", "Rsquared"};
}

std::optional<double> mean_of(const MetricSamples& m) {
  const auto s = m.summary();
  if (!s.defined()) return std::nullopt;
  return s.mean;
}

// Per-fold metric values for one candidate's predictions.
std::vector<std::optional<double>> score(Task task, const std::vector<double>& predicted, const std::vector<double>& observed) {
  if (task == Task::classification) {
    std::vector<int> p, o;
    for (double v : predicted) p.push_back(v > 0.5 ? 1 : 0);
    for (double v : observed) o.push_back(static_cast<int>(v));
    const auto c = confusion(p, o);
    return {accuracy(c), kappa(c)};
  }
  return {mae(predicted, observed), rmse(predicted, observed), r_squared(predicted, observed)};
}

// True when a ranks strictly ahead of b (both evaluated on the task's criteria).
bool better(Task task, const std::vector<std::optional<double>>& a, const std::vector<std::optional<double>>& b) {
  auto cmp = [](const std::optional<double>& x, const std::optional<double>& y, bool higher) -> int {
    if (x && !y) return 1;
    if (!x && y) return -1;
    if (!x && !y) return 0;
    // Differences at rounding-noise level count as ties so the earlier entry wins.
    if (std::abs(*x - *y) <= 1e-9 * std::max(std::abs(*x), std::abs(*y))) return 0;
    return (higher ? *x > *y : *x < *y) ? 1 : -1;
  };
  if (task == Task::classification) {
    for (std::size_t i : {0u, 1u})
      if (int c = cmp(a[i], b[i], true)) return c > 0;
    return false;
  }
  for (std::size_t i : {1u, 0u})  // RMSE, then MAE
    if (int c = cmp(a[i], b[i], false)) return c > 0;
  return false;
}

std::vector<std::optional<double>> means(const AlgorithmResult& r) {
  std::vector<std::optional<double>> out;
  for (const auto& m : r.metrics) out.push_back(mean_of(m));
  return out;
}

}  // namespace

MetricSummary summarize(const std::vector<std::optional<double>>& samples) {
  MetricSummary s;
  std::vector<double> values;
  for (const auto& v : samples) {
    if (v) {
      values.push_back(*v);
    } else {
      ++s.missing;
    }
  }
  s.available = static_cast<int>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile7(values, 0.25);
  s.median = quantile7(values, 0.5);
  s.q3 = quantile7(values, 0.75);
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  return s;
}

MetricSummary MetricSamples::summary() const { return summarize(values); }

const MetricSamples& AlgorithmResult::metric(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return m;
  throw std::invalid_argument("no metric named '" + name + "'");
}

bool AlgorithmResult::usable() const { return !metrics.empty() && metrics.front().summary().defined(); }

CVReport cross_validate(const Dataset& data, const CVPlan& plan, const std::vector<Candidate>& candidates) {
  check_dataset(data);
  if (candidates.empty()) throw std::invalid_argument("cross-validation needs at least one candidate");
  if (plan.repeats < 1) throw std::invalid_argument("cross-validation needs at least one repeat");
  const auto names = metric_names(data.task);
  const auto labels = data.task == Task::classification ? data.labels() : std::vector<int>{};

  // samples[c][m] across folds for candidate c.
  std::vector<std::vector<MetricSamples>> samples(candidates.size());
  for (auto& s : samples)
    for (const auto& n : names) s.push_back({n, {}});
  auto record_na = [&](std::size_t c) {
    for (auto& m : samples[c]) m.values.push_back(std::nullopt);
  };
  std::vector<std::string> failures(candidates.size());

  // CART folds reuse one global sort: filtering it to a fold keeps the order.
  const bool any_cart = std::any_of(candidates.begin(), candidates.end(), [](const Candidate& c) { return c.algorithm == Algorithm::cart; });
  const auto global_order = any_cart ? CartModel::presort(data.x) : std::vector<std::vector<std::uint32_t>>{};
  std::vector<std::uint32_t> local(data.size());

  for (int r = 0; r < plan.repeats; ++r) {
    const auto fold = kfold_split(data.size(), plan, labels, r);
    for (int f = 0; f < plan.folds; ++f) {
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
      const Dataset train_set = data.subset(train_rows);
      const Dataset test_set = data.subset(test_rows);
      std::vector<std::vector<std::uint32_t>> fold_order;

      // kNN candidates share one fitted index per fold.
      std::vector<std::size_t> knn;
      for (std::size_t c = 0; c < candidates.size(); ++c)
        if (candidates[c].algorithm == Algorithm::knn) knn.push_back(c);
      if (!knn.empty()) {
        std::vector<int> ks;
        std::vector<std::size_t> valid;
        for (auto c : knn) {
          if (candidates[c].hyper.k >= 1 && static_cast<std::size_t>(candidates[c].hyper.k) <= train_set.size()) {
            ks.push_back(candidates[c].hyper.k);
            valid.push_back(c);
          } else {
            record_na(c);
            failures[c] = "k exceeds the training fold size";
          }
        }
        if (!valid.empty()) {
          const KnnModel model(train_set, 1);
          std::vector<std::vector<double>> predicted(valid.size());
          for (std::size_t i = 0; i < test_set.size(); ++i) {
            const auto p = model.predict_many(test_set.x.row(i), ks);
            for (std::size_t v = 0; v < valid.size(); ++v) predicted[v].push_back(p[v]);
          }
          for (std::size_t v = 0; v < valid.size(); ++v) {
            const auto s = score(data.task, predicted[v], test_set.y);
            for (std::size_t m = 0; m < s.size(); ++m) samples[valid[v]][m].values.push_back(s[m]);
          }
        }
      }

      auto evaluate = [&](std::size_t c, const TrainedModel& model) {
        std::vector<double> predicted;
        predicted.reserve(test_set.size());
        for (std::size_t i = 0; i < test_set.size(); ++i) predicted.push_back(model.predict(test_set.x.row(i)));
        const auto s = score(data.task, predicted, test_set.y);
        for (std::size_t m = 0; m < s.size(); ++m) samples[c][m].values.push_back(s[m]);
      };

      // Ridge candidates share one Gram matrix per fold; any failure falls back to separate fits.
      std::vector<std::size_t> ridge;
      if (data.task == Task::regression)
        for (std::size_t c = 0; c < candidates.size(); ++c)
          if (candidates[c].algorithm == Algorithm::ridge) ridge.push_back(c);
      bool ridge_done = false;
      if (ridge.size() > 1) {
        std::vector<double> lambdas;
        for (auto c : ridge) lambdas.push_back(candidates[c].hyper.lambda);
        try {
          const auto path = LinearModel::ridge_path(train_set, lambdas);
          for (std::size_t v = 0; v < ridge.size(); ++v) evaluate(ridge[v], path[v]);
          ridge_done = true;
        } catch (const std::invalid_argument&) {
        }
      }

      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (candidates[c].algorithm == Algorithm::knn) continue;
        if (ridge_done && candidates[c].algorithm == Algorithm::ridge) continue;
        ModelPtr model;
        try {
          if (candidates[c].algorithm == Algorithm::cart) {
            if (fold_order.empty()) {
              // train_rows is ascending, so local indices preserve the tie order by row.
              for (std::size_t i = 0; i < train_rows.size(); ++i) local[train_rows[i]] = static_cast<std::uint32_t>(i);
              fold_order.resize(global_order.size());
              for (std::size_t j = 0; j < global_order.size(); ++j) {
                fold_order[j].reserve(train_rows.size());
                for (auto row : global_order[j])
                  if (fold[row] != f) fold_order[j].push_back(local[row]);
              }
            }
            model = std::make_shared<CartModel>(train_set, candidates[c].hyper.min_leaf, candidates[c].hyper.max_depth, fold_order);
          } else {
            model = train(candidates[c].algorithm, train_set, candidates[c].hyper);
          }
        } catch (const std::invalid_argument& e) {
          record_na(c);
          failures[c] = e.what();
          continue;
        }
        evaluate(c, *model);
      }
    }
  }

  // Keep the best configuration of each algorithm, in first-appearance order.
  CVReport report;
  report.task = data.task;
  report.plan = plan;
  std::map<Algorithm, std::size_t> slot;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    AlgorithmResult result{candidates[c].algorithm, candidates[c].hyper, samples[c], {}};
    if (!result.usable()) result.failure = failures[c];
    auto it = slot.find(result.algorithm);
    if (it == slot.end()) {
      slot[result.algorithm] = report.results.size();
      report.results.push_back(std::move(result));
    } else if (better(data.task, means(result), means(report.results[it->second]))) {
      report.results[it->second] = std::move(result);
    }
  }
  return report;
}

std::size_t select_model(const CVReport& report) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    if (!report.results[i].usable()) continue;
    if (!best || better(report.task, means(report.results[i]), means(report.results[*best]))) best = i;
  }
  if (!best) throw std::runtime_error("no algorithm could be fitted on any fold");
  return *best;
}

void write_cv_table(std::ostream& out, const CVReport& report) {
  auto cell = [](const MetricSummary& s, double v) { return s.defined() ? format_fixed(v, 7) : std::string("NA"); };
  out << "algorithm,hyperparameters,metric,Min,1st Qu,Median,Mean,3rd Qu,Max,NA's\n";
  for (const auto& r : report.results) {
    for (const auto& m : r.metrics) {
      const auto s = m.summary();
      out << to_string(r.algorithm) << ',' << r.hyper.describe(r.algorithm) << ',' << m.name << ',' << cell(s, s.min) << ','
          << cell(s, s.q1) << ',' << cell(s, s.median) << ',' << cell(s, s.mean) << ',' << cell(s, s.q3) << ','
          << cell(s, s.max) << ',' << s.missing << '\n';
    }
  }
}

}  // namespace sedm::learn
