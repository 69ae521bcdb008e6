#pragma once

#include <array>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sedm/statlearn/dataset.hpp"

namespace sedm::learn {

enum class Algorithm { lda, cart, knn, ols, ridge };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

struct Hyper {
  int k = 5;             // knn
  double lambda = 0.0;   // ridge
  int min_leaf = 20;     // cart
  int max_depth = 8;     // cart

  std::string describe(Algorithm algorithm) const;
};

class RankDeficient : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Fitted, immutable model. For classifiers predict() is P(label = 1).
class TrainedModel {
public:
  virtual ~TrainedModel() = default;
  virtual Algorithm algorithm() const = 0;
  virtual Task task() const = 0;
  virtual double predict(std::span<const double> x) const = 0;
  virtual Hyper hyper() const { return {}; }
  /// Free-form note about the fit (e.g. regularization applied); empty if none.
  virtual std::string note() const { return {}; }
};

using ModelPtr = std::shared_ptr<const TrainedModel>;

/// Two-class linear discriminant with pooled covariance.
class LdaModel final : public TrainedModel {
public:
  explicit LdaModel(const Dataset& data);
  Algorithm algorithm() const override { return Algorithm::lda; }
  Task task() const override { return Task::classification; }
  double predict(std::span<const double> x) const override { return posterior(x)[1]; }
  std::string note() const override;

  /// Posterior probabilities of labels 0 and 1.
  std::array<double, 2> posterior(std::span<const double> x) const;
  bool regularized() const { return regularized_; }

private:
  std::vector<double> weights_;
  double offset_ = 0.0;
  bool regularized_ = false;
};

/// Binary tree; Gini splits for classification, squared-error splits for regression.
class CartModel final : public TrainedModel {
public:
  CartModel(const Dataset& data, int min_leaf, int max_depth);
  /// Same fit, reusing per-feature row orders of `data` (ascending value,
  /// ties by row index) so callers fitting many subsets sort only once.
  CartModel(const Dataset& data, int min_leaf, int max_depth, const std::vector<std::vector<std::uint32_t>>& presorted);

  /// Per-feature row orders as accepted by the constructor above.
  static std::vector<std::vector<std::uint32_t>> presort(const FeatureMatrix& x);
  Algorithm algorithm() const override { return Algorithm::cart; }
  Task task() const override { return task_; }
  double predict(std::span<const double> x) const override;
  Hyper hyper() const override;

  std::size_t leaf_count() const;
  std::size_t depth() const;

  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    std::size_t count = 0;
  };
  const std::vector<Node>& nodes() const { return nodes_; }

private:
  Task task_;
  int min_leaf_;
  int max_depth_;
  std::vector<Node> nodes_;
};

/// k nearest neighbours on standardized features. All training points tied
/// with the k-th nearest distance are included in the vote or mean.
class KnnModel final : public TrainedModel {
public:
  KnnModel(const Dataset& data, int k);
  ~KnnModel() override;
  Algorithm algorithm() const override { return Algorithm::knn; }
  Task task() const override { return task_; }
  double predict(std::span<const double> x) const override;
  Hyper hyper() const override;

  /// Predictions for several k from one neighbour search.
  std::vector<double> predict_many(std::span<const double> x, std::span<const int> ks) const;

private:
  struct Index;
  Task task_;
  int k_;
  std::unique_ptr<Index> index_;
};

/// Intercept plus coefficients on the raw feature scale (OLS or ridge).
class LinearModel final : public TrainedModel {
public:
  Algorithm algorithm() const override { return algorithm_; }
  Task task() const override { return Task::regression; }
  double predict(std::span<const double> x) const override;
  Hyper hyper() const override;

  double intercept() const { return intercept_; }
  const std::vector<double>& coefficients() const { return coefficients_; }

  /// Least squares with intercept. Throws RankDeficient naming collinear columns.
  static LinearModel ols(const Dataset& data);
  /// Minimizes mean squared residual + lambda * |beta|^2 over standardized
  /// features; the intercept is not penalized.
  static LinearModel ridge(const Dataset& data, double lambda);
  /// Ridge fits for several penalties sharing one Gram matrix. Throws on the
  /// first penalty that cannot be solved.
  static std::vector<LinearModel> ridge_path(const Dataset& data, std::span<const double> lambdas);

private:
  LinearModel() = default;
  Algorithm algorithm_ = Algorithm::ols;
  double lambda_ = 0.0;
  double intercept_ = 0.0;
  std::vector<double> coefficients_;
};

ModelPtr train_classifier(Algorithm algorithm, const Dataset& data, const Hyper& hyper = {});
ModelPtr train_regressor(Algorithm algorithm, const Dataset& data, const Hyper& hyper = {});
ModelPtr train(Algorithm algorithm, const Dataset& data, const Hyper& hyper = {});

double predict_proba(const TrainedModel& model, std::span<const double> x);

}  // namespace sedm::learn
