#include <cmath>
#include <numeric>

#include "dense.hpp"
#include "sedm/statlearn/models.hpp"

namespace sedm::learn {

LdaModel::LdaModel(const Dataset& data) {
  check_dataset(data);
  if (data.task != Task::classification) throw std::invalid_argument("lda needs a classification dataset");
  const std::size_t n = data.size(), d = data.x.cols();

  std::array<std::vector<double>, 2> mean{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  std::array<double, 2> count{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(data.y[i]);
    count[c] += 1.0;
    for (std::size_t j = 0; j < d; ++j) mean[c][j] += data.x(i, j);
  }
  if (count[0] == 0.0 || count[1] == 0.0) throw std::invalid_argument("lda needs at least one sample of each class");
  for (int c = 0; c < 2; ++c)
    for (double& v : mean[c]) v /= count[c];

  // Pooled within-class covariance.
  std::vector<double> cov(d * d, 0.0);
  std::vector<double> dev(d);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(data.y[i]);
    for (std::size_t j = 0; j < d; ++j) dev[j] = data.x(i, j) - mean[c][j];
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k <= j; ++k) cov[j * d + k] += dev[j] * dev[k];
  }
  const double dof = std::max(1.0, static_cast<double>(n) - 2.0);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k <= j; ++k) cov[k * d + j] = cov[j * d + k] /= dof;

  std::vector<double> diff(d);
  for (std::size_t j = 0; j < d; ++j) diff[j] = mean[1][j] - mean[0][j];

  auto w = detail::cholesky_solve(cov, diff);
  if (!w) {
    regularized_ = true;
    for (std::size_t j = 0; j < d; ++j) cov[j * d + j] += 1e-8;
    w = detail::cholesky_solve(cov, diff, 0.0);
    if (!w) throw std::invalid_argument("lda covariance is singular even after regularization");
  }
  weights_ = std::move(*w);
  double mid = 0.0;
  for (std::size_t j = 0; j < d; ++j) mid += weights_[j] * 0.5 * (mean[0][j] + mean[1][j]);
  offset_ = std::log(count[1] / count[0]) - mid;
}

std::array<double, 2> LdaModel::posterior(std::span<const double> x) const {
  if (x.size() != weights_.size()) throw std::invalid_argument("feature count does not match the fitted model");
  const double z = offset_ + std::inner_product(x.begin(), x.end(), weights_.begin(), 0.0);
  // Logistic form of the two Gaussian posteriors, evaluated without overflow.
  double p1;
  if (z >= 0.0) {
    p1 = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p1 = e / (1.0 + e);
  }
  return {1.0 - p1, p1};
}

std::string LdaModel::note() const {
  return regularized_ ? "pooled covariance singular; 1e-8 added to its diagonal" : std::string{};
}

}  // namespace sedm::learn
