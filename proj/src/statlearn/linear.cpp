#include <cmath>
#include <numeric>

#include "dense.hpp"
#include "sedm/statlearn/models.hpp"

namespace sedm::learn {

double LinearModel::predict(std::span<const double> x) const {
  if (x.size() != coefficients_.size()) throw std::invalid_argument("feature count does not match the fitted model");
  return intercept_ + std::inner_product(x.begin(), x.end(), coefficients_.begin(), 0.0);
}

Hyper LinearModel::hyper() const {
  Hyper h;
  h.lambda = lambda_;
  return h;
}

LinearModel LinearModel::ols(const Dataset& data) {
  check_dataset(data);
  const std::size_t n = data.size(), d = data.x.cols(), p = d + 1;
  if (n <= d) throw std::invalid_argument("least squares needs more samples than features");

  // Modified Gram-Schmidt on [1 | X]; a column that vanishes after projection is collinear.
  std::vector<std::vector<double>> q(p, std::vector<double>(n));
  std::vector<double> r(p * p, 0.0);
  std::vector<std::string> collinear;
  for (std::size_t i = 0; i < n; ++i) {
    q[0][i] = 1.0;
    for (std::size_t j = 0; j < d; ++j) q[j + 1][i] = data.x(i, j);
  }
  for (std::size_t j = 0; j < p; ++j) {
    const double original = std::sqrt(std::inner_product(q[j].begin(), q[j].end(), q[j].begin(), 0.0));
    for (std::size_t k = 0; k < j; ++k) {
      if (r[k * p + k] == 0.0) continue;
      const double proj = std::inner_product(q[k].begin(), q[k].end(), q[j].begin(), 0.0);
      r[k * p + j] = proj;
      for (std::size_t i = 0; i < n; ++i) q[j][i] -= proj * q[k][i];
    }
    const double norm = std::sqrt(std::inner_product(q[j].begin(), q[j].end(), q[j].begin(), 0.0));
    if (!(norm > 1e-10 * original)) {
      collinear.push_back(j == 0 ? "(intercept)" : data.x.names()[j - 1]);
      continue;
    }
    r[j * p + j] = norm;
    for (double& v : q[j]) v /= norm;
  }
  if (!collinear.empty()) {
    std::string names;
    for (const auto& c : collinear) names += (names.empty() ? "" : ", ") + c;
    throw RankDeficient("rank-deficient design; collinear column(s): " + names);
  }

  std::vector<double> beta(p);
  for (std::size_t j = 0; j < p; ++j) beta[j] = std::inner_product(q[j].begin(), q[j].end(), data.y.begin(), 0.0);
  for (std::size_t j = p; j-- > 0;) {
    for (std::size_t k = j + 1; k < p; ++k) beta[j] -= r[j * p + k] * beta[k];
    beta[j] /= r[j * p + j];
  }

  LinearModel m;
  m.algorithm_ = Algorithm::ols;
  m.intercept_ = beta[0];
  m.coefficients_.assign(beta.begin() + 1, beta.end());
  return m;
}

LinearModel LinearModel::ridge(const Dataset& data, double lambda) {
  const double lambdas[1] = {lambda};
  return ridge_path(data, lambdas)[0];
}

std::vector<LinearModel> LinearModel::ridge_path(const Dataset& data, std::span<const double> lambdas) {
  check_dataset(data);
  for (double lambda : lambdas)
    if (!(lambda >= 0.0)) throw std::invalid_argument("ridge penalty must be non-negative");
  const std::size_t n = data.size(), d = data.x.cols();
  const double nn = static_cast<double>(n);

  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += data.x(i, j);
    mean[j] /= nn;
    for (std::size_t i = 0; i < n; ++i) sd[j] += (data.x(i, j) - mean[j]) * (data.x(i, j) - mean[j]);
    sd[j] = std::sqrt(sd[j] / nn);
  }
  const double y_mean = std::accumulate(data.y.begin(), data.y.end(), 0.0) / nn;

  std::vector<double> gram(d * d, 0.0), rhs(d, 0.0);
  std::vector<double> z(d);
  std::vector<std::string> constant;
  for (std::size_t j = 0; j < d; ++j)
    if (!(sd[j] > 0.0)) constant.push_back(data.x.names()[j]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) z[j] = sd[j] > 0.0 ? (data.x(i, j) - mean[j]) / sd[j] : 0.0;
    const double yc = data.y[i] - y_mean;
    for (std::size_t j = 0; j < d; ++j) {
      rhs[j] += z[j] * yc / nn;
      for (std::size_t k = 0; k <= j; ++k) gram[j * d + k] += z[j] * z[k] / nn;
    }
  }
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < j; ++k) gram[k * d + j] = gram[j * d + k];

  std::vector<LinearModel> path;
  path.reserve(lambdas.size());
  for (double lambda : lambdas) {
    auto system = gram;
    for (std::size_t j = 0; j < d; ++j) {
      system[j * d + j] += lambda;
      if (!(sd[j] > 0.0)) system[j * d + j] = 1.0;  // coefficient pinned at zero
    }
    auto beta = detail::cholesky_solve(system, rhs, 1e-13);
    if (!beta) throw RankDeficient("ridge system is singular at lambda = " + std::to_string(lambda) + "; collinear features");
    if (lambda == 0.0 && !constant.empty()) {
      std::string names;
      for (const auto& c : constant) names += (names.empty() ? "" : ", ") + c;
      throw RankDeficient("rank-deficient design; constant column(s) collinear with the intercept: " + names);
    }

    LinearModel m;
    m.algorithm_ = Algorithm::ridge;
    m.lambda_ = lambda;
    m.coefficients_.assign(d, 0.0);
    m.intercept_ = y_mean;
    for (std::size_t j = 0; j < d; ++j) {
      if (!(sd[j] > 0.0)) continue;
      m.coefficients_[j] = (*beta)[j] / sd[j];
      m.intercept_ -= m.coefficients_[j] * mean[j];
    }
    path.push_back(std::move(m));
  }
  return path;
}

}  // namespace sedm::learn
