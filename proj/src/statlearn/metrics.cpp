#include "sedm/statlearn/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace sedm::learn {

namespace {

template <class T>
void check_pairs(std::span<const T> predicted, std::span<const T> observed) {
  if (predicted.empty()) throw std::invalid_argument("metrics need at least one prediction");
  if (predicted.size() != observed.size()) throw std::invalid_argument("prediction and observation counts differ");
}

long total(const Confusion& c) { return c[0][0] + c[0][1] + c[1][0] + c[1][1]; }

}  // namespace

Confusion confusion(std::span<const int> predicted, std::span<const int> observed) {
  check_pairs(predicted, observed);
  Confusion c{};
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if ((predicted[i] != 0 && predicted[i] != 1) || (observed[i] != 0 && observed[i] != 1))
      throw std::invalid_argument("labels must be 0 or 1");
    ++c[observed[i]][predicted[i]];
  }
  return c;
}

double accuracy(const Confusion& c) {
  const long n = total(c);
  if (n <= 0) throw std::invalid_argument("empty confusion matrix");
  return static_cast<double>(c[0][0] + c[1][1]) / static_cast<double>(n);
}

double accuracy(std::span<const int> predicted, std::span<const int> observed) {
  return accuracy(confusion(predicted, observed));
}

std::optional<double> kappa(const Confusion& c) {
  // Integer form (n * agree - chance) / (n^2 - chance) rounds only once.
  const long long n = total(c);
  if (n <= 0) throw std::invalid_argument("empty confusion matrix");
  const long long agree = c[0][0] + c[1][1];
  long long chance = 0;
  for (int k = 0; k < 2; ++k) chance += (c[k][0] + c[k][1]) * (c[0][k] + c[1][k]);
  if (chance >= n * n) return std::nullopt;
  return static_cast<double>(n * agree - chance) / static_cast<double>(n * n - chance);
}

std::optional<double> kappa(std::span<const int> predicted, std::span<const int> observed) {
  return kappa(confusion(predicted, observed));
}

double mae(std::span<const double> predicted, std::span<const double> observed) {
  check_pairs(predicted, observed);
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) sum += std::abs(predicted[i] - observed[i]);
  return sum / static_cast<double>(predicted.size());
}

double rmse(std::span<const double> predicted, std::span<const double> observed) {
  check_pairs(predicted, observed);
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) sum += (predicted[i] - observed[i]) * (predicted[i] - observed[i]);
  return std::sqrt(sum / static_cast<double>(predicted.size()));
}

std::optional<double> r_squared(std::span<const double> predicted, std::span<const double> observed) {
  check_pairs(predicted, observed);
  double mean = 0.0;
  for (double v : observed) mean += v;
  mean /= static_cast<double>(observed.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    ss_tot += (observed[i] - mean) * (observed[i] - mean);
    ss_res += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
  }
  if (ss_tot <= 0.0) return std::nullopt;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace sedm::learn
