#include "sedm/statlearn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sedm/random.hpp"

namespace sedm::learn {

FeatureMatrix::FeatureMatrix(std::size_t cols, std::vector<std::string> names) : cols_(cols), names_(std::move(names)) {
  if (cols_ == 0) throw std::invalid_argument("feature matrix needs at least one column");
  if (names_.empty()) {
    for (std::size_t j = 0; j < cols_; ++j) names_.push_back("x" + std::to_string(j + 1));
  }
  if (names_.size() != cols_) throw std::invalid_argument("feature names do not match the column count");
}

void FeatureMatrix::add_row(std::span<const double> row) {
  if (row.size() != cols_) throw std::invalid_argument("row has " + std::to_string(row.size()) + " values, expected " + std::to_string(cols_));
  data_.insert(data_.end(), row.begin(), row.end());
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> rows) const {
  FeatureMatrix out(cols_, names_);
  out.data_.resize(rows.size() * cols_);
  double* dst = out.data_.data();
  for (auto i : rows) {
    if (i >= this->rows()) throw std::out_of_range("row index " + std::to_string(i) + " out of range");
    dst = std::copy_n(data_.data() + i * cols_, cols_, dst);
  }
  return out;
}

std::vector<double> FeatureMatrix::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(rows());
  for (std::size_t i = 0; i < rows(); ++i) out.push_back((*this)(i, j));
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out{x.subset(rows), {}, task};
  out.y.reserve(rows.size());
  for (auto i : rows) out.y.push_back(y[i]);
  return out;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(y.size());
  for (double v : y) out.push_back(static_cast<int>(v));
  return out;
}

void check_dataset(const Dataset& data) {
  if (data.y.empty()) throw std::invalid_argument("dataset is empty");
  if (data.x.rows() != data.y.size())
    throw std::invalid_argument("dataset has " + std::to_string(data.x.rows()) + " feature rows but " +
                                std::to_string(data.y.size()) + " targets");
  for (double v : data.y) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset targets must be finite");
    if (data.task == Task::classification && v != 0.0 && v != 1.0)
      throw std::invalid_argument("classification labels must be 0 or 1");
  }
}

TrainTestSplit train_test_split(std::size_t n, double train_fraction, std::uint64_t seed, std::span<const int> labels) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw std::invalid_argument("train fraction must lie in (0, 1)");
  if (!labels.empty() && labels.size() != n) throw std::invalid_argument("label count does not match sample count");
  auto engine = make_stream(seed, 0x5b117);
  TrainTestSplit split;
  auto deal = [&](std::vector<std::size_t> group) {
    shuffle(std::span<std::size_t>(group), engine);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(group.size())));
    split.train.insert(split.train.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), group.begin() + static_cast<std::ptrdiff_t>(n_train), group.end());
  };
  if (labels.empty()) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    deal(std::move(all));
  } else {
    for (int cls : {0, 1}) {
      std::vector<std::size_t> group;
      for (std::size_t i = 0; i < n; ++i)
        if (labels[i] == cls) group.push_back(i);
      deal(std::move(group));
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace sedm::learn
