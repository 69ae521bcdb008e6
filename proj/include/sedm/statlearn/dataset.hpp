#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sedm::learn {

enum class Task { classification, regression };

/// Row-major feature matrix.
class FeatureMatrix {
public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t cols, std::vector<std::string> names = {});

  std::size_t rows() const { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const { return cols_; }

  void add_row(std::span<const double> row);
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  FeatureMatrix subset(std::span<const std::size_t> rows) const;
  const std::vector<std::string>& names() const { return names_; }
  std::vector<double> column(std::size_t j) const;

private:
  std::size_t cols_ = 0;
  std::vector<std::string> names_;
  std::vector<double> data_;
};

/// Features plus targets. Classification targets are 0/1 labels stored as doubles.
struct Dataset {
  FeatureMatrix x;
  std::vector<double> y;
  Task task = Task::regression;

  std::size_t size() const { return y.size(); }
  Dataset subset(std::span<const std::size_t> rows) const;
  std::vector<int> labels() const;
};

/// Throws std::invalid_argument when lengths differ, the set is empty, or labels are not 0/1.
void check_dataset(const Dataset& data);

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Shuffled split with `train_fraction` of the rows in training. When `labels`
/// is given, each class is split separately so both parts keep its proportion.
TrainTestSplit train_test_split(std::size_t n, double train_fraction, std::uint64_t seed, std::span<const int> labels = {});

}  // namespace sedm::learn
