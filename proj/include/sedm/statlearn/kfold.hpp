#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sedm::learn {

struct CVPlan {
  int folds = 10;
  int repeats = 1;
  bool stratified = true;
  std::uint64_t seed = 0;
};

CVPlan classification_plan(std::uint64_t seed = 0);  // 10 folds, 1 repeat, stratified
CVPlan regression_plan(std::uint64_t seed = 0);      // 10 folds, 3 repeats

/// Fold index of every sample for one repeat. Stratified plans deal each
/// shuffled class round-robin over the folds, continuing where the previous
/// class stopped, so per-fold class counts differ by at most one.
/// Throws std::invalid_argument when folds < 2 or folds > n.
std::vector<int> kfold_split(std::size_t n, const CVPlan& plan, std::span<const int> labels = {}, int repeat = 0);

}  // namespace sedm::learn
