#include "sedm/statlearn/kfold.hpp"

#include <stdexcept>
#include <string>

#include "sedm/random.hpp"

namespace sedm::learn {

CVPlan classification_plan(std::uint64_t seed) { return CVPlan{10, 1, true, seed}; }

CVPlan regression_plan(std::uint64_t seed) { return CVPlan{10, 3, false, seed}; }

std::vector<int> kfold_split(std::size_t n, const CVPlan& plan, std::span<const int> labels, int repeat) {
  if (plan.folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(plan.folds) > n)
    throw std::invalid_argument("cannot split " + std::to_string(n) + " samples into " + std::to_string(plan.folds) + " folds");
  if (!labels.empty() && labels.size() != n) throw std::invalid_argument("label count does not match sample count");

  auto engine = make_stream(plan.seed, static_cast<std::uint64_t>(repeat));
  std::vector<int> fold(n, 0);
  std::size_t next = 0;
  auto deal = [&](std::vector<std::size_t> group) {
    shuffle(std::span<std::size_t>(group), engine);
    for (auto i : group) fold[i] = static_cast<int>(next++ % static_cast<std::size_t>(plan.folds));
  };

  if (plan.stratified && !labels.empty()) {
    std::vector<std::size_t> zeros, ones;
    for (std::size_t i = 0; i < n; ++i) (labels[i] == 0 ? zeros : ones).push_back(i);
    deal(std::move(zeros));
    deal(std::move(ones));
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    deal(std::move(all));
  }
  return fold;
}

}  // namespace sedm::learn
