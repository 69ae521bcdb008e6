#include <algorithm>
#include <cstdint>
#include <numeric>

#include "sedm/statlearn/models.hpp"

namespace sedm::learn {

namespace {

// Node impurity scaled by node size: Gini * n for labels, sum of squared errors for reals.
struct Stats {
  double n = 0.0, sum = 0.0, sum_sq = 0.0;

  void add(double y) {
    n += 1.0;
    sum += y;
    sum_sq += y * y;
  }
  void remove(double y) {
    n -= 1.0;
    sum -= y;
    sum_sq -= y * y;
  }
  double impurity(Task task) const {
    if (n <= 0.0) return 0.0;
    if (task == Task::classification) return 2.0 * sum * (n - sum) / n;
    const double sse = sum_sq - sum * sum / n;
    return sse > 1e-12 * sum_sq ? sse : 0.0;  // cancellation noise counts as pure
  }
};

class Builder {
public:
  Builder(const Dataset& data, int min_leaf, int max_depth, std::vector<CartModel::Node>& nodes,
          const std::vector<std::vector<std::uint32_t>>* presorted)
      : task_(data.task), min_leaf_(static_cast<std::size_t>(min_leaf)), max_depth_(max_depth), nodes_(nodes),
        d_(data.x.cols()), n_(data.size()), sorted_(d_), goes_left_(n_), scratch_(n_) {
    // Sort once per feature; child nodes inherit the order through stable partitions.
    for (std::size_t f = 0; f < d_; ++f) {
      auto& order = sorted_[f];
      order.resize(n_);
      if (presorted) {
        const auto& rows = (*presorted)[f];
        for (std::size_t i = 0; i < n_; ++i) order[i] = {data.x(rows[i], f), data.y[rows[i]], rows[i]};
        continue;
      }
      for (std::size_t i = 0; i < n_; ++i) order[i] = {data.x(i, f), data.y[i], static_cast<std::uint32_t>(i)};
      std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) { return a.x < b.x || (a.x == b.x && a.row < b.row); });
    }
  }

  void build() { grow(0, n_, 0); }

private:
  struct Entry {
    double x;
    double y;
    std::uint32_t row;
  };

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    std::size_t left_count = 0;
    double gain = 0.0;
    double left_sum = 0.0;
  };

  int grow(std::size_t begin, std::size_t end, int depth) {
    Stats node;
    for (std::size_t i = begin; i < end; ++i) node.add(sorted_[0][i].y);
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[id].value = node.sum / node.n;
    nodes_[id].count = end - begin;

    const double parent = node.impurity(task_);
    if (depth >= max_depth_ || end - begin < 2 * min_leaf_ || parent <= 0.0) return id;
    const Split best = find_split(begin, end, node, parent);
    if (best.feature < 0) return id;

    const std::size_t mid = begin + best.left_count;
    int left = -1, right = -1;
    if (depth + 1 >= max_depth_) {
      // Both children are leaves at the depth limit: their means come from the split statistics.
      left = add_leaf(best.left_sum, best.left_count);
      right = add_leaf(node.sum - best.left_sum, end - mid);
    } else {
      for (std::size_t i = begin; i < end; ++i) {
        const auto& e = sorted_[best.feature][i];
        goes_left_[e.row] = e.x <= best.threshold;
      }
      for (std::size_t f = 0; f < d_; ++f) partition(sorted_[f], begin, end);
      left = grow(begin, mid, depth + 1);
      right = grow(mid, end, depth + 1);
    }
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  int add_leaf(double sum, std::size_t count) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[id].value = sum / static_cast<double>(count);
    nodes_[id].count = count;
    return id;
  }

  Split find_split(std::size_t begin, std::size_t end, const Stats& node, double parent) const {
    Split best;
    const double min_gain = 1e-12 * parent;
    for (std::size_t f = 0; f < d_; ++f) {
      const auto& order = sorted_[f];
      Stats left, right = node;
      for (std::size_t i = begin; i + 1 < end; ++i) {
        left.add(order[i].y);
        right.remove(order[i].y);
        const std::size_t n_left = i + 1 - begin;
        if (n_left < min_leaf_) continue;
        if (end - begin - n_left < min_leaf_) break;
        const double a = order[i].x, b = order[i + 1].x;
        if (!(a < b)) continue;
        const double gain = parent - left.impurity(task_) - right.impurity(task_);
        if (gain > best.gain && gain > min_gain) {
          double threshold = a + (b - a) / 2.0;
          if (!(threshold < b)) threshold = a;
          best = {static_cast<int>(f), threshold, n_left, gain, left.sum};
        }
      }
    }
    return best;
  }

  void partition(std::vector<Entry>& order, std::size_t begin, std::size_t end) {
    std::size_t out = begin, spill = 0;
    for (std::size_t i = begin; i < end; ++i) {
      if (goes_left_[order[i].row]) {
        order[out++] = order[i];
      } else {
        scratch_[spill++] = order[i];
      }
    }
    std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(spill), order.begin() + static_cast<std::ptrdiff_t>(out));
  }

  Task task_;
  std::size_t min_leaf_;
  int max_depth_;
  std::vector<CartModel::Node>& nodes_;
  std::size_t d_, n_;
  std::vector<std::vector<Entry>> sorted_;
  std::vector<char> goes_left_;
  std::vector<Entry> scratch_;
};

}  // namespace

CartModel::CartModel(const Dataset& data, int min_leaf, int max_depth)
    : task_(data.task), min_leaf_(min_leaf), max_depth_(max_depth) {
  check_dataset(data);
  if (min_leaf < 1) throw std::invalid_argument("cart min-leaf must be at least 1");
  if (max_depth < 0) throw std::invalid_argument("cart max-depth must be non-negative");
  Builder(data, min_leaf, max_depth, nodes_, nullptr).build();
}

CartModel::CartModel(const Dataset& data, int min_leaf, int max_depth, const std::vector<std::vector<std::uint32_t>>& presorted)
    : task_(data.task), min_leaf_(min_leaf), max_depth_(max_depth) {
  check_dataset(data);
  if (min_leaf < 1) throw std::invalid_argument("cart min-leaf must be at least 1");
  if (max_depth < 0) throw std::invalid_argument("cart max-depth must be non-negative");
  if (presorted.size() != data.x.cols()) throw std::invalid_argument("presorted orders do not match the feature count");
  for (const auto& rows : presorted)
    if (rows.size() != data.size()) throw std::invalid_argument("presorted orders do not match the sample count");
  Builder(data, min_leaf, max_depth, nodes_, &presorted).build();
}

std::vector<std::vector<std::uint32_t>> CartModel::presort(const FeatureMatrix& x) {
  std::vector<std::vector<std::uint32_t>> orders(x.cols());
  std::vector<std::pair<double, std::uint32_t>> keyed(x.rows());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t i = 0; i < x.rows(); ++i) keyed[i] = {x(i, f), static_cast<std::uint32_t>(i)};
    std::sort(keyed.begin(), keyed.end());
    orders[f].resize(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) orders[f][i] = keyed[i].second;
  }
  return orders;
}

double CartModel::predict(std::span<const double> x) const {
  int id = 0;
  while (nodes_[id].feature >= 0) {
    const auto& node = nodes_[id];
    if (static_cast<std::size_t>(node.feature) >= x.size()) throw std::invalid_argument("feature count does not match the fitted model");
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[id].value;
}

Hyper CartModel::hyper() const {
  Hyper h;
  h.min_leaf = min_leaf_;
  h.max_depth = max_depth_;
  return h;
}

std::size_t CartModel::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

std::size_t CartModel::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (nodes_[i].feature >= 0) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

}  // namespace sedm::learn
