#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sedm/statlearn/models.hpp"

namespace sedm::learn {

// Standardized training points. With more than two features they are sorted
// by their projection on the leading principal axis. Since |u.(p - q)| <= |p - q| for a unit vector u, a search
// can sweep outward from the query's projection and stop once the projected
// gap alone exceeds the current k-th distance. Cloud features are strongly
// correlated, which makes this sweep tight.
// Pruning test on a lower bound of a squared distance. The bounds carry their
// own rounding, so a small slack keeps points exactly at the bound in play.
namespace {
bool reachable(double lower2, double bound) { return lower2 <= bound * (1.0 + 1e-9); }
}  // namespace

struct KnnModel::Index {
  std::size_t d = 0;
  std::size_t n = 0;
  std::vector<double> mean, scale;
  std::vector<double> axis;        // unit vector
  std::vector<double> projection;  // ascending
  std::vector<double> points;      // row-major, projection order
  std::vector<double> target;      // projection order

  // Two features only: a uniform grid over the coordinates rotated onto the
  // principal axis. The rotation only places points in cells; distances use
  // the standardized coordinates so exact ties survive. Points are stored by cell.
  bool grid = false;
  double cell = 0.0, grid_lo[2] = {0.0, 0.0};
  long nx = 0, ny = 0;
  std::vector<std::uint32_t> cell_start;  // nx * ny + 1 offsets into points

  struct Candidate {
    double dist2;
    double y;
  };

  // The kmax nearest in ascending order plus the points tied with the last of
  // them, so all points tied with the final kmax-th distance can be recovered.
  struct Nearest {
    std::size_t kmax;
    std::vector<Candidate> items;
    std::vector<Candidate> spill;

    double bound() const { return items.size() >= kmax ? items.back().dist2 : std::numeric_limits<double>::infinity(); }

    void offer(double dist2, double y) {
      std::size_t j = items.size();
      if (j < kmax) {
        items.push_back({dist2, y});
      } else {
        const Candidate evicted = items.back();
        if (dist2 > evicted.dist2) return;
        if (dist2 == evicted.dist2) {
          spill.push_back({dist2, y});
          return;
        }
        --j;
        // The bound only shrinks, so an evicted point matters only while it ties the new last.
        const double next_last = kmax > 1 ? std::max(items[kmax - 2].dist2, dist2) : dist2;
        if (evicted.dist2 == next_last) spill.push_back(evicted);
      }
      for (; j > 0 && items[j - 1].dist2 > dist2; --j) items[j] = items[j - 1];
      items[j] = {dist2, y};
    }

    // Ascending by distance, with the spilled points tied with the last one.
    std::vector<Candidate> sorted() {
      const double cut = items.back().dist2;
      for (const auto& c : spill)
        if (c.dist2 == cut) items.push_back(c);
      return std::move(items);
    }
  };

  // D is the compile-time dimension, or 0 to use the runtime value.
  template <std::size_t D>
  double distance2(const double* q, std::size_t i) const {
    const std::size_t dims = D ? D : d;
    double d2 = 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      const double diff = q[j] - points[i * dims + j];
      d2 += diff * diff;
    }
    return d2;
  }

  void build_grid(const std::vector<double>& z, const std::vector<double>& y);
  void search_grid(const double* q, Nearest& best) const;

  template <std::size_t D>
  void search(const double* q, Nearest& best) const {
    const std::size_t dims = D ? D : d;
    double pq = 0.0;
    for (std::size_t j = 0; j < dims; ++j) pq += axis[j] * q[j];
    std::size_t right = static_cast<std::size_t>(std::lower_bound(projection.begin(), projection.end(), pq) - projection.begin());
    std::size_t left = right;  // next candidate on the left is left - 1
    while (true) {
      const double gap_left = left > 0 ? pq - projection[left - 1] : std::numeric_limits<double>::infinity();
      const double gap_right = right < n ? projection[right] - pq : std::numeric_limits<double>::infinity();
      const bool take_left = gap_left <= gap_right;
      const double gap = take_left ? gap_left : gap_right;
      if (!reachable(gap * gap, best.bound())) break;  // also stops when both sides are exhausted
      const std::size_t i = take_left ? --left : right++;
      const double d2 = distance2<D>(q, i);
      if (d2 <= best.bound()) best.offer(d2, target[i]);
    }
  }
};

void KnnModel::Index::search_grid(const double* q, Nearest& best) const {
  const double r0 = axis[0] * q[0] + axis[1] * q[1], r1 = -axis[1] * q[0] + axis[0] * q[1];
  const long cx = std::clamp(static_cast<long>(std::floor((r0 - grid_lo[0]) / cell)), 0L, nx - 1);
  const long cy = std::clamp(static_cast<long>(std::floor((r1 - grid_lo[1]) / cell)), 0L, ny - 1);
  auto gap = [&](double lo, double v) { return std::max({lo - v, v - lo - cell, 0.0}); };
  auto scan = [&](long x, long y) {
    const std::size_t id = static_cast<std::size_t>(y * nx + x);
    for (std::uint32_t i = cell_start[id]; i < cell_start[id + 1]; ++i) {
      const double a = q[0] - points[2 * i], b = q[1] - points[2 * i + 1];
      const double d2 = a * a + b * b;
      if (d2 <= best.bound()) best.offer(d2, target[i]);
    }
  };
  // Cells of one row between two columns, skipping those beyond the current bound.
  auto row = [&](long y, long x_from, long x_to) {
    if (y < 0 || y >= ny) return;
    const double gy = gap(grid_lo[1] + static_cast<double>(y) * cell, r1);
    for (long x = std::max(x_from, 0L); x <= std::min(x_to, nx - 1); ++x) {
      const double gx = gap(grid_lo[0] + static_cast<double>(x) * cell, r0);
      if (reachable(gx * gx + gy * gy, best.bound())) scan(x, y);
    }
  };
  auto column = [&](long x, long y_from, long y_to) {
    if (x < 0 || x >= nx) return;
    const double gx = gap(grid_lo[0] + static_cast<double>(x) * cell, r0);
    for (long y = std::max(y_from, 0L); y <= std::min(y_to, ny - 1); ++y) {
      const double gy = gap(grid_lo[1] + static_cast<double>(y) * cell, r1);
      if (reachable(gx * gx + gy * gy, best.bound())) scan(x, y);
    }
  };
  const long rings = std::max({cx, nx - 1 - cx, cy, ny - 1 - cy});
  scan(cx, cy);
  for (long r = 1; r <= rings; ++r) {
    // Every cell in ring r is at least (r - 1) cells away from the query.
    const double reach = static_cast<double>(r - 1) * cell;
    if (!reachable(reach * reach, best.bound())) break;
    row(cy - r, cx - r, cx + r);
    row(cy + r, cx - r, cx + r);
    column(cx - r, cy - r + 1, cy + r - 1);
    column(cx + r, cy - r + 1, cy + r - 1);
  }
}

void KnnModel::Index::build_grid(const std::vector<double>& z, const std::vector<double>& y) {
  std::vector<double> rot(2 * n);
  double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  for (std::size_t i = 0; i < n; ++i) {
    rot[2 * i] = axis[0] * z[2 * i] + axis[1] * z[2 * i + 1];
    rot[2 * i + 1] = -axis[1] * z[2 * i] + axis[0] * z[2 * i + 1];
    for (int j = 0; j < 2; ++j) {
      lo[j] = std::min(lo[j], rot[2 * i + j]);
      hi[j] = std::max(hi[j], rot[2 * i + j]);
    }
  }
  // About two points per cell on average; the long side never holds more
  // than n / 4 cells.
  const double w = hi[0] - lo[0], h = hi[1] - lo[1], nn = static_cast<double>(n);
  cell = std::max({std::sqrt(w * h * 2.0 / nn), std::max(w, h) * 4.0 / nn, 1e-12});
  grid = true;
  grid_lo[0] = lo[0];
  grid_lo[1] = lo[1];
  nx = static_cast<long>(std::floor(w / cell)) + 1;
  ny = static_cast<long>(std::floor(h / cell)) + 1;

  std::vector<std::uint32_t> cell_of(n);
  cell_start.assign(static_cast<std::size_t>(nx * ny) + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const long cx = std::min(static_cast<long>((rot[2 * i] - lo[0]) / cell), nx - 1);
    const long cy = std::min(static_cast<long>((rot[2 * i + 1] - lo[1]) / cell), ny - 1);
    cell_of[i] = static_cast<std::uint32_t>(cy * nx + cx);
    ++cell_start[cell_of[i] + 1];
  }
  std::partial_sum(cell_start.begin(), cell_start.end(), cell_start.begin());
  std::vector<std::uint32_t> fill(cell_start.begin(), cell_start.end() - 1);
  points.resize(2 * n);
  target.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t t = fill[cell_of[i]]++;
    points[2 * t] = z[2 * i];
    points[2 * t + 1] = z[2 * i + 1];
    target[t] = y[i];
  }
}

namespace {

// Leading eigenvector of a small symmetric matrix by power iteration.
std::vector<double> leading_axis(const std::vector<double>& cov, std::size_t d) {
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d))), next(d);
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < d; ++i) {
      next[i] = 0.0;
      for (std::size_t j = 0; j < d; ++j) next[i] += cov[i * d + j] * v[j];
    }
    const double norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    if (!(norm > 0.0)) break;
    for (auto& x : next) x /= norm;
    double change = 0.0;
    for (std::size_t i = 0; i < d; ++i) change = std::max(change, std::abs(next[i] - v[i]));
    v.swap(next);
    if (change < 1e-12) break;
  }
  return v;
}

}  // namespace

KnnModel::KnnModel(const Dataset& data, int k) : task_(data.task), k_(k), index_(std::make_unique<Index>()) {
  check_dataset(data);
  const std::size_t n = data.size(), d = data.x.cols();
  if (k < 1) throw std::invalid_argument("knn needs k >= 1");
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("knn needs k <= number of training samples");

  auto& ix = *index_;
  ix.d = d;
  ix.n = n;
  ix.mean.assign(d, 0.0);
  ix.scale.assign(d, 0.0);
  const double nn = static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) ix.mean[j] += data.x(i, j);
    ix.mean[j] /= nn;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (data.x(i, j) - ix.mean[j]) * (data.x(i, j) - ix.mean[j]);
    const double sd = n > 1 ? std::sqrt(ss / (nn - 1.0)) : 0.0;
    ix.scale[j] = sd > 0.0 ? sd : 1.0;
  }

  std::vector<double> z(n * d), cov(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = &z[i * d];
    for (std::size_t j = 0; j < d; ++j) row[j] = (data.x(i, j) - ix.mean[j]) / ix.scale[j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) cov[a * d + b] += row[a] * row[b];
  }
  ix.axis = leading_axis(cov, d);

  if (d == 2) {
    ix.build_grid(z, data.y);
    return;
  }

  std::vector<std::pair<double, std::uint32_t>> order(n);
  for (std::size_t i = 0; i < n; ++i)
    order[i] = {std::inner_product(ix.axis.begin(), ix.axis.end(), z.begin() + static_cast<std::ptrdiff_t>(i * d), 0.0),
                static_cast<std::uint32_t>(i)};
  std::sort(order.begin(), order.end());
  ix.projection.resize(n);
  ix.points.resize(n * d);
  ix.target.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t r = order[t].second;
    ix.projection[t] = order[t].first;
    std::copy(z.begin() + static_cast<std::ptrdiff_t>(r * d), z.begin() + static_cast<std::ptrdiff_t>((r + 1) * d),
              ix.points.begin() + static_cast<std::ptrdiff_t>(t * d));
    ix.target[t] = data.y[r];
  }
}

KnnModel::~KnnModel() = default;

std::vector<double> KnnModel::predict_many(std::span<const double> x, std::span<const int> ks) const {
  const auto& ix = *index_;
  if (x.size() != ix.d) throw std::invalid_argument("feature count does not match the fitted model");
  std::size_t kmax = 0;
  for (int k : ks) {
    if (k < 1 || static_cast<std::size_t>(k) > ix.n) throw std::invalid_argument("knn k must lie in [1, training size]");
    kmax = std::max(kmax, static_cast<std::size_t>(k));
  }
  double q[16];
  std::vector<double> qv;
  double* qp = q;
  if (ix.d > 16) {
    qv.resize(ix.d);
    qp = qv.data();
  }
  for (std::size_t j = 0; j < ix.d; ++j) qp[j] = (x[j] - ix.mean[j]) / ix.scale[j];

  Index::Nearest best{kmax, {}, {}};
  best.items.reserve(kmax);
  if (ix.grid) {
    ix.search_grid(qp, best);
  } else {
    ix.search<0>(qp, best);
  }
  const auto items = best.sorted();

  std::vector<double> out;
  out.reserve(ks.size());
  for (int k : ks) {
    // The k nearest plus every point tied with the k-th distance.
    const double boundary = items[static_cast<std::size_t>(k) - 1].dist2;
    double sum = 0.0;
    std::size_t used = 0;
    for (; used < items.size() && (used < static_cast<std::size_t>(k) || items[used].dist2 == boundary); ++used) sum += items[used].y;
    out.push_back(sum / static_cast<double>(used));
  }
  return out;
}

double KnnModel::predict(std::span<const double> x) const {
  const int k[1] = {k_};
  return predict_many(x, k)[0];
}

Hyper KnnModel::hyper() const {
  Hyper h;
  h.k = k_;
  return h;
}

}  // namespace sedm::learn
