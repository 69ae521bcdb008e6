#include "sedm/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <cstdio>

#include "sedm/text.hpp"

namespace sedm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

std::vector<std::string> check_distribution(const DurationDistribution& dist) {
  std::vector<std::string> problems;
  std::visit(
      Overloaded{
          [&](const Triangular& t) {
            if (!finite_all({t.optimistic, t.most_likely, t.pessimistic})) {
              problems.emplace_back("triangular parameters must be finite");
              return;
            }
            if (t.optimistic > t.most_likely || t.most_likely > t.pessimistic)
              problems.emplace_back("triangular parameters must satisfy a <= m <= b");
            if (!(t.optimistic < t.pessimistic)) problems.emplace_back("triangular requires a < b");
            if (t.optimistic <= 0.0) problems.emplace_back("triangular lower bound must be positive");
          },
          [&](const Uniform& u) {
            if (!finite_all({u.lo, u.hi})) {
              problems.emplace_back("uniform bounds must be finite");
              return;
            }
            if (!(u.lo < u.hi)) problems.emplace_back("uniform requires lo < hi");
            if (u.lo <= 0.0) problems.emplace_back("uniform lower bound must be positive");
          },
          [&](const TruncatedNormal& n) {
            if (!finite_all({n.mean, n.sd})) {
              problems.emplace_back("normal parameters must be finite");
              return;
            }
            if (!(n.sd > 0.0)) problems.emplace_back("normal requires sd > 0");
            // Rejection below the floor must terminate in reasonable time.
            if (n.mean + 6.0 * n.sd <= kNormalFloor)
              problems.emplace_back("normal distribution has negligible mass above the floor");
          },
          [&](const Discrete& d) {
            if (d.atoms.empty()) {
              problems.emplace_back("discrete distribution needs at least one atom");
              return;
            }
            double total = 0.0;
            for (const auto& atom : d.atoms) {
              if (!(atom.value > 0.0) || !std::isfinite(atom.value))
                problems.emplace_back("discrete values must be positive");
              if (!(atom.probability >= 0.0)) problems.emplace_back("discrete probabilities must be nonnegative");
              total += atom.probability;
            }
            if (std::abs(total - 1.0) > 1e-9) problems.emplace_back("discrete probabilities must sum to 1");
          },
      },
      dist);
  return problems;
}

std::string distribution_kind(const DurationDistribution& dist) {
  return std::visit(Overloaded{
                        [](const Triangular&) { return std::string("triangular"); },
                        [](const Uniform&) { return std::string("uniform"); },
                        [](const TruncatedNormal&) { return std::string("normal"); },
                        [](const Discrete&) { return std::string("discrete"); },
                    },
                    dist);
}

bool ValidationReport::has(ValidationIssue::Kind kind) const {
  return std::any_of(issues.begin(), issues.end(), [kind](const auto& i) { return i.kind == kind; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << "activity '" << issue.activity_id << "': " << issue.message << '\n';
  }
  return out.str();
}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("invalid project network:\n" + report.to_string()), report_(std::move(report)) {}

ProjectNetwork::ProjectNetwork(std::vector<Activity> activities, std::string name)
    : name_(std::move(name)), activities_(std::move(activities)) {
  for (std::size_t i = 0; i < activities_.size(); ++i) {
    index_.emplace(activities_[i].id, i);  // first occurrence wins; duplicates are reported by validate()
  }
}

std::optional<std::size_t> ProjectNetwork::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double ProjectNetwork::total_planned_work() const {
  double total = 0.0;
  for (const auto& a : activities_) total += a.planned_duration;
  return total;
}

bool ProjectNetwork::has_costs() const {
  return !activities_.empty() &&
         std::all_of(activities_.begin(), activities_.end(), [](const Activity& a) { return a.cost_per_period.has_value(); });
}

namespace {

// Returns one edge (pred -> succ) lying on a cycle, if any. Only resolvable,
// non-self edges are considered.
std::optional<std::pair<std::size_t, std::size_t>> find_cycle_edge(const ProjectNetwork& network) {
  const std::size_t n = network.size();
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& p : network[i].predecessors) {
      auto j = network.index_of(p);
      if (j && *j != i) preds[i].push_back(*j);
    }
  }
  // 0 = unvisited, 1 = on stack, 2 = done. Walks predecessor edges.
  std::vector<int> state(n, 0);
  std::optional<std::pair<std::size_t, std::size_t>> found;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    state[v] = 1;
    for (std::size_t p : preds[v]) {
      if (found) return;
      if (state[p] == 1) {
        found = std::make_pair(p, v);
        return;
      }
      if (state[p] == 0) visit(p);
    }
    state[v] = 2;
  };
  for (std::size_t v = 0; v < n && !found; ++v) {
    if (state[v] == 0) visit(v);
  }
  return found;
}

}  // namespace

ValidationReport validate(const ProjectNetwork& network) {
  using Kind = ValidationIssue::Kind;
  ValidationReport report;
  auto add = [&](Kind kind, const std::string& id, std::string message) {
    report.issues.push_back({kind, id, std::move(message)});
  };

  std::unordered_map<std::string, int> seen;
  for (const auto& a : network.activities()) {
    if (++seen[a.id] == 2) add(Kind::duplicate_id, a.id, "duplicate activity id");
  }

  for (std::size_t i = 0; i < network.size(); ++i) {
    const auto& a = network[i];
    if (a.planned_duration < 1) add(Kind::planned_duration, a.id, "planned duration must be at least 1 period");
    for (const auto& p : a.predecessors) {
      if (p == a.id) {
        add(Kind::self_reference, a.id, "activity lists itself as a predecessor");
      } else if (!network.index_of(p)) {
        add(Kind::unknown_predecessor, a.id, "unknown predecessor '" + p + "'");
      }
    }
    for (auto& problem : check_distribution(a.distribution)) add(Kind::distribution, a.id, std::move(problem));
    if (a.cost_per_period && !(*a.cost_per_period >= 0.0 && std::isfinite(*a.cost_per_period)))
      add(Kind::cost, a.id, "cost per period must be a nonnegative number");
  }

  if (auto edge = find_cycle_edge(network)) {
    const auto& from = network[edge->first].id;
    const auto& to = network[edge->second].id;
    add(Kind::cycle, to, "cycle detected through edge " + from + " -> " + to);
  }
  return report;
}

std::uint64_t network_fingerprint(const ProjectNetwork& network) {
  std::ostringstream canon;
  auto num = [&](double v) { canon << format_number(v) << ';'; };
  for (const auto& a : network.activities()) {
    canon << "id=" << a.id << ";preds=";
    for (const auto& p : a.predecessors) canon << p << ',';
    canon << ";pd=" << a.planned_duration << ";dist=" << distribution_kind(a.distribution) << ':';
    std::visit(Overloaded{
                   [&](const Triangular& t) { num(t.optimistic), num(t.most_likely), num(t.pessimistic); },
                   [&](const Uniform& u) { num(u.lo), num(u.hi); },
                   [&](const TruncatedNormal& n) { num(n.mean), num(n.sd); },
                   [&](const Discrete& d) {
                     for (const auto& atom : d.atoms) num(atom.value), num(atom.probability);
                   },
               },
               a.distribution);
    canon << "cost=";
    if (a.cost_per_period) num(*a.cost_per_period);
    canon << '\n';
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon.str()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint));
  return buf;
}

void require_valid(const ProjectNetwork& network) {
  auto report = validate(network);
  if (!report.ok()) throw ValidationError(std::move(report));
}

std::vector<std::vector<std::size_t>> predecessor_indices(const ProjectNetwork& network) {
  std::vector<std::vector<std::size_t>> preds(network.size());
  for (std::size_t i = 0; i < network.size(); ++i) {
    for (const auto& p : network[i].predecessors) {
      auto j = network.index_of(p);
      if (!j) throw std::invalid_argument("activity '" + network[i].id + "' has unknown predecessor '" + p + "'");
      preds[i].push_back(*j);
    }
  }
  return preds;
}

std::vector<std::size_t> topological_order(const ProjectNetwork& network) {
  const auto preds = predecessor_indices(network);
  const std::size_t n = network.size();
  std::vector<std::vector<std::size_t>> succs(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    indegree[i] = preds[i].size();
    for (std::size_t p : preds[i]) succs[p].push_back(i);
  }
  // Kahn's algorithm; ready activities are taken in file order for stable output.
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::size_t head = 0;
  while (head < ready.size()) {
    std::size_t v = ready[head++];
    order.push_back(v);
    for (std::size_t s : succs[v]) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  if (order.size() != n) {
    ValidationReport report;
    auto edge = find_cycle_edge(network);
    std::string id = edge ? network[edge->second].id : std::string{};
    std::string msg = edge ? "cycle detected through edge " + network[edge->first].id + " -> " + id : "cycle detected";
    report.issues.push_back({ValidationIssue::Kind::cycle, id, msg});
    throw ValidationError(std::move(report));
  }
  return order;
}

PrecedenceIndex index_precedence(const ProjectNetwork& network) {
  PrecedenceIndex index;
  index.order = topological_order(network);
  index.predecessors = predecessor_indices(network);
  return index;
}

ProgressiveLevels progressive_levels(const ProjectNetwork& network) {
  const auto index = index_precedence(network);
  ProgressiveLevels out;
  out.level.assign(network.size(), 1);
  for (std::size_t v : index.order) {
    int level = 1;
    for (std::size_t p : index.predecessors[v]) level = std::max(level, out.level[p] + 1);
    out.level[v] = level;
    out.depth = std::max(out.depth, level);
  }
  return out;
}

std::optional<double> serial_parallel_indicator(int serial_levels, int activity_count) {
  if (activity_count < 1 || serial_levels < 1 || serial_levels > activity_count)
    throw std::invalid_argument("serial/parallel indicator requires 1 <= n_s <= n_t");
  if (activity_count == 1) return std::nullopt;
  return static_cast<double>(serial_levels - 1) / static_cast<double>(activity_count - 1);
}

Schedule forward_pass(const PrecedenceIndex& index, const std::vector<double>& durations) {
  const std::size_t n = index.predecessors.size();
  if (durations.size() != n)
    throw std::invalid_argument("forward pass needs one duration per activity (got " + std::to_string(durations.size()) +
                                " for " + std::to_string(n) + ")");
  Schedule s;
  s.start.assign(n, 0.0);
  s.finish.assign(n, 0.0);
  for (std::size_t v : index.order) {
    if (!(durations[v] > 0.0)) throw std::invalid_argument("activity durations must be strictly positive");
    double start = 0.0;
    for (std::size_t p : index.predecessors[v]) start = std::max(start, s.finish[p]);
    s.start[v] = start;
    s.finish[v] = start + durations[v];
    s.project_duration = std::max(s.project_duration, s.finish[v]);
  }
  return s;
}

Schedule forward_pass(const ProjectNetwork& network, const std::vector<double>& durations) {
  return forward_pass(index_precedence(network), durations);
}

Schedule baseline_schedule(const ProjectNetwork& network) {
  std::vector<double> planned;
  planned.reserve(network.size());
  for (const auto& a : network.activities()) planned.push_back(a.planned_duration);
  return forward_pass(network, planned);
}

}  // namespace sedm
