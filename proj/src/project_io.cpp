#include "sedm/project_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sedm/text.hpp"

namespace sedm {

InputError::InputError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
      source_(source),
      line_(line) {}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

class Reader {
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  YAML::Node load(const std::string& text) const {
    try {
      return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
      throw InputError(source_, e.mark.line + 1, "syntax error: " + e.msg);
    }
  }

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    throw InputError(source_, line_of(node), message);
  }
  [[noreturn]] void fail(int line, const std::string& message) const { throw InputError(source_, line, message); }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void allow_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& what) const {
    for (auto it = map.begin(); it != map.end(); ++it) {
      const auto key = it->first.Scalar();
      if (!allowed.count(key)) fail(it->first, "unknown key '" + key + "' in " + what);
    }
  }

  YAML::Node field(const YAML::Node& map, const std::string& key, const std::string& what) const {
    const YAML::Node value = map[key];
    if (!value) fail(map, what + " is missing '" + key + "'");
    return value;
  }

  std::string text(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a scalar");
    return node.Scalar();
  }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a number");
    try {
      return parse_number(node.Scalar());
    } catch (const std::invalid_argument&) {
      fail(node, what + " must be a number, found '" + node.Scalar() + "'");
    }
  }

  template <class Int>
  Int integer(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be an integer");
    try {
      return parse_integer<Int>(node.Scalar());
    } catch (const std::invalid_argument&) {
      fail(node, what + " must be an integer, found '" + node.Scalar() + "'");
    }
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) fail(node, what + " must be a list");
    std::vector<double> out;
    for (const auto& item : node) out.push_back(number(item, what + " entry"));
    return out;
  }

  const std::string& source() const { return source_; }

private:
  std::string source_;
};

DurationDistribution parse_distribution(const Reader& r, const YAML::Node& node, const std::string& what) {
  r.require_map(node, what);
  const std::string type = r.text(r.field(node, "type", what), what + " type");
  if (type == "triangular") {
    r.allow_keys(node, {"type", "optimistic", "most_likely", "pessimistic"}, what);
    return Triangular{r.number(r.field(node, "optimistic", what), what + " optimistic"),
                      r.number(r.field(node, "most_likely", what), what + " most_likely"),
                      r.number(r.field(node, "pessimistic", what), what + " pessimistic")};
  }
  if (type == "uniform") {
    r.allow_keys(node, {"type", "lo", "hi"}, what);
    return Uniform{r.number(r.field(node, "lo", what), what + " lo"), r.number(r.field(node, "hi", what), what + " hi")};
  }
  if (type == "normal") {
    r.allow_keys(node, {"type", "mean", "sd"}, what);
    return TruncatedNormal{r.number(r.field(node, "mean", what), what + " mean"),
                           r.number(r.field(node, "sd", what), what + " sd")};
  }
  if (type == "discrete") {
    r.allow_keys(node, {"type", "atoms"}, what);
    const auto atoms = r.field(node, "atoms", what);
    if (!atoms.IsSequence()) r.fail(atoms, what + " atoms must be a list");
    Discrete d;
    for (const auto& atom : atoms) {
      r.require_map(atom, what + " atom");
      r.allow_keys(atom, {"value", "probability"}, what + " atom");
      d.atoms.push_back({r.number(r.field(atom, "value", what + " atom"), "atom value"),
                         r.number(r.field(atom, "probability", what + " atom"), "atom probability")});
    }
    return d;
  }
  r.fail(node["type"], "unknown distribution type '" + type + "' (expected triangular, uniform, normal or discrete)");
}

void emit_number(YAML::Emitter& out, double v) { out << format_number(v); }

}  // namespace

ProjectNetwork parse_project(const std::string& text, const std::string& source) {
  const Reader r(source);
  const YAML::Node root = r.load(text);
  if (!root.IsMap()) r.fail(root, "project file must be a mapping with an 'activities' list");
  r.allow_keys(root, {"project", "bpd", "activities"}, "project");
  const std::string name = root["project"] ? r.text(root["project"], "project name") : std::string();
  const auto list = r.field(root, "activities", "project");
  if (!list.IsSequence()) r.fail(list, "'activities' must be a list");

  std::vector<Activity> activities;
  std::vector<int> lines;
  for (const auto& node : list) {
    const std::string what = "activity #" + std::to_string(activities.size() + 1);
    r.require_map(node, what);
    r.allow_keys(node, {"id", "name", "predecessors", "pd", "distribution", "cost_per_period"}, what);
    Activity a;
    a.id = r.text(r.field(node, "id", what), what + " id");
    const std::string who = "activity '" + a.id + "'";
    if (node["name"]) a.name = r.text(node["name"], who + " name");
    if (const auto preds = node["predecessors"]) {
      if (preds.IsScalar()) {
        a.predecessors.push_back(preds.Scalar());
      } else if (preds.IsSequence()) {
        for (const auto& p : preds) a.predecessors.push_back(r.text(p, who + " predecessor"));
      } else if (!preds.IsNull()) {
        r.fail(preds, who + " predecessors must be a list of ids");
      }
    }
    a.planned_duration = r.number(r.field(node, "pd", who), who + " pd");
    a.distribution = parse_distribution(r, r.field(node, "distribution", who), who + " distribution");
    if (node["cost_per_period"]) a.cost_per_period = r.number(node["cost_per_period"], who + " cost_per_period");
    activities.push_back(std::move(a));
    lines.push_back(line_of(node));
  }
  if (activities.empty()) r.fail(list, "project has no activities");

  ProjectNetwork network(activities, name);
  const auto report = validate(network);
  if (!report.ok()) {
    auto line_for = [&](const ValidationIssue& issue) {
      int found = 0;
      for (std::size_t i = 0; i < activities.size(); ++i) {
        if (activities[i].id != issue.activity_id) continue;
        found = lines[i];
        if (issue.kind != ValidationIssue::Kind::duplicate_id) break;  // duplicates point at the later copy
      }
      return found;
    };
    std::string message;
    for (std::size_t k = 1; k < report.issues.size(); ++k) {
      const auto& issue = report.issues[k];
      message += "; line " + std::to_string(line_for(issue)) + ": " + issue.message;
    }
    r.fail(line_for(report.issues.front()), report.issues.front().message + message);
  }
  if (const auto bpd = root["bpd"]) {
    const double declared = r.number(bpd, "bpd");
    const double computed = baseline_schedule(network).project_duration;
    if (std::abs(declared - computed) > 1e-9)
      r.fail(bpd, "declared bpd " + format_number(declared) + " differs from the scheduled " + format_number(computed));
  }
  return network;
}

ProjectNetwork load_project(const std::filesystem::path& path) { return parse_project(read_text_file(path), path.string()); }

std::string project_to_yaml(const ProjectNetwork& network) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  if (!network.name().empty()) out << YAML::Key << "project" << YAML::Value << network.name();
  out << YAML::Key << "activities" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : network.activities()) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << a.id;
    if (!a.name.empty()) out << YAML::Key << "name" << YAML::Value << a.name;
    out << YAML::Key << "predecessors" << YAML::Value << YAML::Flow << a.predecessors;
    out << YAML::Key << "pd" << YAML::Value;
    emit_number(out, a.planned_duration);
    out << YAML::Key << "distribution" << YAML::Value << YAML::Flow << YAML::BeginMap;
    std::visit(
        [&](const auto& d) {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, Triangular>) {
            out << YAML::Key << "type" << YAML::Value << "triangular";
            out << YAML::Key << "optimistic" << YAML::Value;
            emit_number(out, d.optimistic);
            out << YAML::Key << "most_likely" << YAML::Value;
            emit_number(out, d.most_likely);
            out << YAML::Key << "pessimistic" << YAML::Value;
            emit_number(out, d.pessimistic);
          } else if constexpr (std::is_same_v<D, Uniform>) {
            out << YAML::Key << "type" << YAML::Value << "uniform";
            out << YAML::Key << "lo" << YAML::Value;
            emit_number(out, d.lo);
            out << YAML::Key << "hi" << YAML::Value;
            emit_number(out, d.hi);
          } else if constexpr (std::is_same_v<D, TruncatedNormal>) {
            out << YAML::Key << "type" << YAML::Value << "normal";
            out << YAML::Key << "mean" << YAML::Value;
            emit_number(out, d.mean);
            out << YAML::Key << "sd" << YAML::Value;
            emit_number(out, d.sd);
          } else {
            out << YAML::Key << "type" << YAML::Value << "discrete";
            out << YAML::Key << "atoms" << YAML::Value << YAML::BeginSeq;
            for (const auto& atom : d.atoms) {
              out << YAML::Flow << YAML::BeginMap << YAML::Key << "value" << YAML::Value;
              emit_number(out, atom.value);
              out << YAML::Key << "probability" << YAML::Value;
              emit_number(out, atom.probability);
              out << YAML::EndMap;
            }
            out << YAML::EndSeq;
          }
        },
        a.distribution);
    out << YAML::EndMap;
    if (a.cost_per_period) {
      out << YAML::Key << "cost_per_period" << YAML::Value;
      emit_number(out, *a.cost_per_period);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

TrackingLog parse_tracking(const std::string& text, const ProjectNetwork& network, const std::string& source) {
  const Reader r(source);
  const YAML::Node root = r.load(text);
  if (!root.IsMap()) r.fail(root, "tracking file must be a mapping with a 'periods' list");
  r.allow_keys(root, {"actual_finish", "periods"}, "tracking");
  std::optional<double> finish;
  if (root["actual_finish"]) finish = r.number(root["actual_finish"], "actual_finish");
  const auto list = r.field(root, "periods", "tracking");
  if (!list.IsSequence()) r.fail(list, "'periods' must be a list");

  std::vector<TrackingPeriod> periods;
  std::vector<int> period_lines;
  std::vector<std::vector<int>> entry_lines;
  for (const auto& node : list) {
    r.require_map(node, "tracking period");
    r.allow_keys(node, {"period", "progress"}, "tracking period");
    TrackingPeriod period;
    period.period = r.integer<int>(r.field(node, "period", "tracking period"), "period");
    const std::string where = "period " + std::to_string(period.period);
    std::vector<int> lines;
    if (const auto progress = node["progress"]; progress && !progress.IsNull()) {
      if (!progress.IsSequence()) r.fail(progress, where + " progress must be a list");
      for (const auto& e : progress) {
        r.require_map(e, where + " progress entry");
        r.allow_keys(e, {"activity", "worked", "completion"}, where + " progress entry");
        ActivityProgress p;
        p.activity_id = r.text(r.field(e, "activity", where + " progress entry"), "activity");
        const auto worked = r.field(e, "worked", where + " progress entry");
        const std::string w = r.text(worked, "worked");
        if (w == "true" || w == "yes") {
          p.worked = 1.0;
        } else if (w == "false" || w == "no") {
          p.worked = 0.0;
        } else {
          p.worked = r.number(worked, "worked");
        }
        p.completion = r.number(r.field(e, "completion", where + " progress entry"), "completion");
        period.entries.push_back(std::move(p));
        lines.push_back(line_of(e));
      }
    }
    periods.push_back(std::move(period));
    period_lines.push_back(line_of(node));
    entry_lines.push_back(std::move(lines));
  }

  try {
    return TrackingLog(network, periods, finish);
  } catch (const std::invalid_argument& full) {
    // Re-run on growing prefixes to find the offending period and entry.
    std::vector<TrackingPeriod> prefix;
    for (std::size_t k = 0; k < periods.size(); ++k) {
      TrackingPeriod partial{periods[k].period, {}};
      prefix.push_back(partial);
      for (std::size_t j = 0; j < periods[k].entries.size(); ++j) {
        prefix.back().entries.push_back(periods[k].entries[j]);
        try {
          TrackingLog probe(network, prefix);
        } catch (const std::invalid_argument& e) {
          r.fail(entry_lines[k][j], e.what());
        }
      }
      try {
        TrackingLog probe(network, prefix);
      } catch (const std::invalid_argument& e) {
        r.fail(period_lines[k], e.what());
      }
    }
    r.fail(root["actual_finish"] ? line_of(root["actual_finish"]) : line_of(root), full.what());
  }
}

TrackingLog load_tracking(const std::filesystem::path& path, const ProjectNetwork& network) {
  return parse_tracking(read_text_file(path), network, path.string());
}

std::string tracking_to_yaml(const ProjectNetwork& network, const TrackingLog& log) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  if (auto finish = log.finish_time(); finish && log.completion_period()) {
    out << YAML::Key << "actual_finish" << YAML::Value;
    emit_number(out, *finish);
  }
  out << YAML::Key << "periods" << YAML::Value << YAML::BeginSeq;
  for (const auto& period : log.to_periods(network)) {
    out << YAML::BeginMap << YAML::Key << "period" << YAML::Value << period.period;
    out << YAML::Key << "progress" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : period.entries) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "activity" << YAML::Value << e.activity_id;
      out << YAML::Key << "worked" << YAML::Value;
      emit_number(out, e.worked);
      out << YAML::Key << "completion" << YAML::Value;
      emit_number(out, e.completion);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

BenchmarkConfig AppConfig::benchmark() const {
  BenchmarkConfig b;
  b.methods = methods;
  b.run = run;
  b.forecast = forecast;
  b.forecast.anomaly = anomaly != AnomalyMode::none;
  b.checkpoints = checkpoints;
  b.anomaly_at_checkpoints_only = anomaly == AnomalyMode::checkpoints;
  b.threads = threads;
  return b;
}

AppConfig parse_config(const std::string& text, const std::string& source) {
  const Reader r(source);
  const YAML::Node root = r.load(text);
  AppConfig c;
  if (root.IsNull()) return c;
  if (!root.IsMap()) r.fail(root, "config file must be a mapping");
  r.allow_keys(root,
               {"runs", "seed", "threads", "folds", "classification_repeats", "regression_repeats", "split", "knn_k",
                "ridge_lambda", "cart_min_leaf", "cart_max_depth", "bandwidth", "kernel_sd_fraction", "checkpoints",
                "methods", "anomaly"},
               "config");

  auto positive_int = [&](const char* key) {
    const auto v = r.integer<long>(root[key], key);
    if (v < 1) r.fail(root[key], std::string(key) + " must be at least 1");
    return static_cast<int>(v);
  };
  if (root["runs"]) c.run.n_runs = static_cast<std::size_t>(positive_int("runs"));
  if (root["seed"]) {
    c.run.master_seed = r.integer<std::uint64_t>(root["seed"], "seed");
    c.forecast.seed = c.run.master_seed;
  }
  if (root["threads"]) c.threads = static_cast<unsigned>(r.integer<unsigned>(root["threads"], "threads"));
  if (root["folds"]) {
    c.forecast.folds = positive_int("folds");
    if (c.forecast.folds < 2) r.fail(root["folds"], "folds must be at least 2");
  }
  if (root["classification_repeats"]) c.forecast.classification_repeats = positive_int("classification_repeats");
  if (root["regression_repeats"]) c.forecast.regression_repeats = positive_int("regression_repeats");
  if (root["split"]) {
    c.forecast.train_fraction = r.number(root["split"], "split");
    if (!(c.forecast.train_fraction > 0.0 && c.forecast.train_fraction < 1.0)) r.fail(root["split"], "split must lie in (0, 1)");
  }
  if (root["knn_k"]) {
    c.forecast.grid.knn_k.clear();
    for (double k : r.numbers(root["knn_k"], "knn_k")) {
      if (k < 1 || k != std::floor(k)) r.fail(root["knn_k"], "knn_k entries must be positive integers");
      c.forecast.grid.knn_k.push_back(static_cast<int>(k));
    }
  }
  if (root["ridge_lambda"]) {
    c.forecast.grid.ridge_lambda = r.numbers(root["ridge_lambda"], "ridge_lambda");
    for (double l : c.forecast.grid.ridge_lambda)
      if (!(l >= 0.0)) r.fail(root["ridge_lambda"], "ridge_lambda entries must be non-negative");
  }
  if (root["cart_min_leaf"]) c.forecast.grid.cart_min_leaf = positive_int("cart_min_leaf");
  if (root["cart_max_depth"]) c.forecast.grid.cart_max_depth = positive_int("cart_max_depth");
  if (const auto bw = root["bandwidth"]) {
    if (bw.IsScalar()) {
      if (bw.Scalar() != "nrd") r.fail(bw, "bandwidth must be 'nrd' or a mapping {time, actual}");
    } else {
      r.require_map(bw, "bandwidth");
      r.allow_keys(bw, {"time", "actual"}, "bandwidth");
      if (bw["time"]) c.forecast.kde.bandwidth_time = r.number(bw["time"], "bandwidth time");
      if (bw["actual"]) c.forecast.kde.bandwidth_actual = r.number(bw["actual"], "bandwidth actual");
    }
  }
  if (root["kernel_sd_fraction"]) {
    c.forecast.kde.kernel_sd_fraction = r.number(root["kernel_sd_fraction"], "kernel_sd_fraction");
    if (!(c.forecast.kde.kernel_sd_fraction > 0.0)) r.fail(root["kernel_sd_fraction"], "kernel_sd_fraction must be positive");
  }
  if (root["checkpoints"]) {
    c.checkpoints = r.numbers(root["checkpoints"], "checkpoints");
    for (double p : c.checkpoints)
      if (!(p >= 0.0 && p <= 100.0)) r.fail(root["checkpoints"], "checkpoints are percentages in [0, 100]");
  }
  if (const auto m = root["methods"]) {
    std::string list;
    if (m.IsSequence()) {
      for (const auto& item : m) list += (list.empty() ? "" : ",") + r.text(item, "method");
    } else {
      list = r.text(m, "methods");
    }
    try {
      c.methods = parse_methods(list);
    } catch (const std::invalid_argument& e) {
      r.fail(m, e.what());
    }
  }
  if (const auto a = root["anomaly"]) {
    const auto mode = r.text(a, "anomaly");
    if (mode == "none") {
      c.anomaly = AnomalyMode::none;
    } else if (mode == "checkpoints") {
      c.anomaly = AnomalyMode::checkpoints;
    } else if (mode == "all") {
      c.anomaly = AnomalyMode::all;
    } else {
      r.fail(a, "anomaly must be none, checkpoints or all");
    }
  }
  return c;
}

AppConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path), path.string()); }

}  // namespace sedm
