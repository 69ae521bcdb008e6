#include <gtest/gtest.h>

#include "sedm/project_io.hpp"

using namespace sedm;

namespace {

const std::string kData = SEDM_DATA_DIR;

int error_line(const std::string& text) {
  try {
    parse_project(text, "p.yaml");
  } catch (const InputError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("p.yaml:" + std::to_string(e.line()) + ": ", 0), 0u) << e.what();
    return e.line();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return -1;
}

const char* kValid = R"(project: demo
bpd: 5
activities:
  - id: A
    pd: 2
    distribution: {type: uniform, lo: 1, hi: 3}
  - id: B
    predecessors: [A]
    pd: 3
    distribution: {type: normal, mean: 3, sd: 0.5}
    cost_per_period: 10
)";

}  // namespace

TEST(ProjectIo, ParsesEveryField) {
  const auto net = parse_project(kValid);
  EXPECT_EQ(net.name(), "demo");
  ASSERT_EQ(net.size(), 2u);
  EXPECT_EQ(net[1].predecessors, std::vector<std::string>{"A"});
  EXPECT_EQ(std::get<TruncatedNormal>(net[1].distribution).sd, 0.5);
  EXPECT_EQ(*net[1].cost_per_period, 10.0);
  EXPECT_FALSE(net[0].cost_per_period.has_value());
}

TEST(ProjectIo, YamlRoundTripPreservesFingerprint) {
  for (const char* file : {"residential13.yaml", "chain3_discrete.yaml", "serial_fixed.yaml"}) {
    const auto net = load_project(kData + "/" + file);
    const auto again = parse_project(project_to_yaml(net));
    EXPECT_EQ(network_fingerprint(net), network_fingerprint(again)) << file;
  }
}

TEST(ProjectIo, ErrorsPointAtTheOffendingLine) {
  EXPECT_EQ(error_line("project: x\nactivities:\n  - id: A\n    distribution: {type: uniform, lo: 1, hi: 2}\n"), 3);  // missing pd
  EXPECT_EQ(error_line("project: x\nactivities:\n  - id: A\n    pd: ten\n    distribution: {type: uniform, lo: 1, hi: 2}\n"), 4);
  EXPECT_EQ(error_line("project: x\nactivities:\n  - id: A\n    pd: 2\n    colour: red\n    distribution: {type: uniform, lo: 1, hi: 2}\n"),
            5);
  EXPECT_EQ(error_line("project: x\nactivities:\n  - id: A\n    pd: 2\n    distribution: {type: beta, a: 1}\n"), 5);
  EXPECT_EQ(error_line("project: x\nactivities: [\n"), 3);  // syntax error at end of input
  EXPECT_EQ(error_line("project: x\nactivities:\n  - id: A\n    pd: 2\n    distribution: {type: uniform, lo: 1, hi: 2}\n"
                       "  - id: B\n    predecessors: [Z]\n    pd: 2\n    distribution: {type: uniform, lo: 1, hi: 2}\n"),
            6);  // unknown predecessor reported on B
  EXPECT_EQ(error_line(std::string(kValid).replace(std::string(kValid).find("bpd: 5"), 6, "bpd: 7")), 2);
}

TEST(ProjectIo, ValidationProblemsAreInputErrors) {
  const std::string cyclic =
      "project: x\nactivities:\n  - id: A\n    predecessors: [B]\n    pd: 2\n    distribution: {type: uniform, lo: 1, hi: 2}\n"
      "  - id: B\n    predecessors: [A]\n    pd: 2\n    distribution: {type: uniform, lo: 1, hi: 2}\n";
  try {
    parse_project(cyclic);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_project("project: x\nactivities: []\n"), InputError);
  EXPECT_THROW(load_project(kData + "/does_not_exist.yaml"), std::runtime_error);
}

TEST(ProjectIo, TrackingRoundTrip) {
  const auto net = load_project(kData + "/residential13.yaml");
  const auto r = sample_realization(net, 8, 0);
  const auto s = forward_pass(net, r.durations);
  const auto log = TrackingLog::from_execution(net, r.durations, s);
  const auto back = parse_tracking(tracking_to_yaml(net, log), net);
  ASSERT_EQ(back.periods(), log.periods());
  EXPECT_NEAR(*back.finish_time(), *log.finish_time(), 1e-12);
  for (int p = 0; p <= log.periods(); ++p)
    for (std::size_t i = 0; i < net.size(); ++i) {
      EXPECT_DOUBLE_EQ(back.completion(p, i), log.completion(p, i));
      EXPECT_DOUBLE_EQ(back.worked(p, i), log.worked(p, i));
    }
}

TEST(ProjectIo, TrackingErrorsCarryLines) {
  const auto net = parse_project(kValid);
  const std::string text = "periods:\n  - period: 1\n    progress:\n      - {activity: A, worked: 1, completion: 0.5}\n"
                           "  - period: 2\n    progress:\n      - {activity: Q, worked: 1, completion: 1}\n";
  try {
    parse_tracking(text, net, "t.yaml");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.line(), 7) << e.what();  // the offending entry
  }
}

TEST(ProjectIo, ConfigDefaultsAndOverrides) {
  const auto bundled = load_config(kData + "/config.yaml");
  EXPECT_EQ(bundled.run.n_runs, 25000u);
  EXPECT_EQ(bundled.forecast.folds, 10);
  EXPECT_EQ(bundled.anomaly, AnomalyMode::checkpoints);

  const auto c = parse_config("runs: 500\nseed: 3\nknn_k: [3, 7]\nbandwidth: {time: 2, actual: 3}\nanomaly: none\nmethods: [sedm]\n");
  EXPECT_EQ(c.run.n_runs, 500u);
  EXPECT_EQ(c.run.master_seed, 3u);
  EXPECT_EQ(c.forecast.grid.knn_k, (std::vector<int>{3, 7}));
  EXPECT_EQ(*c.forecast.kde.bandwidth_time, 2.0);
  EXPECT_EQ(c.methods, std::vector<Method>{Method::sedm});
  const auto b = c.benchmark();
  EXPECT_FALSE(b.forecast.anomaly);

  EXPECT_THROW(parse_config("runs: 0\n"), InputError);
  EXPECT_THROW(parse_config("split: 1.5\n"), InputError);
  EXPECT_THROW(parse_config("colour: blue\n"), InputError);
  EXPECT_THROW(parse_config("folds: 1\n"), InputError);
}
