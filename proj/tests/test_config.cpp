// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "gpursm/config.hpp"
#include "gpursm/error.hpp"
#include "gpursm/runner.hpp"

using namespace gpursm;

namespace {

TaskConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_task_config(in, "/base");
}

// Returns the code and subject of the raised error.
std::pair<Errc, std::string> failure(const std::string& text) {
  try {
    config_from(text);
  } catch (const Error& e) {
    return {e.code(), e.subject()};
  }
  FAIL("expected a configuration error");
  return {Errc::Io, ""};
}

const std::string kMinimal = "data: p.csv\ntasks:\n  t:\n    target: ts\n";

}  // namespace

TEST_CASE("minimal configuration takes defaults") {
  const auto c = config_from(kMinimal);
  CHECK(c.data == "p.csv");
  CHECK(c.model.empty());
  CHECK(c.output_dir == "out");
  CHECK(c.seed == 0);
  CHECK(c.hyperparams.kappa == 0.5);
  CHECK(c.hyperparams.tau == 5);
  CHECK(c.hyperparams.draws == 50000);
  CHECK(c.hyperparams.gamma == 1.0);
  CHECK(c.hyperparams.normalization == NormalizationMode::ZScore);
  CHECK(c.suggest.top_k == 3);
  CHECK(c.suggest.threshold == 0.15);
  REQUIRE(c.tasks.size() == 1);
  CHECK(c.tasks[0].name == "t");
  CHECK(c.tasks[0].kernels.empty());
  CHECK(c.tasks[0].target == TargetKind::Ts);
  CHECK(c.tasks[0].workload_key == WorkloadKey::None);
  CHECK(c.comparisons.empty());
  CHECK(c.resolve("p.csv") == std::filesystem::path("/base/p.csv"));
  CHECK(c.resolve("/abs/p.csv") == std::filesystem::path("/abs/p.csv"));
}

TEST_CASE("bundled fixture configuration") {
  const auto c = load_task_config(std::string(GPURSM_SOURCE_DIR) + "/data/fixture/config.yaml");
  CHECK(c.seed == 1234);
  CHECK(c.hyperparams.draws == 4000);
  REQUIRE(c.tasks.size() == 2);
  const auto* time = c.find_task("time");
  REQUIRE(time != nullptr);
  CHECK(time->hyperparams.draws == 2000);
  CHECK(time->hyperparams.tau == 5);  // inherited
  CHECK(time->kernels == std::vector<std::string>{"stencil", "stencil_tiled"});
  REQUIRE(c.comparisons.size() == 1);
  CHECK(c.comparisons[0].baseline.label() == "time:stencil");
  CHECK(c.comparisons[0].join == JoinKey::WorkloadFrequency);
  CHECK(c.columns.frequency == "frequency_mhz");
  CHECK(c.base_dir.filename() == "fixture");
}

TEST_CASE("per-task overrides inherit the global block") {
  const auto c = config_from(R"(
data: p.csv
hyperparams: {kappa: 0.3, tau: 2, normalization: unit_norm}
tasks:
  a: {target: score, kernels: all}
  b:
    target: util_loss
    kernels: [k1, k2]
    workload_key: frequency
    keep_replicates: true
    hyperparams: {tau: 7}
comparisons:
  - {baseline: "b:k1", variant: "b:k2", join: workload}
)");
  CHECK(c.find_task("a")->hyperparams.kappa == 0.3);
  CHECK(c.find_task("a")->kernels.empty());
  const auto* b = c.find_task("b");
  CHECK(b->hyperparams.kappa == 0.3);
  CHECK(b->hyperparams.tau == 7);
  CHECK(b->hyperparams.normalization == NormalizationMode::UnitNorm);
  CHECK(b->keep_replicates);
  CHECK(b->workload_key == WorkloadKey::Frequency);
  CHECK(c.comparisons[0].name == "b:k1_vs_b:k2");
  CHECK(c.comparisons[0].join == JoinKey::Workload);
}

TEST_CASE("configuration errors name the offending key") {
  CHECK(failure("data: p.csv\ntasks:\n  t: {target: energy}\n").first == Errc::InvalidConfig);
  CHECK(failure("data: p.csv\ntasks:\n  t: {}\n").second == "tasks.t.target");
  CHECK(failure("data: p.csv\nbogus: 1\ntasks:\n  t: {target: ts}\n").second == "bogus");
  CHECK(failure("data: p.csv\ntasks:\n  t: {target: ts, colour: red}\n").second ==
        "tasks.t.colour");
  CHECK(failure("data: p.csv\ntasks: {}\n").second == "tasks");
  CHECK(failure("tasks:\n  t: {target: ts}\n").second == "tasks.t.data");
  CHECK(failure("data: p.csv\ntasks:\n  'a:b': {target: ts}\n").first == Errc::InvalidConfig);
  CHECK(failure("data: p.csv\nhyperparams: {kappa: 1.5}\ntasks:\n  t: {target: ts}\n").first ==
        Errc::InvalidKappa);
  CHECK(failure("data: p.csv\ntasks:\n  t: {target: ts, hyperparams: {kappa: 0}}\n").first ==
        Errc::InvalidKappa);
  CHECK(failure("data: p.csv\nhyperparams: {normalization: l1}\ntasks:\n  t: {target: ts}\n")
            .first == Errc::InvalidParameter);
  CHECK(failure("data: p.csv\nalpha: {a1: 0.6, a2: 0.7, a3: 0.9}\ntasks:\n  t: {target: ts}\n")
            .first == Errc::InvalidBuckets);
  CHECK(failure("data: p.csv\nseed: -3\ntasks:\n  t: {target: ts}\n").first ==
        Errc::InvalidConfig);
  CHECK(failure("data: [unclosed\n").first == Errc::InvalidConfig);
  CHECK(failure("- a\n- b\n").first == Errc::InvalidConfig);
}

TEST_CASE("comparison references are checked") {
  const std::string head =
      "data: p.csv\ntasks:\n  a: {target: ts, kernels: [k1]}\n  b: {target: ts}\n"
      "  c: {target: score}\ncomparisons:\n";
  CHECK(failure(head + "  - {baseline: 'x:k1', variant: 'a:k1'}\n").first == Errc::InvalidConfig);
  CHECK(failure(head + "  - {baseline: 'a:k9', variant: 'b:k1'}\n").first == Errc::InvalidConfig);
  CHECK(failure(head + "  - {baseline: 'a:k1', variant: 'c:k1'}\n").first == Errc::InvalidConfig);
  CHECK(failure(head + "  - {baseline: 'a', variant: 'b:k1'}\n").first == Errc::InvalidConfig);
  CHECK(failure(head + "  - {baseline: 'a:k1', variant: 'b:k1', join: kernel}\n").first ==
        Errc::InvalidConfig);
  CHECK(failure(head + "  - {baseline: 'a:k1'}\n").first == Errc::InvalidConfig);
  CHECK(failure(head + "  - {name: n, baseline: 'a:k1', variant: 'b:k1'}\n"
                       "  - {name: n, baseline: 'a:k1', variant: 'b:k2'}\n")
            .first == Errc::InvalidConfig);
  CHECK_NOTHROW(config_from(head + "  - {baseline: 'a:k1', variant: 'b:anything'}\n"));
}

TEST_CASE("kernel references") {
  const auto r = parse_kernel_ref("task:kern:el");
  CHECK(r.task == "task");
  CHECK(r.kernel == "kern:el");
  CHECK_THROWS_AS(parse_kernel_ref(":k"), Error);
  CHECK_THROWS_AS(parse_kernel_ref("t:"), Error);
}

TEST_CASE("missing configuration file") {
  try {
    load_task_config("/nonexistent/config.yaml");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Config);
    CHECK(std::string(e.what()).find("/nonexistent/config.yaml") != std::string::npos);
  }
}

TEST_CASE("command-line overrides win over every task") {
  auto c = config_from(
      "data: p.csv\nseed: 1\ntasks:\n  a: {target: ts, hyperparams: {draws: 10, tau: 2}}\n");
  RunOverrides o;
  o.seed = 9;
  o.draws = 33;
  o.tau = 4;
  o.kappa = 0.25;
  o.gamma = 2.0;
  o.threads = 1;
  apply_overrides(c, o);
  CHECK(c.seed == 9);
  for (const auto* h : {&c.hyperparams, &c.tasks[0].hyperparams}) {
    CHECK(h->draws == 33);
    CHECK(h->tau == 4);
    CHECK(h->kappa == 0.25);
    CHECK(h->gamma == 2.0);
    CHECK(h->threads == 1);
  }
  RunOverrides bad;
  bad.kappa = 2.0;
  CHECK_THROWS_AS(apply_overrides(c, bad), Error);
}

TEST_CASE("analysis parameters from hyperparameters") {
  Hyperparams h;
  h.kappa = 0.4;
  h.draws = 12;
  const auto p = to_analysis_params(h, 77);
  CHECK(p.kappa == 0.4);
  CHECK(p.draws == 12);
  CHECK(p.seed == 77);
  CHECK(p.polarity == Polarity::Absolute);
}

TEST_CASE("exit codes by category") {
  CHECK(exit_code(ErrorCategory::Config) == 2);
  CHECK(exit_code(ErrorCategory::Data) == 3);
  CHECK(exit_code(ErrorCategory::Analysis) == 4);
}
