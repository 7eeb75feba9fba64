// SPDX-License-Identifier: Apache-2.0
#include "gpursm/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <yaml-cpp/yaml.h>

#include "gpursm/error.hpp"

namespace gpursm {
namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw Error(Errc::InvalidConfig, "config key '" + key + "': " + what, key);
}

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) fail(where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(key, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(key, "cannot interpret '" + node.Scalar() + "'");
  }
}

std::string text(const YAML::Node& node, const std::string& key) {
  return scalar<std::string>(node, key);
}

void read_hyperparams(const YAML::Node& node, const std::string& where, Hyperparams& h) {
  if (!node) return;
  check_keys(node, where,
             {"kappa", "tau", "draws", "gamma", "fidelity_epsilon", "normalization", "threads"});
  if (auto n = node["kappa"]) h.kappa = scalar<double>(n, where + ".kappa");
  if (auto n = node["tau"]) {
    const auto v = scalar<long long>(n, where + ".tau");
    if (v < 1) fail(where + ".tau", "must be at least 1");
    h.tau = static_cast<std::size_t>(v);
  }
  if (auto n = node["draws"]) {
    const auto v = scalar<long long>(n, where + ".draws");
    if (v < 1) fail(where + ".draws", "must be at least 1");
    h.draws = static_cast<std::size_t>(v);
  }
  if (auto n = node["gamma"]) h.gamma = scalar<double>(n, where + ".gamma");
  if (auto n = node["fidelity_epsilon"])
    h.fidelity_epsilon = scalar<double>(n, where + ".fidelity_epsilon");
  if (auto n = node["normalization"])
    h.normalization = normalization_from_string(text(n, where + ".normalization"));
  if (auto n = node["threads"]) {
    const auto v = scalar<long long>(n, where + ".threads");
    if (v < 0) fail(where + ".threads", "must not be negative");
    h.threads = static_cast<unsigned>(v);
  }
}

void validate_hyperparams(const Hyperparams& h, const std::string& where) {
  if (!(h.kappa > 0.0 && h.kappa <= 1.0))
    throw Error(Errc::InvalidKappa, where + ": kappa must lie in (0, 1]", where + ".kappa");
  if (!(h.gamma > 0.0)) fail(where + ".gamma", "must be positive");
  if (!(h.fidelity_epsilon >= 0.0)) fail(where + ".fidelity_epsilon", "must not be negative");
}

TaskSpec read_task(const std::string& name, const YAML::Node& node, const TaskConfig& cfg) {
  const std::string where = "tasks." + name;
  TaskSpec t;
  t.name = name;
  t.hyperparams = cfg.hyperparams;
  if (node.IsNull()) fail(where, "task needs at least a target");
  check_keys(node, where,
             {"data", "kernels", "target", "workload_key", "keep_replicates", "hyperparams"});
  if (auto n = node["data"]) t.data = text(n, where + ".data");
  if (auto n = node["kernels"]) {
    if (n.IsScalar()) {
      if (n.Scalar() != "all") fail(where + ".kernels", "expected a list of kernels or 'all'");
    } else if (n.IsSequence()) {
      for (const auto& k : n) t.kernels.push_back(text(k, where + ".kernels"));
      if (t.kernels.empty()) fail(where + ".kernels", "empty kernel list");
      std::set<std::string> seen;
      for (const auto& k : t.kernels)
        if (!seen.insert(k).second) fail(where + ".kernels", "kernel '" + k + "' listed twice");
    } else {
      fail(where + ".kernels", "expected a list of kernels or 'all'");
    }
  }
  if (auto n = node["target"])
    t.target = target_kind_from_string(text(n, where + ".target"));
  else
    fail(where + ".target", "missing");
  if (auto n = node["workload_key"])
    t.workload_key = workload_key_from_string(text(n, where + ".workload_key"));
  if (auto n = node["keep_replicates"]) t.keep_replicates = scalar<bool>(n, where + ".keep_replicates");
  read_hyperparams(node["hyperparams"], where + ".hyperparams", t.hyperparams);
  validate_hyperparams(t.hyperparams, where + ".hyperparams");
  return t;
}

void read_columns(const YAML::Node& node, ColumnSchema& c) {
  if (!node) return;
  check_keys(node, "columns",
             {"kernel", "workload", "frequency", "time", "utilization", "power"});
  if (auto n = node["kernel"]) c.kernel = text(n, "columns.kernel");
  if (auto n = node["workload"]) c.workload = text(n, "columns.workload");
  if (auto n = node["frequency"]) c.frequency = text(n, "columns.frequency");
  if (auto n = node["time"]) c.time = text(n, "columns.time");
  if (auto n = node["utilization"]) c.utilization = text(n, "columns.utilization");
  if (auto n = node["power"]) c.power = text(n, "columns.power");
}

TaskConfig parse(const YAML::Node& root, const std::filesystem::path& base_dir) {
  TaskConfig cfg;
  cfg.base_dir = base_dir;
  if (!root.IsMap()) fail("", "configuration must be a mapping");
  check_keys(root, "",
             {"data", "model", "output_dir", "seed", "columns", "alpha", "hyperparams", "suggest",
              "tasks", "comparisons"});

  if (auto n = root["data"]) cfg.data = text(n, "data");
  if (auto n = root["model"]; n && !n.IsNull()) cfg.model = text(n, "model");
  if (auto n = root["output_dir"]) cfg.output_dir = text(n, "output_dir");
  if (auto n = root["seed"]) cfg.seed = scalar<std::uint64_t>(n, "seed");
  read_columns(root["columns"], cfg.columns);

  if (auto n = root["alpha"]) {
    check_keys(n, "alpha", {"a1", "a2", "a3"});
    if (auto a = n["a1"]) cfg.alpha.a1 = scalar<double>(a, "alpha.a1");
    if (auto a = n["a2"]) cfg.alpha.a2 = scalar<double>(a, "alpha.a2");
    if (auto a = n["a3"]) cfg.alpha.a3 = scalar<double>(a, "alpha.a3");
    validate_buckets(cfg.alpha);
  }

  read_hyperparams(root["hyperparams"], "hyperparams", cfg.hyperparams);
  validate_hyperparams(cfg.hyperparams, "hyperparams");

  if (auto n = root["suggest"]) {
    check_keys(n, "suggest", {"top_k", "threshold", "rules"});
    if (auto s = n["top_k"]) {
      const auto v = scalar<long long>(s, "suggest.top_k");
      if (v < 0) fail("suggest.top_k", "must not be negative");
      cfg.suggest.top_k = static_cast<std::size_t>(v);
    }
    if (auto s = n["threshold"]) cfg.suggest.threshold = scalar<double>(s, "suggest.threshold");
    if (auto s = n["rules"]; s && !s.IsNull()) cfg.suggest.rules = text(s, "suggest.rules");
  }

  const auto tasks = root["tasks"];
  if (!tasks || !tasks.IsMap() || tasks.size() == 0)
    fail("tasks", "expected a non-empty mapping of task names");
  std::set<std::string> names;
  for (const auto& kv : tasks) {
    const auto name = text(kv.first, "tasks");
    if (name.empty() || name.find(':') != std::string::npos)
      fail("tasks." + name, "task names must be non-empty and free of ':'");
    if (!names.insert(name).second) fail("tasks." + name, "task defined twice");
    cfg.tasks.push_back(read_task(name, kv.second, cfg));
    if (cfg.tasks.back().data.empty() && cfg.data.empty())
      fail("tasks." + name + ".data", "no profile data given for this task or at top level");
  }

  if (auto list = root["comparisons"]; list && !list.IsNull()) {
    if (!list.IsSequence()) fail("comparisons", "expected a list");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto node = list[i];
      const std::string where = "comparisons[" + std::to_string(i) + "]";
      check_keys(node, where, {"name", "baseline", "variant", "join"});
      ComparisonSpec c;
      if (!node["baseline"] || !node["variant"]) fail(where, "needs baseline and variant");
      c.baseline = parse_kernel_ref(text(node["baseline"], where + ".baseline"));
      c.variant = parse_kernel_ref(text(node["variant"], where + ".variant"));
      if (auto j = node["join"]) c.join = join_key_from_string(text(j, where + ".join"));
      c.name = node["name"] ? text(node["name"], where + ".name")
                            : c.baseline.label() + "_vs_" + c.variant.label();
      if (!seen.insert(c.name).second) fail(where + ".name", "comparison '" + c.name + "' defined twice");
      for (const auto* ref : {&c.baseline, &c.variant}) {
        const TaskSpec* task = cfg.find_task(ref->task);
        if (!task) fail(where, "references undefined task '" + ref->task + "'");
        if (!task->kernels.empty() &&
            std::find(task->kernels.begin(), task->kernels.end(), ref->kernel) == task->kernels.end())
          fail(where, "kernel '" + ref->kernel + "' is not analyzed by task '" + ref->task + "'");
      }
      if (cfg.find_task(c.baseline.task)->target != cfg.find_task(c.variant.task)->target)
        fail(where, "baseline and variant tasks use different targets");
      cfg.comparisons.push_back(std::move(c));
    }
  }
  return cfg;
}

}  // namespace

std::filesystem::path TaskConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

const TaskSpec* TaskConfig::find_task(const std::string& name) const {
  for (const auto& t : tasks)
    if (t.name == name) return &t;
  return nullptr;
}

KernelRef parse_kernel_ref(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size())
    throw Error(Errc::InvalidConfig, "expected 'task:kernel', got '" + spec + "'", spec);
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

AnalysisParams to_analysis_params(const Hyperparams& h, std::uint64_t seed) {
  AnalysisParams p;
  p.kappa = h.kappa;
  p.tau = h.tau;
  p.draws = h.draws;
  p.gamma = h.gamma;
  p.seed = seed;
  p.fidelity_epsilon = h.fidelity_epsilon;
  p.normalization = h.normalization;
  p.threads = h.threads;
  return p;
}

TaskConfig parse_task_config(std::istream& in, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(in);
  } catch (const YAML::Exception& e) {
    throw Error(Errc::InvalidConfig, std::string("configuration: ") + e.what());
  }
  return parse(root, base_dir);
}

TaskConfig load_task_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(Errc::InvalidConfig, "cannot open configuration '" + path.string() + "'",
                path.string());
  return parse_task_config(in, path.parent_path());
}

}  // namespace gpursm
