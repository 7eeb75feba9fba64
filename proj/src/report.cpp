// SPDX-License-Identifier: Apache-2.0
#include "gpursm/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gpursm/error.hpp"

namespace gpursm {
namespace {

using nlohmann::json;

void sort_children(std::vector<SunburstNode>& nodes) {
  std::sort(nodes.begin(), nodes.end(), [](const SunburstNode& a, const SunburstNode& b) {
    return a.value > b.value || (a.value == b.value && a.label < b.label);
  });
}

json hyperparams_json(const AnalysisParams& p) {
  return {{"kappa", p.kappa},
          {"tau", p.tau},
          {"draws", p.draws},
          {"gamma", p.gamma},
          {"seed", p.seed},
          {"fidelity_epsilon", p.fidelity_epsilon},
          {"normalization", to_string(p.normalization)},
          {"polarity", p.polarity == Polarity::Positive ? "positive" : "absolute"}};
}

json hyperparams_json(const Hyperparams& h) {
  return {{"kappa", h.kappa},
          {"tau", h.tau},
          {"draws", h.draws},
          {"gamma", h.gamma},
          {"fidelity_epsilon", h.fidelity_epsilon},
          {"normalization", to_string(h.normalization)}};
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json target_json(const TargetVector& t) {
  return {{"kind", to_string(t.kind)},
          {"row_labels", t.row_labels},
          {"values", vec_json(t.values)},
          {"raw", vec_json(t.raw)},
          {"normalization",
           {{"method", to_string(t.normalization.method)},
            {"divisor", t.normalization.divisor},
            {"min", t.normalization.min},
            {"max", t.normalization.max}}}};
}

json suggestions_json(const SuggestionReport& s, const std::vector<SuggestionRule>& rules) {
  json fired = json::array();
  for (const auto& f : s.fired) {
    const auto it = std::find_if(rules.begin(), rules.end(),
                                 [&](const SuggestionRule& r) { return r.id == f.rule_id; });
    json entry = {{"rule", f.rule_id},
                  {"matched_groups", f.matched_groups},
                  {"matched_rsm", f.matched_rsm}};
    if (it != rules.end()) {
      entry["opportunity"] = it->tuning_opportunity;
      entry["transformation"] = it->transformation;
      entry["primary"] = to_string(it->primary);
      entry["secondary"] = it->secondary ? json(to_string(*it->secondary)) : json(nullptr);
    }
    fired.push_back(std::move(entry));
  }
  return {{"dominant", s.dominant},
          {"threshold", s.threshold_used},
          {"top_k", s.top_k},
          {"fired", fired}};
}

json kernel_json(const KernelResult& k, const std::vector<SuggestionRule>& rules) {
  const auto& a = k.analysis;
  json events = json::array();
  for (const auto& e : a.events)
    events.push_back({{"event", e.event},
                      {"group", e.group},
                      {"belief", e.belief},
                      {"error", e.error},
                      {"selection_frequency", e.selection_frequency},
                      {"avg_coefficient", e.avg_coefficient},
                      {"constant", e.constant}});
  json partition = json::object();
  for (const auto& [group, members] : a.partition) partition[group] = members;
  return {{"kernel", k.kernel},
          {"rows", a.rows},
          {"columns", a.columns},
          {"k_max", a.k_max},
          {"target", target_json(k.target)},
          {"partition", partition},
          {"excluded", a.excluded},
          {"uncategorized", a.uncategorized},
          {"constant_columns", a.constants},
          {"events", events},
          {"rsm",
           {{"raw", a.rsm.per_resource},
            {"normalized", k.normalized.per_resource},
            {"per_workload", a.rsm.workload_breakdown}}},
          {"suggestions", suggestions_json(k.suggestions, rules)}};
}

json comparison_json(const ComparisonResult& c) {
  json resources = json::object();
  for (const auto& [group, r] : c.result.per_resource)
    resources[group] = {{"neg_rsm", r.neg_rsm},
                        {"pos_rsm", r.pos_rsm},
                        {"rel_change", r.rel_change.value},
                        {"rel_change_defined", r.rel_change.defined},
                        {"mean_baseline", r.rel_change.mean_1},
                        {"mean_variant", r.rel_change.mean_2},
                        {"bar_value", r.bar_value}};
  return {{"name", c.spec.name},
          {"baseline", c.spec.baseline.label()},
          {"variant", c.spec.variant.label()},
          {"join_key", to_string(c.spec.join)},
          {"rows", c.result.rows},
          {"join_labels", c.join_labels},
          {"unmatched_baseline", c.unmatched_baseline},
          {"unmatched_variant", c.unmatched_variant},
          {"dropped_columns_baseline", c.dropped_columns_baseline},
          {"dropped_columns_variant", c.dropped_columns_variant},
          {"hyperparams", hyperparams_json(c.params)},
          {"resources", resources}};
}

json model_json(const MachineModel& m) {
  return {{"groups", m.group_names()}, {"hierarchy", m.hierarchy_order}};
}

}  // namespace

std::string to_string(SunburstLevel level) {
  switch (level) {
    case SunburstLevel::Application: return "application";
    case SunburstLevel::Kernel: return "kernel";
    case SunburstLevel::Resource: return "resource";
    case SunburstLevel::Event: return "event";
  }
  return "application";
}

SunburstLevel sunburst_level_from_string(const std::string& name) {
  if (name == "application") return SunburstLevel::Application;
  if (name == "kernel") return SunburstLevel::Kernel;
  if (name == "resource") return SunburstLevel::Resource;
  if (name == "event") return SunburstLevel::Event;
  throw Error(Errc::InvalidConfig, "unknown sunburst level '" + name + "'", name);
}

SunburstNode build_sunburst(const std::string& app, const std::vector<SunburstKernel>& kernels) {
  SunburstNode root{app, SunburstLevel::Application, 0.0, false, {}};
  for (const auto& k : kernels) {
    SunburstNode kn{k.kernel, SunburstLevel::Kernel, 0.0, false, {}};
    for (const auto& [group, members] : k.partition) {
      const auto it = k.rsm.per_resource.find(group);
      if (it == k.rsm.per_resource.end() || !(it->second > 0.0)) continue;
      SunburstNode rn{group, SunburstLevel::Resource, it->second, group == kUncategorizedGroup, {}};
      double mass = 0.0;
      for (const auto& e : members)
        if (auto b = k.rsm.per_event.find(e); b != k.rsm.per_event.end()) mass += b->second;
      if (mass > 0.0)
        for (const auto& e : members) {
          const auto b = k.rsm.per_event.find(e);
          if (b == k.rsm.per_event.end() || !(b->second > 0.0)) continue;
          rn.children.push_back({e, SunburstLevel::Event, rn.value * b->second / mass, false, {}});
        }
      sort_children(rn.children);
      kn.value += rn.value;
      kn.children.push_back(std::move(rn));
    }
    sort_children(kn.children);
    root.value += kn.value;
    root.children.push_back(std::move(kn));
  }
  sort_children(root.children);
  return root;
}

json to_json(const SunburstNode& node) {
  json children = json::array();
  for (const auto& c : node.children) children.push_back(to_json(c));
  json j = {{"label", node.label},
            {"level", to_string(node.level)},
            {"value", node.value},
            {"children", children}};
  if (node.uncategorized) j["uncategorized"] = true;
  return j;
}

SunburstNode sunburst_from_json(const json& j) {
  SunburstNode n;
  n.label = j.at("label").get<std::string>();
  n.level = sunburst_level_from_string(j.at("level").get<std::string>());
  n.value = j.at("value").get<double>();
  n.uncategorized = j.value("uncategorized", false);
  for (const auto& c : j.at("children")) n.children.push_back(sunburst_from_json(c));
  return n;
}

ComparisonChart chart_from_json(const json& c) {
  ComparisonChart chart;
  chart.name = c.at("name").get<std::string>();
  chart.baseline = c.at("baseline").get<std::string>();
  chart.variant = c.at("variant").get<std::string>();
  for (const auto& [group, r] : c.at("resources").items())
    chart.bars.push_back({group, r.at("bar_value").get<double>(), r.at("rel_change").get<double>(),
                          r.at("rel_change_defined").get<bool>(), r.at("neg_rsm").get<double>(),
                          r.at("pos_rsm").get<double>()});
  std::sort(chart.bars.begin(), chart.bars.end(), [](const auto& a, const auto& b) {
    const double x = std::abs(a.bar_value), y = std::abs(b.bar_value);
    return x > y || (x == y && a.group < b.group);
  });
  return chart;
}

json build_report(const RunResults& results) {
  const TaskConfig& cfg = *results.config;
  json tasks = json::array();
  for (const auto& t : results.tasks) {
    json kernels = json::array();
    for (const auto& k : t.kernels) kernels.push_back(kernel_json(k, *results.rules));
    tasks.push_back({{"name", t.spec.name},
                     {"data", t.spec.data.empty() ? cfg.data : t.spec.data},
                     {"target", to_string(t.spec.target)},
                     {"workload_key", to_string(t.spec.workload_key)},
                     {"keep_replicates", t.spec.keep_replicates},
                     {"hyperparams", hyperparams_json(t.params)},
                     {"kernels", kernels},
                     {"sunburst", to_json(t.sunburst)}});
  }
  json comparisons = json::array();
  for (const auto& c : results.comparisons) comparisons.push_back(comparison_json(c));

  json rule_ids = json::array();
  for (const auto& r : *results.rules) rule_ids.push_back(r.id);

  return {{"format_version", 1},
          {"tool", "gpursm"},
          {"config",
           {{"data", cfg.data},
            {"model", cfg.model.empty() ? json(nullptr) : json(cfg.model)},
            {"seed", cfg.seed},
            {"hyperparams", hyperparams_json(cfg.hyperparams)},
            {"alpha", {{"a1", cfg.alpha.a1}, {"a2", cfg.alpha.a2}, {"a3", cfg.alpha.a3}}},
            {"suggest",
             {{"top_k", cfg.suggest.top_k},
              {"threshold", cfg.suggest.threshold},
              {"rules", cfg.suggest.rules.empty() ? json(nullptr) : json(cfg.suggest.rules)},
              {"rule_ids", rule_ids}}}}},
          {"model", model_json(*results.model)},
          {"tasks", tasks},
          {"comparisons", comparisons}};
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

}  // namespace gpursm
