// SPDX-License-Identifier: Apache-2.0
#include "gpursm/suggest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gpursm/error.hpp"
#include "embedded_defaults.hpp"

namespace gpursm {
namespace {

Improvement improvement_from(const std::string& s, const std::string& rule) {
  if (s == "speedup") return Improvement::Speedup;
  if (s == "utilization") return Improvement::Utilization;
  throw Error(Errc::InvalidConfig,
              "rule " + rule + ": expected improvement must be speedup or utilization", rule);
}

std::vector<SuggestionRule> parse_rules(const YAML::Node& root) {
  std::vector<SuggestionRule> rules;
  const auto list = root["rules"];
  if (!list) return rules;
  if (!list.IsSequence()) throw Error(Errc::InvalidConfig, "'rules' must be a list", "rules");
  for (const auto& node : list) {
    SuggestionRule r;
    if (!node["id"]) throw Error(Errc::InvalidConfig, "rule without an id", "rules");
    r.id = node["id"].as<std::string>();
    if (node["triggers"]) r.trigger_groups = node["triggers"].as<std::vector<std::string>>();
    r.also_trigger_from_above = node["also_trigger_from_above"].as<bool>(false);
    r.tuning_opportunity = node["opportunity"].as<std::string>("");
    r.transformation = node["transformation"].as<std::string>("");
    r.primary = improvement_from(node["primary"].as<std::string>("speedup"), r.id);
    if (node["secondary"]) r.secondary = improvement_from(node["secondary"].as<std::string>(), r.id);
    rules.push_back(std::move(r));
  }
  return rules;
}

void validate_rules(const std::vector<SuggestionRule>& rules, const MachineModel& model) {
  std::set<std::string> ids;
  for (const auto& r : rules) {
    if (!ids.insert(r.id).second)
      throw Error(Errc::InvalidConfig, "rule id '" + r.id + "' used twice", r.id);
    if (r.trigger_groups.empty())
      throw Error(Errc::InvalidConfig, "rule " + r.id + " has no trigger groups", r.id);
    for (const auto& g : r.trigger_groups)
      if (!model.has_group(g))
        throw Error(Errc::UnknownGroupInRule,
                    "rule " + r.id + " references group '" + g + "' missing from the model", g);
  }
}

std::vector<SuggestionRule> parse_and_validate(const std::string& text, const MachineModel& model) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(Errc::InvalidConfig, std::string("rule document: ") + e.what());
  }
  if (root.IsNull()) return default_rules(model);
  if (!root.IsMap()) throw Error(Errc::InvalidConfig, "rule document must be a map");
  std::vector<SuggestionRule> rules;
  try {
    rules = parse_rules(root);
  } catch (const YAML::Exception& e) {
    throw Error(Errc::InvalidConfig, std::string("rule document: ") + e.what());
  }
  validate_rules(rules, model);
  return rules;
}

}  // namespace

std::string to_string(Improvement i) {
  return i == Improvement::Speedup ? "speedup" : "utilization";
}

double FiredRule::max_rsm() const {
  return matched_rsm.empty() ? 0.0 : *std::max_element(matched_rsm.begin(), matched_rsm.end());
}

const std::string& default_rules_text() {
  static const std::string text(embedded::kDefaultRules);
  return text;
}

std::vector<SuggestionRule> default_rules(const MachineModel& model) {
  auto rules = parse_rules(YAML::Load(default_rules_text()));
  validate_rules(rules, model);
  return rules;
}

std::vector<SuggestionRule> load_rules(std::istream& config, const MachineModel& model) {
  std::stringstream buffer;
  buffer << config.rdbuf();
  return parse_and_validate(buffer.str(), model);
}

std::vector<SuggestionRule> load_rules_file(const std::string& path, const MachineModel& model) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, "cannot open rules file '" + path + "'", path);
  return load_rules(in, model);
}

SuggestionReport suggest(const RsmReport& report, const std::vector<SuggestionRule>& rules,
                         const MachineModel& model, std::size_t top_k, double threshold,
                         const std::string& kernel) {
  if (!report.normalized)
    throw Error(Errc::UnnormalizedReport, "suggestions need a normalized RSM report", kernel);

  SuggestionReport out;
  out.kernel = kernel;
  out.threshold_used = threshold;
  out.top_k = top_k;

  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [group, v] : report.per_resource)
    if (group != kUncategorizedGroup) ranked.emplace_back(group, v);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second > b.second || (a.second == b.second && a.first < b.first);
  });
  if (ranked.size() > top_k) ranked.resize(top_k);
  std::erase_if(ranked, [&](const auto& e) { return e.second < threshold; });
  for (const auto& [group, v] : ranked) out.dominant.push_back(group);

  for (const auto& rule : rules) {
    FiredRule fired;
    fired.rule_id = rule.id;
    for (const auto& [group, v] : ranked) {
      bool match = std::find(rule.trigger_groups.begin(), rule.trigger_groups.end(), group) !=
                   rule.trigger_groups.end();
      if (!match && rule.also_trigger_from_above) {
        const auto level = model.hierarchy_level(group);
        for (const auto& t : rule.trigger_groups) {
          const auto trigger_level = model.hierarchy_level(t);
          if (level && trigger_level && *level > *trigger_level) match = true;
        }
      }
      if (match) {
        fired.matched_groups.push_back(group);
        fired.matched_rsm.push_back(v);
      }
    }
    if (!fired.matched_groups.empty()) out.fired.push_back(std::move(fired));
  }
  std::stable_sort(out.fired.begin(), out.fired.end(), [](const FiredRule& a, const FiredRule& b) {
    return a.max_rsm() > b.max_rsm() || (a.max_rsm() == b.max_rsm() && a.rule_id < b.rule_id);
  });
  return out;
}

}  // namespace gpursm
