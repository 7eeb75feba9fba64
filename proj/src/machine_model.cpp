// SPDX-License-Identifier: Apache-2.0
#include "gpursm/machine_model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gpursm/error.hpp"
#include "embedded_defaults.hpp"

namespace gpursm {
namespace {

bool has_token(std::string_view name, const std::string& token) {
  std::size_t start = 0;
  while (start <= name.size()) {
    auto end = name.find('_', start);
    if (end == std::string_view::npos) end = name.size();
    if (name.substr(start, end - start) == token) return true;
    start = end + 1;
  }
  return false;
}

Pattern parse_pattern(const YAML::Node& node, const std::string& where) {
  Pattern p;
  if (node.IsScalar()) {
    p.text = node.as<std::string>();
    return p;
  }
  if (!node.IsMap()) throw Error(Errc::InvalidModel, where + ": pattern must be a map", where);
  int kinds = 0;
  for (auto [key, kind] : {std::pair{"prefix", Pattern::Kind::Prefix},
                           std::pair{"substring", Pattern::Kind::Substring},
                           std::pair{"exact", Pattern::Kind::Exact}}) {
    if (node[key]) {
      p.kind = kind;
      p.text = node[key].as<std::string>();
      ++kinds;
    }
  }
  if (kinds != 1)
    throw Error(Errc::InvalidModel,
                where + ": pattern needs exactly one of prefix, substring, exact", where);
  if (p.text.empty()) throw Error(Errc::InvalidModel, where + ": empty pattern text", where);
  if (node["keywords"]) p.keywords = node["keywords"].as<std::vector<std::string>>();
  return p;
}

std::vector<RoutedPattern> parse_routed(const YAML::Node& node, const std::string& section) {
  std::vector<RoutedPattern> out;
  if (!node) return out;
  if (!node.IsSequence())
    throw Error(Errc::InvalidModel, "'" + section + "' must be a list", section);
  for (const auto& item : node) {
    if (!item.IsMap() || !item["to"])
      throw Error(Errc::InvalidModel, "'" + section + "' entries need a 'to' group", section);
    out.push_back({parse_pattern(item, section), item["to"].as<std::string>()});
  }
  return out;
}

std::string describe(const Pattern& p) {
  static constexpr const char* kinds[] = {"prefix", "substring", "exact"};
  return std::string(kinds[static_cast<int>(p.kind)]) + ":" + p.text;
}

MachineModel parse_model(const YAML::Node& root) {
  MachineModel m;
  const auto groups = root["groups"];
  if (!groups || !groups.IsSequence())
    throw Error(Errc::InvalidModel, "model needs a 'groups' list", "groups");
  for (const auto& g : groups) {
    ResourceGroup group;
    if (!g["name"]) throw Error(Errc::InvalidModel, "group without a name", "groups");
    group.name = g["name"].as<std::string>();
    if (const auto patterns = g["patterns"]; patterns && patterns.IsSequence())
      for (const auto& p : patterns) group.patterns.push_back(parse_pattern(p, group.name));
    m.groups.push_back(std::move(group));
  }
  if (const auto h = root["hierarchy"]) m.hierarchy_order = h.as<std::vector<std::string>>();
  m.miss_promotions = parse_routed(root["promotions"], "promotions");
  m.manual_overrides = parse_routed(root["overrides"], "overrides");
  if (const auto ex = root["exclusions"]) {
    if (!ex.IsSequence()) throw Error(Errc::InvalidModel, "'exclusions' must be a list", "exclusions");
    for (const auto& p : ex) m.exclusions.push_back(parse_pattern(p, "exclusions"));
  }
  return m;
}

void check_unambiguous(const std::vector<std::pair<Pattern, std::string>>& rules,
                       const std::string& tier) {
  for (std::size_t i = 0; i < rules.size(); ++i)
    for (std::size_t j = i + 1; j < rules.size(); ++j)
      if (rules[i].first == rules[j].first && rules[i].second != rules[j].second)
        throw Error(Errc::AmbiguousRule,
                    tier + " pattern '" + describe(rules[i].first) + "' routes to both " +
                        rules[i].second + " and " + rules[j].second,
                    describe(rules[i].first));
}

}  // namespace

bool Pattern::matches(std::string_view name) const {
  bool hit = false;
  switch (kind) {
    case Kind::Prefix: hit = name.substr(0, text.size()) == text; break;
    case Kind::Substring: hit = name.find(text) != std::string_view::npos; break;
    case Kind::Exact: hit = name == text; break;
  }
  if (!hit || keywords.empty()) return hit;
  return std::any_of(keywords.begin(), keywords.end(),
                     [&](const std::string& k) { return has_token(name, k); });
}

bool MachineModel::has_group(const std::string& name) const {
  return std::any_of(groups.begin(), groups.end(),
                     [&](const ResourceGroup& g) { return g.name == name; });
}

std::vector<std::string> MachineModel::group_names() const {
  std::vector<std::string> out;
  for (const auto& g : groups) out.push_back(g.name);
  return out;
}

std::optional<std::size_t> MachineModel::hierarchy_level(const std::string& group) const {
  auto it = std::find(hierarchy_order.begin(), hierarchy_order.end(), group);
  if (it == hierarchy_order.end()) return std::nullopt;
  return static_cast<std::size_t>(it - hierarchy_order.begin());
}

Category categorize_event(const std::string& name, const MachineModel& model) {
  if (name.empty()) return Uncategorized{};
  for (const auto& p : model.exclusions)
    if (p.matches(name)) return Excluded{};
  for (const auto& r : model.manual_overrides)
    if (r.pattern.matches(name)) return GroupRef{r.group};
  for (const auto& r : model.miss_promotions)
    if (r.pattern.matches(name)) return GroupRef{r.group};
  for (const auto& g : model.groups)
    for (const auto& p : g.patterns)
      if (p.matches(name)) return GroupRef{g.name};
  return Uncategorized{};
}

void validate_model(const MachineModel& model) {
  std::set<std::string> names;
  for (const auto& g : model.groups) {
    if (g.name.empty()) throw Error(Errc::InvalidModel, "group with empty name");
    if (g.name == kUncategorizedGroup)
      throw Error(Errc::InvalidModel, "group name UNCAT is reserved", g.name);
    if (!names.insert(g.name).second)
      throw Error(Errc::DuplicateGroup, "group '" + g.name + "' defined twice", g.name);
    if (g.patterns.empty())
      throw Error(Errc::InvalidModel, "group '" + g.name + "' has no patterns", g.name);
  }
  for (const auto* tier : {&model.miss_promotions, &model.manual_overrides})
    for (const auto& r : *tier)
      if (!names.count(r.group))
        throw Error(Errc::UnknownPromotionTarget,
                    "rule '" + describe(r.pattern) + "' targets undefined group '" + r.group + "'",
                    r.group);
  std::set<std::string> levels;
  for (const auto& h : model.hierarchy_order) {
    if (!names.count(h))
      throw Error(Errc::InvalidModel, "hierarchy names undefined group '" + h + "'", h);
    if (!levels.insert(h).second)
      throw Error(Errc::InvalidModel, "hierarchy lists '" + h + "' twice", h);
  }

  std::vector<std::pair<Pattern, std::string>> group_rules;
  for (const auto& g : model.groups)
    for (const auto& p : g.patterns) group_rules.emplace_back(p, g.name);
  check_unambiguous(group_rules, "group");
  for (const auto* tier : {&model.miss_promotions, &model.manual_overrides}) {
    std::vector<std::pair<Pattern, std::string>> rules;
    for (const auto& r : *tier) rules.emplace_back(r.pattern, r.group);
    check_unambiguous(rules, tier == &model.miss_promotions ? "promotion" : "override");
  }
}

MachineModel load_model(std::istream& config) {
  std::stringstream buffer;
  buffer << config.rdbuf();
  const auto text = buffer.str();
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(Errc::InvalidModel, std::string("model document: ") + e.what());
  }
  if (root.IsNull()) return default_model();
  if (!root.IsMap()) throw Error(Errc::InvalidModel, "model document must be a map");
  MachineModel m;
  try {
    m = parse_model(root);
  } catch (const YAML::Exception& e) {
    throw Error(Errc::InvalidModel, std::string("model document: ") + e.what());
  }
  validate_model(m);
  return m;
}

MachineModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidModel, "cannot open model file '" + path + "'", path);
  return load_model(in);
}

const std::string& default_model_text() {
  static const std::string text(embedded::kDefaultModel);
  return text;
}

MachineModel default_model() {
  static const MachineModel model = [] {
    auto m = parse_model(YAML::Load(default_model_text()));
    validate_model(m);
    return m;
  }();
  return model;
}

std::vector<std::pair<std::string, std::vector<std::size_t>>>
ColumnPartition::with_uncategorized() const {
  auto out = groups;
  if (!uncategorized.empty()) out.emplace_back(kUncategorizedGroup, uncategorized);
  return out;
}

ColumnPartition partition_columns(const std::vector<std::string>& col_labels,
                                  const MachineModel& model) {
  ColumnPartition part;
  std::map<std::string, std::vector<std::size_t>> by_group;
  for (std::size_t c = 0; c < col_labels.size(); ++c) {
    const auto cat = categorize_event(col_labels[c], model);
    if (const auto* g = std::get_if<GroupRef>(&cat))
      by_group[g->name].push_back(c);
    else if (std::holds_alternative<Excluded>(cat))
      part.excluded.push_back(c);
    else
      part.uncategorized.push_back(c);
  }
  for (const auto& g : model.groups)
    if (auto it = by_group.find(g.name); it != by_group.end())
      part.groups.emplace_back(g.name, it->second);
  return part;
}

ColumnPartition partition_columns(const Dictionary& d, const MachineModel& model) {
  return partition_columns(d.col_labels, model);
}

std::optional<std::string> report_group(const std::string& event, const MachineModel& model) {
  const auto cat = categorize_event(event, model);
  if (const auto* g = std::get_if<GroupRef>(&cat)) return g->name;
  if (std::holds_alternative<Excluded>(cat)) return std::nullopt;
  return std::string(kUncategorizedGroup);
}

}  // namespace gpursm
