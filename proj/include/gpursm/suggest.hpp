// SPDX-License-Identifier: Apache-2.0
//
// Rule engine mapping dominant resource groups to code-transformation advice.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpursm/machine_model.hpp"
#include "gpursm/sparse.hpp"

namespace gpursm {

enum class Improvement { Speedup, Utilization };

std::string to_string(Improvement i);

struct SuggestionRule {
  std::string id;
  std::vector<std::string> trigger_groups;
  std::string tuning_opportunity;
  std::string transformation;
  Improvement primary = Improvement::Speedup;
  std::optional<Improvement> secondary;
  /// Also fire when a group slower than a trigger group in the memory
  /// hierarchy is dominant.
  bool also_trigger_from_above = false;
};

/// Parses a rule document and validates it against `model`. An empty document
/// yields the built-in ruleset.
std::vector<SuggestionRule> load_rules(std::istream& config, const MachineModel& model);
std::vector<SuggestionRule> load_rules_file(const std::string& path, const MachineModel& model);
std::vector<SuggestionRule> default_rules(const MachineModel& model);
const std::string& default_rules_text();

struct FiredRule {
  std::string rule_id;
  std::vector<std::string> matched_groups;
  std::vector<double> matched_rsm;
  double max_rsm() const;
};

struct SuggestionReport {
  std::string kernel;
  std::vector<std::string> dominant;
  std::vector<FiredRule> fired;
  double threshold_used = 0.0;
  std::size_t top_k = 0;
};

/// Dominant set: the top_k resources by normalized RSM that also reach
/// `threshold` (UNCAT never counts). A rule fires when one of its trigger
/// groups is dominant. Fired rules are ordered by descending matched RSM,
/// ties by rule id.
SuggestionReport suggest(const RsmReport& report, const std::vector<SuggestionRule>& rules,
                         const MachineModel& model, std::size_t top_k = 3,
                         double threshold = 0.15, const std::string& kernel = {});

}  // namespace gpursm
