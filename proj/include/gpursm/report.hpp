// SPDX-License-Identifier: Apache-2.0
//
// Analysis results, the sunburst tree and their JSON form.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gpursm/comparative.hpp"
#include "gpursm/config.hpp"
#include "gpursm/machine_model.hpp"
#include "gpursm/pipeline.hpp"
#include "gpursm/suggest.hpp"
#include "gpursm/targets.hpp"

namespace gpursm {

enum class SunburstLevel { Application, Kernel, Resource, Event };

std::string to_string(SunburstLevel level);
SunburstLevel sunburst_level_from_string(const std::string& name);

struct SunburstNode {
  std::string label;
  SunburstLevel level = SunburstLevel::Application;
  double value = 0.0;
  /// Set on the UNCAT resource sector.
  bool uncategorized = false;
  std::vector<SunburstNode> children;
};

struct SunburstKernel {
  std::string kernel;
  /// Normalized report; per_event holds the beliefs used for apportionment.
  RsmReport rsm;
  GroupMembers partition;
};

/// app -> kernel -> resource -> event. Each kernel carries its normalized RSM
/// (value 1); event values split their resource's value in proportion to
/// belief. Zero-valued sectors are omitted. Siblings are ordered by
/// descending value, then label.
SunburstNode build_sunburst(const std::string& app, const std::vector<SunburstKernel>& kernels);

struct KernelResult {
  std::string kernel;
  TargetVector target;
  DictionaryAnalysis analysis;
  RsmReport normalized;
  SuggestionReport suggestions;
};

struct TaskResult {
  TaskSpec spec;
  AnalysisParams params;
  std::vector<KernelResult> kernels;
  SunburstNode sunburst;
};

struct ComparisonResult {
  ComparisonSpec spec;
  AnalysisParams params;
  std::vector<std::string> join_labels;
  std::vector<std::string> unmatched_baseline;
  std::vector<std::string> unmatched_variant;
  std::vector<std::string> dropped_columns_baseline;
  std::vector<std::string> dropped_columns_variant;
  ComparativeResult result;
};

struct RunResults {
  const TaskConfig* config = nullptr;
  const MachineModel* model = nullptr;
  const std::vector<SuggestionRule>* rules = nullptr;
  std::vector<TaskResult> tasks;
  std::vector<ComparisonResult> comparisons;
};

/// Canonical report document. Contains no timestamps or host details, so
/// identical inputs give identical documents.
nlohmann::json build_report(const RunResults& results);

nlohmann::json to_json(const SunburstNode& node);
SunburstNode sunburst_from_json(const nlohmann::json& j);

/// One bar of a comparative chart.
struct ComparisonBar {
  std::string group;
  double bar_value = 0.0;
  double rel_change = 0.0;
  bool rel_change_defined = true;
  double neg_rsm = 0.0;
  double pos_rsm = 0.0;
};

struct ComparisonChart {
  std::string name;
  std::string baseline;
  std::string variant;
  /// Ordered by descending |bar_value|, then group.
  std::vector<ComparisonBar> bars;
};

ComparisonChart chart_from_json(const nlohmann::json& comparison);

/// Serialized form written to report.json.
std::string dump_report(const nlohmann::json& report);

}  // namespace gpursm
