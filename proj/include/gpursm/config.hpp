// SPDX-License-Identifier: Apache-2.0
//
// Task configuration document: which kernels to analyze against which
// target, which pairs to compare, and the hyperparameters for both.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpursm/comparative.hpp"
#include "gpursm/pipeline.hpp"
#include "gpursm/profile.hpp"
#include "gpursm/targets.hpp"

namespace gpursm {

/// Hyperparameters that may be set globally and overridden per task.
struct Hyperparams {
  double kappa = 0.5;
  std::size_t tau = 5;
  std::size_t draws = 50000;
  double gamma = 1.0;
  double fidelity_epsilon = 1e-6;
  NormalizationMode normalization = NormalizationMode::ZScore;
  unsigned threads = 0;
};

struct TaskSpec {
  std::string name;
  /// Profile CSV for this task; empty means the top-level `data`.
  std::string data;
  /// Empty means every kernel in the profile.
  std::vector<std::string> kernels;
  TargetKind target = TargetKind::Score;
  WorkloadKey workload_key = WorkloadKey::None;
  bool keep_replicates = false;
  Hyperparams hyperparams;
};

struct KernelRef {
  std::string task;
  std::string kernel;
  std::string label() const { return task + ":" + kernel; }
};

struct ComparisonSpec {
  std::string name;
  KernelRef baseline;
  KernelRef variant;
  JoinKey join = JoinKey::WorkloadFrequency;
};

struct SuggestSettings {
  std::size_t top_k = 3;
  double threshold = 0.15;
  /// Empty means the built-in ruleset.
  std::string rules;
};

struct TaskConfig {
  /// Paths as written in the document, echoed into the report.
  std::string data;
  std::string model;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  ColumnSchema columns;
  AlphaBuckets alpha;
  Hyperparams hyperparams;
  SuggestSettings suggest;
  std::vector<TaskSpec> tasks;
  std::vector<ComparisonSpec> comparisons;
  /// Directory relative paths are resolved against.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& path) const;
  const TaskSpec* find_task(const std::string& name) const;
};

/// Parses and validates a configuration document. Problems raise
/// Errc::InvalidConfig naming the offending key.
TaskConfig parse_task_config(std::istream& in, const std::filesystem::path& base_dir = {});
TaskConfig load_task_config(const std::filesystem::path& path);

/// Parses "task:kernel".
KernelRef parse_kernel_ref(const std::string& spec);

AnalysisParams to_analysis_params(const Hyperparams& h, std::uint64_t seed);

}  // namespace gpursm
