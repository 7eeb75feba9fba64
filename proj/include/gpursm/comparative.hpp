// SPDX-License-Identifier: Apache-2.0
//
// Differential analysis of two kernels or code variants: which resource
// usage changes explain the change in the target.
#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpursm/machine_model.hpp"
#include "gpursm/pipeline.hpp"
#include "gpursm/profile.hpp"
#include "gpursm/targets.hpp"

namespace gpursm {

enum class JoinKey { Workload, WorkloadFrequency };

std::string to_string(JoinKey key);
JoinKey join_key_from_string(const std::string& name);

/// One side of a comparison: a kernel of a profile table analyzed for a target.
struct ComparisonSide {
  const ProfileTable* table = nullptr;
  std::string kernel;
  TargetKind target = TargetKind::Score;
  std::string label;  // "task:kernel"
};

struct PairedDictionaries {
  Dictionary d1;
  Dictionary d2;
  /// d1 - d2 and d2 - d1, raw counts.
  Dictionary delta;
  Dictionary delta_prime;
  /// target_1 - target_2 on the aligned rows.
  Eigen::VectorXd dt;
  std::vector<std::string> join_labels;
  std::vector<std::string> unmatched_rows_1;
  std::vector<std::string> unmatched_rows_2;
  std::vector<std::string> dropped_columns_1;  // present only in d1
  std::vector<std::string> dropped_columns_2;  // present only in d2
  std::string label_1;
  std::string label_2;
};

PairedDictionaries align_pairs(const ComparisonSide& side1, const ComparisonSide& side2,
                               JoinKey join_key = JoinKey::WorkloadFrequency,
                               const RowKeySpec& row_key = {}, const AlphaBuckets& buckets = {});

struct RelativeChange {
  double value = 0.0;
  /// False when the smaller group mean is zero; `value` is then 0.
  bool defined = true;
  double mean_1 = 0.0;
  double mean_2 = 0.0;
};

/// Per-group change of mean usage from d1 (baseline) to d2, relative to the
/// smaller of the two means so that swapping the sides negates the value.
std::map<std::string, RelativeChange> relative_usage_change(const PairedDictionaries& p,
                                                            const MachineModel& model);

struct ResourceComparison {
  double neg_rsm = 0.0;
  double pos_rsm = 0.0;
  RelativeChange rel_change;
  double bar_value = 0.0;
};

struct ComparativeResult {
  std::map<std::string, ResourceComparison> per_resource;
  std::string label_1;
  std::string label_2;
  std::size_t rows = 0;
};

/// neg_rsm: RSM of (d1 - d2) explaining dt; pos_rsm: RSM of (d2 - d1)
/// explaining dt. Both runs only admit columns positively correlated with the
/// residual. bar_value = sign(mean_2 - mean_1) * max(neg_rsm, pos_rsm).
ComparativeResult comparative_rsm(const PairedDictionaries& p, const MachineModel& model,
                                  const AnalysisParams& params);

}  // namespace gpursm
