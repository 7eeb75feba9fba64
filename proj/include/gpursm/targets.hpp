// SPDX-License-Identifier: Apache-2.0
//
// Target vectors explained by the sparse model: normalized execution time,
// SM utilization loss, and the composite score 1 - alpha(ul)/ts.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpursm/profile.hpp"

namespace gpursm {

enum class TargetKind { Ts, UtilLoss, Score };

std::string to_string(TargetKind kind);
/// Throws InvalidConfig for anything other than ts, util_loss, score.
TargetKind target_kind_from_string(const std::string& name);

/// Record of the scaling applied to produce TargetVector::values.
struct TargetNormalization {
  enum class Method { None, GlobalMax, KernelMax, MinMax };
  Method method = Method::None;
  double divisor = 1.0;  // GlobalMax / KernelMax
  double min = 0.0;      // MinMax
  double max = 0.0;      // MinMax
};

std::string to_string(TargetNormalization::Method method);

struct TargetVector {
  TargetKind kind = TargetKind::Ts;
  Eigen::VectorXd values;
  std::vector<std::string> row_labels;
  TargetNormalization normalization;
  /// Values before normalization: seconds for ts, 1 - ul for util_loss, raw
  /// score before min-max rescaling.
  Eigen::VectorXd raw;
};

/// Utilization buckets: [0,0.5) -> a1, [0.5,0.8) -> a2, [0.8,1] -> a3.
struct AlphaBuckets {
  double a1 = 0.1;
  double a2 = 0.5;
  double a3 = 0.8;

  static constexpr double kLowBoundary = 0.5;
  static constexpr double kHighBoundary = 0.8;
};

/// Throws InvalidBuckets unless 0 < a1 < a2 < a3 and each alpha lies in its
/// own utilization range.
void validate_buckets(const AlphaBuckets& buckets);

double alpha_of(double ul, const AlphaBuckets& buckets = {});

enum class TsScope { Global, PerKernel };

TargetVector compute_ts(const ProfileTable& table, const std::string& kernel,
                        TsScope scope = TsScope::Global, const RowKeySpec& row_key = {});

TargetVector compute_util_loss(const ProfileTable& table, const std::string& kernel,
                               const RowKeySpec& row_key = {});

/// Per-row mean SM utilization, aligned with group_rows.
Eigen::VectorXd row_utilization(const ProfileTable& table, const std::string& kernel,
                                const RowKeySpec& row_key = {});

TargetVector compute_score(const TargetVector& ts, const Eigen::VectorXd& ul,
                           const AlphaBuckets& buckets = {}, bool renormalize = true);

/// Convenience dispatcher used by the pipeline.
TargetVector compute_target(TargetKind kind, const ProfileTable& table, const std::string& kernel,
                            const RowKeySpec& row_key = {}, const AlphaBuckets& buckets = {});

/// Min-max rescaling to [0,1]; a constant vector maps to zeros.
Eigen::VectorXd min_max_normalize(const Eigen::VectorXd& v, double* min_out = nullptr,
                                  double* max_out = nullptr);

}  // namespace gpursm
