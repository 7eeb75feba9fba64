// SPDX-License-Identifier: Apache-2.0
#include "gpursm/targets.hpp"

#include <algorithm>
#include <cmath>

#include "gpursm/error.hpp"

namespace gpursm {
namespace {

Eigen::VectorXd row_means(const ProfileTable& table, const std::vector<RowGroup>& groups,
                          double RunRecord::*field) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(groups.size()));
  for (std::size_t r = 0; r < groups.size(); ++r) {
    std::vector<double> samples;
    for (auto idx : groups[r].record_indices) samples.push_back(table.records[idx].*field);
    out(static_cast<Eigen::Index>(r)) = order_independent_mean(std::move(samples));
  }
  return out;
}

std::vector<std::string> labels_of(const std::vector<RowGroup>& groups) {
  std::vector<std::string> out;
  for (const auto& g : groups) out.push_back(g.label);
  return out;
}

}  // namespace

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Ts: return "ts";
    case TargetKind::UtilLoss: return "util_loss";
    case TargetKind::Score: return "score";
  }
  return "ts";
}

TargetKind target_kind_from_string(const std::string& name) {
  if (name == "ts") return TargetKind::Ts;
  if (name == "util_loss") return TargetKind::UtilLoss;
  if (name == "score") return TargetKind::Score;
  throw Error(Errc::InvalidConfig,
              "unknown target '" + name + "' (expected ts, util_loss or score)", name);
}

std::string to_string(TargetNormalization::Method method) {
  switch (method) {
    case TargetNormalization::Method::None: return "none";
    case TargetNormalization::Method::GlobalMax: return "global_max";
    case TargetNormalization::Method::KernelMax: return "kernel_max";
    case TargetNormalization::Method::MinMax: return "min_max";
  }
  return "none";
}

void validate_buckets(const AlphaBuckets& b) {
  const bool ordered = b.a1 > 0.0 && b.a1 < b.a2 && b.a2 < b.a3;
  const bool in_range = b.a1 < AlphaBuckets::kLowBoundary &&
                        b.a2 >= AlphaBuckets::kLowBoundary && b.a2 < AlphaBuckets::kHighBoundary &&
                        b.a3 >= AlphaBuckets::kHighBoundary && b.a3 <= 1.0;
  if (!ordered || !in_range)
    throw Error(Errc::InvalidBuckets,
                "alpha buckets must satisfy 0 < a1 < 0.5 <= a2 < 0.8 <= a3 <= 1");
}

double alpha_of(double ul, const AlphaBuckets& buckets) {
  if (!(ul >= 0.0 && ul <= 1.0))
    throw Error(Errc::OutOfRange, "utilization " + std::to_string(ul) + " outside [0,1]");
  if (ul < AlphaBuckets::kLowBoundary) return buckets.a1;
  if (ul < AlphaBuckets::kHighBoundary) return buckets.a2;
  return buckets.a3;
}

TargetVector compute_ts(const ProfileTable& table, const std::string& kernel, TsScope scope,
                        const RowKeySpec& row_key) {
  const auto groups = group_rows(table, kernel, row_key);
  TargetVector t;
  t.kind = TargetKind::Ts;
  t.row_labels = labels_of(groups);
  const Eigen::VectorXd times = row_means(table, groups, &RunRecord::exec_time_s);

  double max_time = times.maxCoeff();
  if (scope == TsScope::Global) {
    // Maximum over the same row aggregation for every kernel, so the largest
    // row in the table normalizes to exactly 1.
    for (const auto& other : table.kernels()) {
      if (other == kernel) continue;
      const auto other_groups = group_rows(table, other, row_key);
      max_time = std::max(max_time, row_means(table, other_groups, &RunRecord::exec_time_s).maxCoeff());
    }
  }
  if (!(max_time > 0.0))
    throw Error(Errc::ZeroMaxTime, "maximum execution time is zero", kernel);

  t.raw = times;
  t.values = times / max_time;
  t.normalization.method = scope == TsScope::Global ? TargetNormalization::Method::GlobalMax
                                                    : TargetNormalization::Method::KernelMax;
  t.normalization.divisor = max_time;
  return t;
}

Eigen::VectorXd row_utilization(const ProfileTable& table, const std::string& kernel,
                                const RowKeySpec& row_key) {
  return row_means(table, group_rows(table, kernel, row_key), &RunRecord::sm_utilization);
}

TargetVector compute_util_loss(const ProfileTable& table, const std::string& kernel,
                               const RowKeySpec& row_key) {
  const auto groups = group_rows(table, kernel, row_key);
  TargetVector t;
  t.kind = TargetKind::UtilLoss;
  t.row_labels = labels_of(groups);
  t.values = 1.0 - row_means(table, groups, &RunRecord::sm_utilization).array();
  t.raw = t.values;
  return t;
}

Eigen::VectorXd min_max_normalize(const Eigen::VectorXd& v, double* min_out, double* max_out) {
  const double lo = v.size() ? v.minCoeff() : 0.0;
  const double hi = v.size() ? v.maxCoeff() : 0.0;
  if (min_out) *min_out = lo;
  if (max_out) *max_out = hi;
  if (!(hi > lo)) return Eigen::VectorXd::Zero(v.size());
  return (v.array() - lo) / (hi - lo);
}

TargetVector compute_score(const TargetVector& ts, const Eigen::VectorXd& ul,
                           const AlphaBuckets& buckets, bool renormalize) {
  if (ts.kind != TargetKind::Ts)
    throw Error(Errc::MisalignedRows, "score needs a ts target vector");
  if (ts.values.size() != ul.size())
    throw Error(Errc::MisalignedRows, "ts has " + std::to_string(ts.values.size()) +
                                          " rows, utilization has " + std::to_string(ul.size()));
  validate_buckets(buckets);

  TargetVector s;
  s.kind = TargetKind::Score;
  s.row_labels = ts.row_labels;
  s.raw.resize(ts.values.size());
  for (Eigen::Index i = 0; i < ts.values.size(); ++i) {
    if (!(ts.values(i) > 0.0))
      throw Error(Errc::NonPositiveTime,
                  "row '" + ts.row_labels.at(static_cast<std::size_t>(i)) + "' has ts = 0");
    s.raw(i) = 1.0 - alpha_of(ul(i), buckets) / ts.values(i);
  }
  if (renormalize) {
    s.normalization.method = TargetNormalization::Method::MinMax;
    s.values = min_max_normalize(s.raw, &s.normalization.min, &s.normalization.max);
  } else {
    s.values = s.raw;
  }
  return s;
}

TargetVector compute_target(TargetKind kind, const ProfileTable& table, const std::string& kernel,
                            const RowKeySpec& row_key, const AlphaBuckets& buckets) {
  switch (kind) {
    case TargetKind::Ts: return compute_ts(table, kernel, TsScope::Global, row_key);
    case TargetKind::UtilLoss: return compute_util_loss(table, kernel, row_key);
    case TargetKind::Score:
      return compute_score(compute_ts(table, kernel, TsScope::Global, row_key),
                           row_utilization(table, kernel, row_key), buckets, true);
  }
  throw Error(Errc::InvalidConfig, "unknown target kind");
}

}  // namespace gpursm
