// SPDX-License-Identifier: Apache-2.0
#include "gpursm/comparative.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gpursm/error.hpp"

namespace gpursm {
namespace {

constexpr double kRelativeEpsilon = 1e-12;

std::vector<std::string> join_labels(const ProfileTable& table, const std::string& kernel,
                                     JoinKey key, const RowKeySpec& row_key) {
  std::vector<std::string> out;
  for (const auto& g : group_rows(table, kernel, row_key)) {
    std::string label = g.workload_id;
    if (key == JoinKey::WorkloadFrequency && g.frequency_mhz)
      label += "@" + std::to_string(*g.frequency_mhz) + "MHz";
    if (!row_key.average_replicates) label = g.label;
    out.push_back(std::move(label));
  }
  std::set<std::string> seen;
  for (const auto& l : out)
    if (!seen.insert(l).second)
      throw Error(Errc::DuplicateJoinKey,
                  "join key '" + l + "' occurs more than once for kernel '" + kernel + "'", l);
  return out;
}

Dictionary take(const Dictionary& d, const std::vector<Eigen::Index>& rows,
                const std::vector<std::string>& cols, const std::vector<std::string>& labels) {
  Dictionary picked = select_columns(d, cols);
  Dictionary out;
  out.col_labels = picked.col_labels;
  out.col_stats = picked.col_stats;
  out.row_labels = labels;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), picked.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.values.row(static_cast<Eigen::Index>(i)) = picked.values.row(rows[i]);
  return out;
}

}  // namespace

std::string to_string(JoinKey key) {
  return key == JoinKey::Workload ? "workload" : "workload_frequency";
}

JoinKey join_key_from_string(const std::string& name) {
  if (name == "workload") return JoinKey::Workload;
  if (name == "workload_frequency") return JoinKey::WorkloadFrequency;
  throw Error(Errc::InvalidConfig,
              "unknown join key '" + name + "' (expected workload or workload_frequency)", name);
}

PairedDictionaries align_pairs(const ComparisonSide& side1, const ComparisonSide& side2,
                               JoinKey join_key, const RowKeySpec& row_key,
                               const AlphaBuckets& buckets) {
  const Dictionary full1 = build_dictionary(*side1.table, side1.kernel, row_key);
  const Dictionary full2 = build_dictionary(*side2.table, side2.kernel, row_key);
  const auto keys1 = join_labels(*side1.table, side1.kernel, join_key, row_key);
  const auto keys2 = join_labels(*side2.table, side2.kernel, join_key, row_key);
  const auto t1 = compute_target(side1.target, *side1.table, side1.kernel, row_key, buckets);
  const auto t2 = compute_target(side2.target, *side2.table, side2.kernel, row_key, buckets);

  PairedDictionaries p;
  p.label_1 = side1.label.empty() ? side1.kernel : side1.label;
  p.label_2 = side2.label.empty() ? side2.kernel : side2.label;

  std::vector<Eigen::Index> rows1, rows2;
  for (std::size_t i = 0; i < keys1.size(); ++i) {
    auto it = std::find(keys2.begin(), keys2.end(), keys1[i]);
    if (it == keys2.end()) {
      p.unmatched_rows_1.push_back(keys1[i]);
      continue;
    }
    rows1.push_back(static_cast<Eigen::Index>(i));
    rows2.push_back(static_cast<Eigen::Index>(it - keys2.begin()));
    p.join_labels.push_back(keys1[i]);
  }
  for (const auto& k : keys2)
    if (std::find(keys1.begin(), keys1.end(), k) == keys1.end()) p.unmatched_rows_2.push_back(k);
  if (rows1.empty())
    throw Error(Errc::EmptyIntersection,
                p.label_1 + " and " + p.label_2 + " share no configurations");

  std::vector<std::string> cols;
  for (const auto& c : full1.col_labels) {
    if (std::find(full2.col_labels.begin(), full2.col_labels.end(), c) != full2.col_labels.end())
      cols.push_back(c);
    else
      p.dropped_columns_1.push_back(c);
  }
  for (const auto& c : full2.col_labels)
    if (std::find(full1.col_labels.begin(), full1.col_labels.end(), c) == full1.col_labels.end())
      p.dropped_columns_2.push_back(c);
  if (cols.empty())
    throw Error(Errc::EmptyIntersection, p.label_1 + " and " + p.label_2 + " share no events");

  p.d1 = take(full1, rows1, cols, p.join_labels);
  p.d2 = take(full2, rows2, cols, p.join_labels);
  p.delta = p.d1;
  p.delta.values = p.d1.values - p.d2.values;
  p.delta_prime = p.d1;
  p.delta_prime.values = p.d2.values - p.d1.values;

  p.dt.resize(static_cast<Eigen::Index>(rows1.size()));
  for (std::size_t i = 0; i < rows1.size(); ++i)
    p.dt(static_cast<Eigen::Index>(i)) = t1.values(rows1[i]) - t2.values(rows2[i]);
  return p;
}

std::map<std::string, RelativeChange> relative_usage_change(const PairedDictionaries& p,
                                                            const MachineModel& model) {
  std::map<std::string, RelativeChange> out;
  const auto part = partition_columns(p.d1, model);
  for (const auto& [group, cols] : part.with_uncategorized()) {
    double s1 = 0.0, s2 = 0.0;
    for (auto c : cols) {
      s1 += p.d1.values.col(static_cast<Eigen::Index>(c)).sum();
      s2 += p.d2.values.col(static_cast<Eigen::Index>(c)).sum();
    }
    const double cells = static_cast<double>(cols.size()) * static_cast<double>(p.d1.rows());
    RelativeChange rc;
    rc.mean_1 = s1 / cells;
    rc.mean_2 = s2 / cells;
    const double base = std::min(std::abs(rc.mean_1), std::abs(rc.mean_2));
    if (base > kRelativeEpsilon) {
      rc.value = (rc.mean_2 - rc.mean_1) / base;
    } else {
      rc.defined = rc.mean_1 == rc.mean_2;
      rc.value = 0.0;
    }
    out[group] = rc;
  }
  return out;
}

ComparativeResult comparative_rsm(const PairedDictionaries& p, const MachineModel& model,
                                  const AnalysisParams& params) {
  if ((p.delta.values.array() == 0.0).all())
    throw Error(Errc::DegenerateDelta, p.label_1 + " and " + p.label_2 +
                                           " have identical counters on every aligned row");

  AnalysisParams directional = params;
  directional.polarity = Polarity::Positive;
  const Eigen::VectorXd t = min_max_normalize(p.dt);

  const auto neg = analyze_dictionary(p.delta, t, model, directional);
  const auto pos = analyze_dictionary(p.delta_prime, t, model, directional);
  const auto changes = relative_usage_change(p, model);

  ComparativeResult result;
  result.label_1 = p.label_1;
  result.label_2 = p.label_2;
  result.rows = static_cast<std::size_t>(p.d1.rows());
  for (const auto& [group, members] : neg.partition) {
    ResourceComparison rc;
    rc.neg_rsm = neg.rsm.per_resource.at(group);
    rc.pos_rsm = pos.rsm.per_resource.at(group);
    if (auto it = changes.find(group); it != changes.end()) rc.rel_change = it->second;
    const double diff = rc.rel_change.mean_2 - rc.rel_change.mean_1;
    const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
    rc.bar_value = sign * std::max(rc.neg_rsm, rc.pos_rsm);
    result.per_resource[group] = rc;
  }
  return result;
}

}  // namespace gpursm
