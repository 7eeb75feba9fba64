// SPDX-License-Identifier: Apache-2.0
#include "gpursm/pipeline.hpp"

#include <algorithm>
#include <map>

#include "gpursm/error.hpp"

namespace gpursm {

Eigen::VectorXd fit_target(const Eigen::VectorXd& t, NormalizationMode mode) {
  if (mode == NormalizationMode::UnitNorm || t.size() == 0) return t;
  return t.array() - t.mean();
}

std::string to_string(WorkloadKey key) {
  switch (key) {
    case WorkloadKey::None: return "none";
    case WorkloadKey::Workload: return "workload";
    case WorkloadKey::Frequency: return "frequency";
  }
  return "none";
}

WorkloadKey workload_key_from_string(const std::string& name) {
  if (name == "none") return WorkloadKey::None;
  if (name == "workload") return WorkloadKey::Workload;
  if (name == "frequency") return WorkloadKey::Frequency;
  throw Error(Errc::InvalidConfig,
              "unknown workload key '" + name + "' (expected none, workload or frequency)", name);
}

std::vector<RowSubset> workload_subsets(const ProfileTable& table, const std::string& kernel,
                                        const RowKeySpec& row_key, WorkloadKey key) {
  if (key == WorkloadKey::None) return {};
  const auto groups = group_rows(table, kernel, row_key);
  std::map<std::string, std::vector<Eigen::Index>> by_label;
  std::vector<std::string> order;
  for (std::size_t r = 0; r < groups.size(); ++r) {
    std::string label;
    if (key == WorkloadKey::Workload) {
      label = groups[r].workload_id;
    } else {
      if (!groups[r].frequency_mhz)
        throw Error(Errc::InvalidConfig,
                    "workload key 'frequency' needs frequency_mhz for kernel '" + kernel + "'",
                    kernel);
      label = std::to_string(*groups[r].frequency_mhz) + "MHz";
    }
    auto [it, inserted] = by_label.try_emplace(label);
    if (inserted) order.push_back(label);
    it->second.push_back(static_cast<Eigen::Index>(r));
  }
  std::vector<RowSubset> out;
  for (const auto& label : order) out.push_back({label, by_label[label]});
  return out;
}

DictionaryAnalysis analyze_dictionary(const Dictionary& raw, const Eigen::VectorXd& target,
                                      const MachineModel& model, const AnalysisParams& params,
                                      const std::vector<RowSubset>& subsets) {
  if (raw.rows() != target.size())
    throw Error(Errc::DimensionMismatch, "dictionary rows and target length differ");

  DictionaryAnalysis out;
  out.rows = static_cast<std::size_t>(raw.rows());

  const auto part = partition_columns(raw, model);
  std::vector<std::string> kept;
  for (std::size_t c = 0; c < raw.col_labels.size(); ++c) {
    if (std::find(part.excluded.begin(), part.excluded.end(), c) != part.excluded.end())
      out.excluded.push_back(raw.col_labels[c]);
    else
      kept.push_back(raw.col_labels[c]);
  }
  for (auto c : part.uncategorized) out.uncategorized.push_back(raw.col_labels[c]);
  for (const auto& [group, cols] : part.with_uncategorized()) {
    std::vector<std::string> names;
    for (auto c : cols) names.push_back(raw.col_labels[c]);
    out.partition.emplace_back(group, std::move(names));
  }
  if (kept.empty() || out.partition.empty())
    throw Error(Errc::EmptyGroupPartition, "every column is excluded by the machine model");

  const Dictionary analyzed = select_columns(raw, kept);
  out.columns = kept.size();

  std::vector<RowSubset> plan = subsets;
  if (plan.empty()) {
    RowSubset all{"all", {}};
    for (Eigen::Index r = 0; r < raw.rows(); ++r) all.rows.push_back(r);
    plan.push_back(std::move(all));
  }

  std::vector<BeliefVector> per_workload;
  std::vector<std::string> workload_labels;
  std::map<std::string, double> freq_sum, coef_sum, err_sum;
  std::map<std::string, std::size_t> constant_hits;
  const double w_count = static_cast<double>(plan.size());

  for (std::size_t w = 0; w < plan.size(); ++w) {
    const auto& subset = plan[w];
    Dictionary sub;
    sub.values.resize(static_cast<Eigen::Index>(subset.rows.size()), analyzed.cols());
    Eigen::VectorXd sub_t(static_cast<Eigen::Index>(subset.rows.size()));
    for (std::size_t i = 0; i < subset.rows.size(); ++i) {
      sub.values.row(static_cast<Eigen::Index>(i)) = analyzed.values.row(subset.rows[i]);
      sub_t(static_cast<Eigen::Index>(i)) = target(subset.rows[i]);
      sub.row_labels.push_back(analyzed.row_labels.at(static_cast<std::size_t>(subset.rows[i])));
    }
    sub.col_labels = analyzed.col_labels;
    sub.col_stats = analyzed.col_stats;

    const Dictionary norm = normalize_columns(sub, params.normalization);
    const Eigen::VectorXd t = fit_target(sub_t, params.normalization);

    EnsembleParams ep;
    ep.kappa = params.kappa;
    ep.tau = params.tau;
    ep.draws = params.draws;
    ep.seed = params.seed + w;
    ep.fidelity_epsilon = params.fidelity_epsilon;
    ep.polarity = params.polarity;
    ep.threads = params.threads;
    const auto ens = ensemble_omp(norm.values, t, ep);
    out.k_max = std::max(out.k_max, ens.k_max);

    auto bv = beliefs(norm.values, norm.col_labels, t, ens, params.gamma, norm.dropped_constants);
    for (Eigen::Index i = 0; i < norm.cols(); ++i) {
      const auto& name = norm.col_labels[static_cast<std::size_t>(i)];
      freq_sum[name] += ens.selection_frequency(i) / w_count;
      coef_sum[name] += ens.avg_coefficients(i) / w_count;
    }
    for (std::size_t i = 0; i < bv.labels.size(); ++i)
      err_sum[bv.labels[i]] += bv.errors(static_cast<Eigen::Index>(i)) / w_count;
    for (const auto& name : norm.dropped_constants) ++constant_hits[name];

    per_workload.push_back(std::move(bv));
    workload_labels.push_back(subset.label);
  }

  out.rsm = resource_rsm(per_workload, out.partition, workload_labels);

  std::map<std::string, std::string> group_of;
  for (const auto& [group, names] : out.partition)
    for (const auto& n : names) group_of[n] = group;
  for (const auto& name : analyzed.col_labels) {
    EventSummary e;
    e.event = name;
    e.group = group_of[name];
    e.belief = out.rsm.per_event[name];
    e.error = err_sum[name];
    e.selection_frequency = freq_sum[name];
    e.avg_coefficient = coef_sum[name];
    e.constant = constant_hits[name] == plan.size();
    if (e.constant) out.constants.push_back(name);
    out.events.push_back(std::move(e));
  }
  return out;
}

}  // namespace gpursm
