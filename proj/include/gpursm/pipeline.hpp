// SPDX-License-Identifier: Apache-2.0
//
// normalize -> ensemble OMP -> beliefs -> RSM for one dictionary/target pair.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpursm/machine_model.hpp"
#include "gpursm/profile.hpp"
#include "gpursm/sparse.hpp"

namespace gpursm {

struct AnalysisParams {
  double kappa = 0.5;
  std::size_t tau = 5;
  std::size_t draws = 50000;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  double fidelity_epsilon = 1e-6;
  NormalizationMode normalization = NormalizationMode::ZScore;
  Polarity polarity = Polarity::Absolute;
  unsigned threads = 0;
};

/// Rows forming one workload of the RSM average.
struct RowSubset {
  std::string label;
  std::vector<Eigen::Index> rows;
};

/// Target handed to OMP and the belief errors: centered in zscore mode (the
/// centered columns cannot represent an offset), unchanged otherwise.
Eigen::VectorXd fit_target(const Eigen::VectorXd& t, NormalizationMode mode);

struct EventSummary {
  std::string event;
  std::string group;
  double belief = 0.0;
  double error = 0.0;
  double selection_frequency = 0.0;
  double avg_coefficient = 0.0;
  bool constant = false;
};

struct DictionaryAnalysis {
  std::size_t rows = 0;
  /// Columns entering the pursuit (after exclusions, before constant drop).
  std::size_t columns = 0;
  std::size_t k_max = 0;
  GroupMembers partition;
  std::vector<std::string> excluded;
  std::vector<std::string> uncategorized;
  std::vector<std::string> constants;
  /// Means over workloads; ordered as the dictionary columns.
  std::vector<EventSummary> events;
  RsmReport rsm;
};

/// `subsets` empty means a single workload covering every row.
DictionaryAnalysis analyze_dictionary(const Dictionary& raw, const Eigen::VectorXd& target,
                                      const MachineModel& model, const AnalysisParams& params,
                                      const std::vector<RowSubset>& subsets = {});

enum class WorkloadKey { None, Workload, Frequency };

std::string to_string(WorkloadKey key);
WorkloadKey workload_key_from_string(const std::string& name);

/// Splits the rows of `group_rows(table, kernel, row_key)` by `key`.
std::vector<RowSubset> workload_subsets(const ProfileTable& table, const std::string& kernel,
                                        const RowKeySpec& row_key, WorkloadKey key);

}  // namespace gpursm
