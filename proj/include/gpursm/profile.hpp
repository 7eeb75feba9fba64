// SPDX-License-Identifier: Apache-2.0
//
// Counter-profile ingestion: CSV -> ProfileTable -> per-kernel Dictionary.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gpursm {

/// One kernel invocation sample.
struct RunRecord {
  std::string kernel_name;
  std::string workload_id;
  std::optional<std::int64_t> frequency_mhz;
  double exec_time_s = 0.0;
  double sm_utilization = 0.0;
  std::optional<double> power_w;
  /// Events recorded for this sample. Events absent here were not collected.
  std::map<std::string, double> event_counts;
  /// Occurrence index among records sharing (kernel, workload, frequency).
  std::size_t replicate = 0;

  bool operator==(const RunRecord&) const = default;
};

struct ProfileTable {
  std::vector<RunRecord> records;
  /// Union of recorded event names, in header order.
  std::vector<std::string> event_universe;

  std::vector<std::string> kernels() const;
  bool has_kernel(const std::string& kernel) const;

  bool operator==(const ProfileTable&) const = default;
};

/// Header names of the metadata columns. Every other column is an event.
struct ColumnSchema {
  std::string kernel = "kernel";
  std::string workload = "workload";
  std::string frequency = "frequency_mhz";
  std::string time = "time_s";
  std::string utilization = "sm_util";
  std::string power = "power_w";
};

ProfileTable parse_profile_csv(std::istream& source, const ColumnSchema& schema = {});
ProfileTable load_profile_csv(const std::string& path, const ColumnSchema& schema = {});

/// Writes the table in the format parse_profile_csv reads. Absent cells are empty.
void write_profile_csv(std::ostream& out, const ProfileTable& table,
                       const ColumnSchema& schema = {});

/// How (workload, frequency, replicate) collapse into dictionary rows.
struct RowKeySpec {
  bool average_replicates = true;
};

/// Rows of one kernel after applying a RowKeySpec. Shared by the dictionary
/// builder and the target builders so both see the same row order.
struct RowGroup {
  std::string label;
  std::string workload_id;
  std::optional<std::int64_t> frequency_mhz;
  std::vector<std::size_t> record_indices;
};

std::vector<RowGroup> group_rows(const ProfileTable& table, const std::string& kernel,
                                 const RowKeySpec& row_key = {});

/// Mean of `values`, summed in ascending order so the result does not depend
/// on the order records arrived in.
double order_independent_mean(std::vector<double> values);

enum class NormalizationMode { UnitNorm, ZScore };

std::string to_string(NormalizationMode mode);
NormalizationMode normalization_from_string(const std::string& name);

struct ColumnStats {
  double mean = 0.0;
  double norm = 0.0;
  /// normalized = (raw - offset) / scale
  double offset = 0.0;
  double scale = 1.0;
  bool is_constant = false;
};

struct Dictionary {
  Eigen::MatrixXd values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<ColumnStats> col_stats;
  std::optional<NormalizationMode> normalization;
  /// Columns removed by normalize_columns because they carry no variation.
  std::vector<std::string> dropped_constants;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

Dictionary build_dictionary(const ProfileTable& table, const std::string& kernel,
                            const RowKeySpec& row_key = {});

/// Keeps only the listed columns, in the given order.
Dictionary select_columns(const Dictionary& d, const std::vector<std::string>& keep);

/// Drops constant columns and rescales the rest to unit Euclidean norm;
/// ZScore centers each column first.
Dictionary normalize_columns(const Dictionary& d, NormalizationMode mode);

/// Maps coefficients fitted against normalized columns back to raw counts.
Eigen::VectorXd raw_scale_coefficients(const Dictionary& normalized,
                                       const Eigen::VectorXd& coefficients);

}  // namespace gpursm
