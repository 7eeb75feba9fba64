// SPDX-License-Identifier: Apache-2.0
#include "gpursm/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>

#include "gpursm/error.hpp"

namespace gpursm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// RFC 4180 fields within a single line; quoted fields may not span lines.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  for (auto& f : fields) f = std::string(trim(f));
  return fields;
}

std::optional<double> parse_real(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::vector<std::string> ProfileTable::kernels() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : records)
    if (seen.insert(r.kernel_name).second) out.push_back(r.kernel_name);
  return out;
}

bool ProfileTable::has_kernel(const std::string& kernel) const {
  return std::any_of(records.begin(), records.end(),
                     [&](const RunRecord& r) { return r.kernel_name == kernel; });
}

ProfileTable parse_profile_csv(std::istream& source, const ColumnSchema& schema) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw Error(Errc::MissingColumn, "no header row", schema.kernel);

  auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto require_column = [&](const std::string& name) {
    auto idx = find_column(name);
    if (!idx) throw Error(Errc::MissingColumn, "missing column '" + name + "'", name);
    return *idx;
  };

  const std::size_t kernel_col = require_column(schema.kernel);
  const std::size_t workload_col = require_column(schema.workload);
  const std::size_t time_col = require_column(schema.time);
  const std::size_t util_col = require_column(schema.utilization);
  const auto freq_col = find_column(schema.frequency);
  const auto power_col = find_column(schema.power);

  std::vector<std::size_t> event_cols;
  {
    std::set<std::string> seen;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == kernel_col || c == workload_col || c == time_col || c == util_col ||
          (freq_col && c == *freq_col) || (power_col && c == *power_col))
        continue;
      if (header[c].empty() || !seen.insert(header[c]).second)
        throw Error(Errc::MissingColumn, "empty or duplicate event column name at position " +
                                             std::to_string(c + 1), header[c]);
      event_cols.push_back(c);
    }
  }

  ProfileTable table;
  std::map<std::tuple<std::string, std::string, std::optional<std::int64_t>>, std::size_t>
      replicate_count;
  std::map<std::string, std::size_t> first_record_of_kernel;
  std::vector<bool> event_seen(header.size(), false);
  std::size_t row = 0;

  while (std::getline(source, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw Error(Errc::NonNumericCell,
                  "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()),
                  "", row);

    auto number = [&](std::size_t col) {
      auto v = parse_real(fields[col]);
      if (!v)
        throw Error(Errc::NonNumericCell,
                    "row " + std::to_string(row) + ", column '" + header[col] +
                        "': '" + fields[col] + "' is not a number",
                    header[col], row);
      if (*v < 0.0)
        throw Error(Errc::NegativeValue,
                    "row " + std::to_string(row) + ", column '" + header[col] + "' is negative",
                    header[col], row);
      return *v;
    };

    RunRecord rec;
    rec.kernel_name = fields[kernel_col];
    rec.workload_id = fields[workload_col];
    if (rec.kernel_name.empty())
      throw Error(Errc::NonNumericCell, "row " + std::to_string(row) + " has an empty kernel name",
                  schema.kernel, row);
    rec.exec_time_s = number(time_col);
    rec.sm_utilization = number(util_col);
    if (rec.sm_utilization > 1.0)
      throw Error(Errc::UtilizationOutOfRange,
                  "row " + std::to_string(row) + ": sm utilization " + fields[util_col] +
                      " outside [0,1]",
                  schema.utilization, row);
    if (freq_col && !fields[*freq_col].empty()) {
      auto f = parse_integer(fields[*freq_col]);
      if (!f)
        throw Error(Errc::NonNumericCell,
                    "row " + std::to_string(row) + ": frequency '" + fields[*freq_col] +
                        "' is not an integer",
                    schema.frequency, row);
      if (*f <= 0)
        throw Error(Errc::NegativeValue,
                    "row " + std::to_string(row) + ": frequency must be positive",
                    schema.frequency, row);
      rec.frequency_mhz = *f;
    }
    if (power_col && !fields[*power_col].empty()) rec.power_w = number(*power_col);

    for (std::size_t c : event_cols) {
      if (fields[c].empty()) continue;
      rec.event_counts.emplace(header[c], number(c));
      event_seen[c] = true;
    }

    auto& count = replicate_count[{rec.kernel_name, rec.workload_id, rec.frequency_mhz}];
    rec.replicate = count++;

    auto [it, inserted] = first_record_of_kernel.emplace(rec.kernel_name, table.records.size());
    if (!inserted) {
      const auto& first = table.records[it->second].event_counts;
      bool same = first.size() == rec.event_counts.size() &&
                  std::equal(first.begin(), first.end(), rec.event_counts.begin(),
                             [](const auto& a, const auto& b) { return a.first == b.first; });
      if (!same)
        throw Error(Errc::InconsistentEventSet,
                    "kernel '" + rec.kernel_name + "' records different event sets (row " +
                        std::to_string(row) + ")",
                    rec.kernel_name, row);
    }
    table.records.push_back(std::move(rec));
  }

  for (std::size_t c : event_cols)
    if (event_seen[c]) table.event_universe.push_back(header[c]);
  return table;
}

ProfileTable load_profile_csv(const std::string& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open profile '" + path + "'", path);
  return parse_profile_csv(in, schema);
}

void write_profile_csv(std::ostream& out, const ProfileTable& table, const ColumnSchema& schema) {
  out << quote_if_needed(schema.kernel) << ',' << quote_if_needed(schema.workload) << ','
      << quote_if_needed(schema.frequency) << ',' << quote_if_needed(schema.time) << ','
      << quote_if_needed(schema.utilization) << ',' << quote_if_needed(schema.power);
  for (const auto& e : table.event_universe) out << ',' << quote_if_needed(e);
  out << '\n';
  for (const auto& r : table.records) {
    out << quote_if_needed(r.kernel_name) << ',' << quote_if_needed(r.workload_id) << ',';
    if (r.frequency_mhz) out << *r.frequency_mhz;
    out << ',' << format_real(r.exec_time_s) << ',' << format_real(r.sm_utilization) << ',';
    if (r.power_w) out << format_real(*r.power_w);
    for (const auto& e : table.event_universe) {
      out << ',';
      if (auto it = r.event_counts.find(e); it != r.event_counts.end()) out << format_real(it->second);
    }
    out << '\n';
  }
}

std::vector<RowGroup> group_rows(const ProfileTable& table, const std::string& kernel,
                                 const RowKeySpec& row_key) {
  using Key = std::tuple<std::string, std::optional<std::int64_t>, std::size_t>;
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < table.records.size(); ++i) {
    const auto& r = table.records[i];
    if (r.kernel_name != kernel) continue;
    Key key{r.workload_id, r.frequency_mhz, row_key.average_replicates ? 0 : r.replicate};
    groups[key].push_back(i);
  }
  if (groups.empty()) throw Error(Errc::UnknownKernel, "kernel '" + kernel + "' not found", kernel);

  std::vector<RowGroup> out;
  out.reserve(groups.size());
  for (auto& [key, indices] : groups) {
    const auto& [workload, freq, replicate] = key;
    RowGroup g;
    g.workload_id = workload;
    g.frequency_mhz = freq;
    g.label = workload;
    if (freq) g.label += "@" + std::to_string(*freq) + "MHz";
    if (!row_key.average_replicates) g.label += "#" + std::to_string(replicate);
    g.record_indices = std::move(indices);
    out.push_back(std::move(g));
  }
  return out;
}

double order_independent_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::string to_string(NormalizationMode mode) {
  return mode == NormalizationMode::UnitNorm ? "unit_norm" : "zscore";
}

NormalizationMode normalization_from_string(const std::string& name) {
  if (name == "unit_norm") return NormalizationMode::UnitNorm;
  if (name == "zscore") return NormalizationMode::ZScore;
  throw Error(Errc::InvalidParameter, "unknown normalization mode '" + name + "'", name);
}

Dictionary build_dictionary(const ProfileTable& table, const std::string& kernel,
                            const RowKeySpec& row_key) {
  const auto groups = group_rows(table, kernel, row_key);

  Dictionary d;
  const auto& events = table.records[groups.front().record_indices.front()].event_counts;
  for (const auto& name : table.event_universe)
    if (events.count(name)) d.col_labels.push_back(name);
  if (d.col_labels.empty())
    throw Error(Errc::EmptySelection, "kernel '" + kernel + "' has no recorded events", kernel);

  d.values.resize(static_cast<Eigen::Index>(groups.size()),
                  static_cast<Eigen::Index>(d.col_labels.size()));
  for (std::size_t r = 0; r < groups.size(); ++r) {
    d.row_labels.push_back(groups[r].label);
    for (std::size_t c = 0; c < d.col_labels.size(); ++c) {
      std::vector<double> samples;
      samples.reserve(groups[r].record_indices.size());
      for (auto idx : groups[r].record_indices)
        samples.push_back(table.records[idx].event_counts.at(d.col_labels[c]));
      d.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          order_independent_mean(std::move(samples));
    }
  }
  d.col_stats.assign(d.col_labels.size(), ColumnStats{});
  return d;
}

Dictionary select_columns(const Dictionary& d, const std::vector<std::string>& keep) {
  Dictionary out;
  out.row_labels = d.row_labels;
  out.normalization = d.normalization;
  out.dropped_constants = d.dropped_constants;
  out.values.resize(d.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    auto it = std::find(d.col_labels.begin(), d.col_labels.end(), keep[k]);
    if (it == d.col_labels.end())
      throw Error(Errc::EmptySelection, "column '" + keep[k] + "' not in dictionary", keep[k]);
    const auto src = it - d.col_labels.begin();
    out.values.col(static_cast<Eigen::Index>(k)) = d.values.col(src);
    out.col_labels.push_back(keep[k]);
    out.col_stats.push_back(d.col_stats.at(static_cast<std::size_t>(src)));
  }
  return out;
}

Dictionary normalize_columns(const Dictionary& d, NormalizationMode mode) {
  Dictionary out;
  out.row_labels = d.row_labels;
  out.normalization = mode;
  out.dropped_constants = d.dropped_constants;

  std::vector<Eigen::VectorXd> kept;
  for (Eigen::Index c = 0; c < d.cols(); ++c) {
    const auto col = d.values.col(c);
    const auto name = d.col_labels[static_cast<std::size_t>(c)];
    const bool constant = (col.array() == col(0)).all();

    ColumnStats stats;
    stats.mean = col.mean();
    stats.norm = col.norm();
    stats.offset = mode == NormalizationMode::ZScore ? stats.mean : 0.0;
    Eigen::VectorXd shifted = col.array() - stats.offset;
    stats.scale = shifted.norm();
    if (constant || !(stats.scale > 0.0)) {
      out.dropped_constants.push_back(name);
      continue;
    }
    kept.push_back(shifted / stats.scale);
    out.col_labels.push_back(name);
    out.col_stats.push_back(stats);
  }
  if (kept.empty())
    throw Error(Errc::AllColumnsConstant, "every column of the dictionary is constant");

  out.values.resize(d.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) out.values.col(static_cast<Eigen::Index>(c)) = kept[c];
  return out;
}

Eigen::VectorXd raw_scale_coefficients(const Dictionary& normalized,
                                       const Eigen::VectorXd& coefficients) {
  if (coefficients.size() != normalized.cols())
    throw Error(Errc::DimensionMismatch, "coefficient length does not match dictionary columns");
  Eigen::VectorXd out(coefficients.size());
  for (Eigen::Index c = 0; c < coefficients.size(); ++c)
    out(c) = coefficients(c) / normalized.col_stats[static_cast<std::size_t>(c)].scale;
  return out;
}

}  // namespace gpursm
