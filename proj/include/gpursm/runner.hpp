// SPDX-License-Identifier: Apache-2.0
//
// End-to-end orchestration behind the `analyze` command.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gpursm/config.hpp"
#include "gpursm/error.hpp"

namespace gpursm {

/// Command-line values; each set field beats the configuration document,
/// including per-task hyperparameters.
struct RunOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> draws;
  std::optional<double> kappa;
  std::optional<std::size_t> tau;
  std::optional<double> gamma;
  std::optional<unsigned> threads;
};

void apply_overrides(TaskConfig& cfg, const RunOverrides& overrides);

struct RunSummary {
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> files;
};

/// Runs every task and comparison and writes report.json, run_meta.json and
/// the SVG views. Throws gpursm::Error.
RunSummary run_analysis(const TaskConfig& cfg, const std::filesystem::path& output_dir,
                        std::ostream& log);

/// Regenerates the SVG views of an existing report.json into `output_dir`.
RunSummary render_report(const std::filesystem::path& report,
                         const std::filesystem::path& output_dir);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// The published report schema.
const std::string& report_schema_text();

/// Exit status for a failure class; 0 is success, 1 an unexpected failure.
int exit_code(ErrorCategory category);

/// `analyze` with error reporting: returns the process exit status.
int analyze_command(const std::filesystem::path& config, const RunOverrides& overrides,
                    const std::optional<std::filesystem::path>& render_only, std::ostream& log,
                    std::ostream& err);

}  // namespace gpursm
