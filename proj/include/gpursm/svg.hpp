// SPDX-License-Identifier: Apache-2.0
//
// Static SVG 1.1 views of a report: sunburst per task, bar chart per comparison.
#pragma once

#include <string>
#include <string_view>

#include "gpursm/report.hpp"

namespace gpursm {

std::string xml_escape(std::string_view text);

/// Replaces every character outside [A-Za-z0-9._-] with '_'.
std::string sanitize_filename(std::string_view name);

/// Fixed-point text independent of the global locale.
std::string format_fixed(double value, int decimals);

std::string render_sunburst_svg(const SunburstNode& root);

/// Horizontal bars over a [-1, 1] axis with the zero line in the middle.
std::string render_comparison_svg(const ComparisonChart& chart);

}  // namespace gpursm
