// SPDX-License-Identifier: Apache-2.0
#include "gpursm/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gpursm {
namespace {

constexpr double kTau = 2.0 * std::numbers::pi;
constexpr double kCenter = 400.0;
constexpr std::array<double, 5> kRings = {0.0, 80.0, 170.0, 270.0, 370.0};
constexpr double kMinLabelSweep = 0.14;

constexpr std::array<const char*, 10> kPalette = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                                  "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                                                  "#9c755f", "#86bcb6"};
constexpr const char* kUncatColor = "#bdbdbd";

std::string color_for(const std::string& group) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : group) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return kPalette[h % kPalette.size()];
}

std::string num(double v) { return format_fixed(v, 2); }

struct Point {
  double x, y;
};

Point polar(double r, double a) { return {kCenter + r * std::sin(a), kCenter - r * std::cos(a)}; }

std::string sector_path(double r0, double r1, double a0, double a1) {
  std::ostringstream p;
  if (a1 - a0 >= kTau - 1e-9) {
    // Full ring: two half arcs per circle, inner circle cut out by evenodd.
    p << "M" << num(kCenter) << "," << num(kCenter - r1) << " A" << num(r1) << "," << num(r1)
      << " 0 1 1 " << num(kCenter) << "," << num(kCenter + r1) << " A" << num(r1) << ","
      << num(r1) << " 0 1 1 " << num(kCenter) << "," << num(kCenter - r1) << " Z";
    if (r0 > 0.0)
      p << " M" << num(kCenter) << "," << num(kCenter - r0) << " A" << num(r0) << "," << num(r0)
        << " 0 1 0 " << num(kCenter) << "," << num(kCenter + r0) << " A" << num(r0) << ","
        << num(r0) << " 0 1 0 " << num(kCenter) << "," << num(kCenter - r0) << " Z";
    return p.str();
  }
  const int large = a1 - a0 > std::numbers::pi ? 1 : 0;
  const Point o0 = polar(r1, a0), o1 = polar(r1, a1);
  p << "M" << num(o0.x) << "," << num(o0.y) << " A" << num(r1) << "," << num(r1) << " 0 " << large
    << " 1 " << num(o1.x) << "," << num(o1.y);
  if (r0 > 0.0) {
    const Point i0 = polar(r0, a0), i1 = polar(r0, a1);
    p << " L" << num(i1.x) << "," << num(i1.y) << " A" << num(r0) << "," << num(r0) << " 0 "
      << large << " 0 " << num(i0.x) << "," << num(i0.y);
  } else {
    p << " L" << num(kCenter) << "," << num(kCenter);
  }
  p << " Z";
  return p.str();
}

void emit_sector(std::ostringstream& out, const SunburstNode& n, int depth, double a0, double a1,
                 const std::string& group) {
  std::string fill;
  double opacity = 1.0;
  switch (n.level) {
    case SunburstLevel::Application: fill = "#f0f0f0"; break;
    case SunburstLevel::Kernel: fill = depth % 2 ? "#d9d9d9" : "#cccccc"; break;
    case SunburstLevel::Resource: fill = n.uncategorized ? kUncatColor : color_for(group); break;
    case SunburstLevel::Event:
      fill = group == kUncategorizedGroup ? kUncatColor : color_for(group);
      opacity = 0.6;
      break;
  }
  const double r0 = kRings[static_cast<std::size_t>(depth)];
  const double r1 = kRings[static_cast<std::size_t>(depth) + 1];
  out << "  <path class=\"" << to_string(n.level) << "\" d=\"" << sector_path(r0, r1, a0, a1)
      << "\" fill=\"" << fill << "\" fill-opacity=\"" << format_fixed(opacity, 1)
      << "\" fill-rule=\"evenodd\" stroke=\"#ffffff\" stroke-width=\"1\"";
  if (n.uncategorized) out << " data-uncategorized=\"true\"";
  out << "><title>" << xml_escape(n.label) << ": " << format_fixed(n.value, 4)
      << "</title></path>\n";

  if (a1 - a0 >= kMinLabelSweep || depth == 0) {
    const double mid = 0.5 * (a0 + a1);
    const Point c = depth == 0 || a1 - a0 >= kTau - 1e-9 ? Point{kCenter, kCenter - 0.5 * (r0 + r1)}
                                                         : polar(0.5 * (r0 + r1), mid);
    std::string label = n.label;
    if (label.size() > 18) label = label.substr(0, 17) + "~";
    out << "  <text x=\"" << num(c.x) << "\" y=\"" << num(depth == 0 ? kCenter : c.y)
        << "\" font-size=\"10\" text-anchor=\"middle\" dominant-baseline=\"middle\">"
        << xml_escape(label) << "</text>\n";
  }
}

void emit_tree(std::ostringstream& out, const SunburstNode& n, int depth, double a0, double a1,
               const std::string& group) {
  if (depth >= static_cast<int>(kRings.size()) - 1) return;
  emit_sector(out, n, depth, a0, a1, group);
  if (!(n.value > 0.0)) return;
  double a = a0;
  for (const auto& c : n.children) {
    const double sweep = (a1 - a0) * c.value / n.value;
    emit_tree(out, c, depth + 1, a, a + sweep,
              c.level == SunburstLevel::Resource ? c.label : group);
    a += sweep;
  }
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string sanitize_filename(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

std::string format_fixed(double value, int decimals) {
  if (std::abs(value) < 0.5 * std::pow(10.0, -decimals)) value = 0.0;
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, decimals);
  return std::string(buf.data(), res.ptr);
}

std::string render_sunburst_svg(const SunburstNode& root) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"830\" "
         "viewBox=\"0 0 800 830\" font-family=\"sans-serif\">\n"
      << "  <title>" << xml_escape(root.label) << "</title>\n"
      << "  <rect width=\"800\" height=\"830\" fill=\"#ffffff\"/>\n";
  emit_tree(out, root, 0, 0.0, kTau, {});
  out << "  <text x=\"400\" y=\"810\" font-size=\"12\" text-anchor=\"middle\">"
      << "rings: application / kernel / resource (normalized RSM) / event</text>\n"
      << "</svg>\n";
  return out.str();
}

std::string render_comparison_svg(const ComparisonChart& chart) {
  constexpr double kZero = 520.0, kHalf = 230.0, kTop = 70.0, kRow = 28.0;
  const double height = kTop + kRow * static_cast<double>(chart.bars.size()) + 60.0;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\""
      << num(height) << "\" viewBox=\"0 0 800 " << num(height) << "\" font-family=\"sans-serif\">\n"
      << "  <title>" << xml_escape(chart.name) << "</title>\n"
      << "  <rect width=\"800\" height=\"" << num(height) << "\" fill=\"#ffffff\"/>\n"
      << "  <text x=\"400\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">"
      << xml_escape(chart.baseline) << " to " << xml_escape(chart.variant) << "</text>\n";

  const double axis_y = kTop + kRow * static_cast<double>(chart.bars.size()) + 8.0;
  for (double tick : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const double x = kZero + tick * kHalf;
    out << "  <line x1=\"" << num(x) << "\" y1=\"" << num(kTop - 8.0) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(axis_y) << "\" stroke=\"" << (tick == 0.0 ? "#000000" : "#dddddd")
        << "\" stroke-width=\"1\"/>\n"
        << "  <text x=\"" << num(x) << "\" y=\"" << num(axis_y + 16.0)
        << "\" font-size=\"10\" text-anchor=\"middle\">" << format_fixed(tick, 1) << "</text>\n";
  }

  double y = kTop;
  for (const auto& b : chart.bars) {
    const double v = std::clamp(b.bar_value, -1.0, 1.0);
    const double x0 = std::min(kZero, kZero + v * kHalf);
    const double w = std::abs(v) * kHalf;
    const std::string fill = b.group == kUncategorizedGroup ? kUncatColor
                             : v < 0.0                      ? "#4e79a7"
                                                            : "#e15759";
    const std::string rel =
        b.rel_change_defined ? format_fixed(b.rel_change, 3) : std::string("undefined");
    out << "  <text x=\"" << num(kZero - kHalf - 12.0) << "\" y=\"" << num(y + 14.0)
        << "\" font-size=\"11\" text-anchor=\"end\">" << xml_escape(b.group) << "</text>\n"
        << "  <rect class=\"bar\" x=\"" << num(x0) << "\" y=\"" << num(y + 4.0) << "\" width=\""
        << num(w) << "\" height=\"" << num(kRow - 8.0) << "\" fill=\"" << fill << "\">"
        << "<title>" << xml_escape(b.group) << ": bar_value " << format_fixed(b.bar_value, 4)
        << ", rel_change " << rel << ", neg_rsm " << format_fixed(b.neg_rsm, 4) << ", pos_rsm "
        << format_fixed(b.pos_rsm, 4) << "</title></rect>\n"
        << "  <text x=\"" << num(kZero + kHalf + 8.0) << "\" y=\"" << num(y + 14.0)
        << "\" font-size=\"10\">" << format_fixed(b.bar_value, 3) << "</text>\n";
    y += kRow;
  }
  out << "  <text x=\"400\" y=\"" << num(axis_y + 36.0)
      << "\" font-size=\"11\" text-anchor=\"middle\">bar_value: sign of usage change times "
         "max(neg_rsm, pos_rsm)</text>\n"
      << "</svg>\n";
  return out.str();
}

}  // namespace gpursm
