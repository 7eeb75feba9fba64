// SPDX-License-Identifier: Apache-2.0
//
// Abstract machine model: resource groups and the rules that assign raw
// counter names to them.
//
// Rule precedence is fixed: exclusions, then manual overrides, then miss
// promotions, then group patterns in declaration order. The first rule that
// matches decides.
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gpursm/profile.hpp"

namespace gpursm {

/// Literal name matcher. When `keywords` is non-empty the name must also
/// contain one of them as a whole '_'-separated token.
struct Pattern {
  enum class Kind { Prefix, Substring, Exact };
  Kind kind = Kind::Prefix;
  std::string text;
  std::vector<std::string> keywords;

  bool matches(std::string_view name) const;
  bool operator==(const Pattern&) const = default;
};

struct ResourceGroup {
  std::string name;
  std::vector<Pattern> patterns;
};

/// A pattern routed straight to a destination group.
struct RoutedPattern {
  Pattern pattern;
  std::string group;
};

struct MachineModel {
  std::vector<ResourceGroup> groups;
  /// Fastest to slowest memory level.
  std::vector<std::string> hierarchy_order;
  std::vector<RoutedPattern> miss_promotions;
  std::vector<RoutedPattern> manual_overrides;
  std::vector<Pattern> exclusions;

  bool has_group(const std::string& name) const;
  std::vector<std::string> group_names() const;
  /// Position in hierarchy_order, if the group is a memory level.
  std::optional<std::size_t> hierarchy_level(const std::string& group) const;
};

struct Excluded {
  bool operator==(const Excluded&) const = default;
};
struct Uncategorized {
  bool operator==(const Uncategorized&) const = default;
};
struct GroupRef {
  std::string name;
  bool operator==(const GroupRef&) const = default;
};
using Category = std::variant<GroupRef, Excluded, Uncategorized>;

Category categorize_event(const std::string& name, const MachineModel& model);

/// Validates and returns the model described by a model document. An empty
/// document yields the built-in default.
MachineModel load_model(std::istream& config);
MachineModel load_model_file(const std::string& path);
MachineModel default_model();
/// Text of the built-in default model document.
const std::string& default_model_text();

/// Throws DuplicateGroup, UnknownPromotionTarget or AmbiguousRule.
void validate_model(const MachineModel& model);

/// Name of the pseudo-group collecting columns no rule claims.
inline constexpr const char* kUncategorizedGroup = "UNCAT";

struct ColumnPartition {
  /// Groups in model order; only groups with at least one column appear.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  std::vector<std::size_t> uncategorized;
  std::vector<std::size_t> excluded;

  /// Groups plus a trailing UNCAT entry when uncategorized is non-empty.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> with_uncategorized() const;
};

ColumnPartition partition_columns(const std::vector<std::string>& col_labels,
                                  const MachineModel& model);
ColumnPartition partition_columns(const Dictionary& d, const MachineModel& model);

/// Group a single event belongs to for reporting: a model group, UNCAT, or
/// nullopt when excluded.
std::optional<std::string> report_group(const std::string& event, const MachineModel& model);

}  // namespace gpursm
