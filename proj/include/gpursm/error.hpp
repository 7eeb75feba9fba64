// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gpursm {

/// Failure classes, mapped one-to-one onto CLI exit codes.
enum class ErrorCategory { Config = 2, Data = 3, Analysis = 4 };

enum class Errc {
  // profile ingestion
  MissingColumn,
  NonNumericCell,
  NegativeValue,
  UtilizationOutOfRange,
  InconsistentEventSet,
  UnknownKernel,
  EmptySelection,
  AllColumnsConstant,
  Io,
  // machine model
  DuplicateGroup,
  UnknownPromotionTarget,
  AmbiguousRule,
  InvalidModel,
  // targets
  ZeroMaxTime,
  NonPositiveTime,
  OutOfRange,
  InvalidBuckets,
  MisalignedRows,
  // sparse selection
  DimensionMismatch,
  InvalidKappa,
  InvalidParameter,
  EmptyGroupPartition,
  AllZeroRsm,
  // comparative
  EmptyIntersection,
  DuplicateJoinKey,
  DegenerateDelta,
  // suggestions
  UnknownGroupInRule,
  UnnormalizedReport,
  // task configuration
  InvalidConfig,
};

std::string_view to_string(Errc code) noexcept;
ErrorCategory category_of(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::string subject = {},
        std::optional<std::size_t> row = std::nullopt)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        subject_(std::move(subject)),
        row_(row) {}

  Errc code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  /// Column, kernel, group or path the error refers to, when there is one.
  const std::string& subject() const noexcept { return subject_; }
  /// 1-based data row (header excluded) for ingestion errors.
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  Errc code_;
  std::string subject_;
  std::optional<std::size_t> row_;
};

}  // namespace gpursm
