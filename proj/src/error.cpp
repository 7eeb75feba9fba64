// SPDX-License-Identifier: Apache-2.0
#include "gpursm/error.hpp"

namespace gpursm {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::NonNumericCell: return "NonNumericCell";
    case Errc::NegativeValue: return "NegativeValue";
    case Errc::UtilizationOutOfRange: return "UtilizationOutOfRange";
    case Errc::InconsistentEventSet: return "InconsistentEventSet";
    case Errc::UnknownKernel: return "UnknownKernel";
    case Errc::EmptySelection: return "EmptySelection";
    case Errc::AllColumnsConstant: return "AllColumnsConstant";
    case Errc::Io: return "Io";
    case Errc::DuplicateGroup: return "DuplicateGroup";
    case Errc::UnknownPromotionTarget: return "UnknownPromotionTarget";
    case Errc::AmbiguousRule: return "AmbiguousRule";
    case Errc::InvalidModel: return "InvalidModel";
    case Errc::ZeroMaxTime: return "ZeroMaxTime";
    case Errc::NonPositiveTime: return "NonPositiveTime";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InvalidBuckets: return "InvalidBuckets";
    case Errc::MisalignedRows: return "MisalignedRows";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidKappa: return "InvalidKappa";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::EmptyGroupPartition: return "EmptyGroupPartition";
    case Errc::AllZeroRsm: return "AllZeroRsm";
    case Errc::EmptyIntersection: return "EmptyIntersection";
    case Errc::DuplicateJoinKey: return "DuplicateJoinKey";
    case Errc::DegenerateDelta: return "DegenerateDelta";
    case Errc::UnknownGroupInRule: return "UnknownGroupInRule";
    case Errc::UnnormalizedReport: return "UnnormalizedReport";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

ErrorCategory category_of(Errc code) noexcept {
  switch (code) {
    case Errc::MissingColumn:
    case Errc::NonNumericCell:
    case Errc::NegativeValue:
    case Errc::UtilizationOutOfRange:
    case Errc::InconsistentEventSet:
    case Errc::Io:
      return ErrorCategory::Data;
    case Errc::UnknownKernel:
    case Errc::DuplicateGroup:
    case Errc::UnknownPromotionTarget:
    case Errc::AmbiguousRule:
    case Errc::InvalidModel:
    case Errc::InvalidBuckets:
    case Errc::InvalidKappa:
    case Errc::InvalidParameter:
    case Errc::UnknownGroupInRule:
    case Errc::InvalidConfig:
      return ErrorCategory::Config;
    default:
      return ErrorCategory::Analysis;
  }
}

}  // namespace gpursm
