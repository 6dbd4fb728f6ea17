#include "airshed/error.hpp"

namespace airshed {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::MissingQaBand: return "MissingQaBand";
    case ErrorCode::QaOutOfRange: return "QaOutOfRange";
    case ErrorCode::GeoreferenceMismatch: return "GeoreferenceMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::BadSceneName: return "BadSceneName";
    case ErrorCode::NotAFeatureCollection: return "NotAFeatureCollection";
    case ErrorCode::UnsupportedGeometryType: return "UnsupportedGeometryType";
    case ErrorCode::MissingNameProperty: return "MissingNameProperty";
    case ErrorCode::DuplicateRegionName: return "DuplicateRegionName";
    case ErrorCode::InvalidRing: return "InvalidRing";
    case ErrorCode::SelfIntersectingRing: return "SelfIntersectingRing";
    case ErrorCode::MissingPollutant: return "MissingPollutant";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::NullCellsPresent: return "NullCellsPresent";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::NonNumericField: return "NonNumericField";
    case ErrorCode::NotStandardized: return "NotStandardized";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::AllNoise: return "AllNoise";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::RowMismatch: return "RowMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownRegionName: return "UnknownRegionName";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
      return ErrorCategory::Config;
    case ErrorCode::KTooLarge:
    case ErrorCode::DegenerateData:
    case ErrorCode::InvalidParams:
    case ErrorCode::AllNoise:
    case ErrorCode::SingleCluster:
    case ErrorCode::TooFewPoints:
      return ErrorCategory::Algorithm;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace airshed
