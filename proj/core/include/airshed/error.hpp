#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace airshed {

enum class ErrorCode {
  // raster_io
  MalformedHeader,
  DimensionMismatch,
  NonNumericCell,
  MissingQaBand,
  QaOutOfRange,
  GeoreferenceMismatch,
  EmptyInput,
  BadSceneName,
  // geometry
  NotAFeatureCollection,
  UnsupportedGeometryType,
  MissingNameProperty,
  DuplicateRegionName,
  InvalidRing,
  SelfIntersectingRing,
  MissingPollutant,
  // feature_table
  EmptyResult,
  NullCellsPresent,
  TooFewRows,
  HeaderMismatch,
  RaggedRow,
  NonNumericField,
  NotStandardized,
  // clustering / model selection
  KTooLarge,
  DegenerateData,
  InvalidParams,
  AllNoise,
  SingleCluster,
  TooFewPoints,
  // signatures
  RowMismatch,
  LengthMismatch,
  // rendering
  UnknownRegionName,
  // pipeline
  ConfigError,
  IoError,
};

/// Coarse error class, mapped one-to-one onto the CLI exit codes.
enum class ErrorCategory { Config = 2, Data = 3, Algorithm = 4 };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace airshed
