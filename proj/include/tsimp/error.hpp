#pragma once

#include <stdexcept>
#include <string>

namespace tsimp {

// Usage-level errors (bad arguments, unknown names) vs. data-level errors
// (malformed files, inconsistent series). The CLI maps them to exit codes
// 1 and 2 respectively.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonDivisorPeriod : DataError {
  using DataError::DataError;
};
struct PeriodExceedsLength : DataError {
  using DataError::DataError;
};
struct PreexistingMissing : DataError {
  using DataError::DataError;
};
struct RateOutOfRange : DataError {
  using DataError::DataError;
};
struct AllMissing : DataError {
  using DataError::DataError;
};
struct SingleColumn : DataError {
  using DataError::DataError;
};
struct MissingPeriod : DataError {
  using DataError::DataError;
};
struct EmptyTrainingSet : DataError {
  using DataError::DataError;
};
struct DimensionMismatch : DataError {
  using DataError::DataError;
};
struct SingleClass : DataError {
  using DataError::DataError;
};
struct MulticlassUnsupported : DataError {
  using DataError::DataError;
};
struct KTooLarge : DataError {
  using DataError::DataError;
};
struct ClassTooSmall : DataError {
  using DataError::DataError;
};
struct EmptyMask : DataError {
  using DataError::DataError;
};
struct ShapeMismatch : DataError {
  using DataError::DataError;
};
struct LengthMismatch : DataError {
  using DataError::DataError;
};
struct MissingFile : DataError {
  using DataError::DataError;
};
struct MalformedCsv : DataError {
  using DataError::DataError;
};
struct NonFiniteValue : DataError {
  using DataError::DataError;
};
struct InconsistentChannelCount : DataError {
  using DataError::DataError;
};
struct IoError : DataError {
  using DataError::DataError;
};

}  // namespace tsimp
