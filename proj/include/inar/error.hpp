#pragma once

#include <stdexcept>
#include <string>

namespace inar {

enum class ErrorCode {
    // features
    EmptyImage,
    UnsupportedFormat,
    BadWeights,
    BadBoundaries,
    // model pool
    DuplicateId,
    BudgetExceeded,
    EmptyTier,
    InvalidProfile,
    UnknownModel,
    // router
    EmptyCandidates,
    NoEdgeCandidate,
    // calibration
    NoRecords,
    ConstraintViolation,
    InsufficientCoverage,
    TargetUnreachable,
    UnfrozenBundle,
    // strategies / simulator
    MissingOutcome,
    BadSpec,
    ShortTrace,
    BadTrace,
    // bench / io
    SchemaMismatch,
    PartialCoverage,
    ParseError,
    IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure the library reports carries one of the codes above. The CLI
/// maps IoError to exit status 2 and everything else to 1.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    bool is_io() const noexcept { return code_ == ErrorCode::IoError; }

private:
    ErrorCode code_;
};

}  // namespace inar
