#include "inar/error.hpp"

namespace inar {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyImage: return "EmptyImage";
        case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorCode::BadWeights: return "BadWeights";
        case ErrorCode::BadBoundaries: return "BadBoundaries";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::EmptyTier: return "EmptyTier";
        case ErrorCode::InvalidProfile: return "InvalidProfile";
        case ErrorCode::UnknownModel: return "UnknownModel";
        case ErrorCode::EmptyCandidates: return "EmptyCandidates";
        case ErrorCode::NoEdgeCandidate: return "NoEdgeCandidate";
        case ErrorCode::NoRecords: return "NoRecords";
        case ErrorCode::ConstraintViolation: return "ConstraintViolation";
        case ErrorCode::InsufficientCoverage: return "InsufficientCoverage";
        case ErrorCode::TargetUnreachable: return "TargetUnreachable";
        case ErrorCode::UnfrozenBundle: return "UnfrozenBundle";
        case ErrorCode::MissingOutcome: return "MissingOutcome";
        case ErrorCode::BadSpec: return "BadSpec";
        case ErrorCode::ShortTrace: return "ShortTrace";
        case ErrorCode::BadTrace: return "BadTrace";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::PartialCoverage: return "PartialCoverage";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace inar
