#include "kauri/errors.hpp"

namespace kauri {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NegativeInputForChi2: return "NegativeInputForChi2";
    case ErrorCode::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyClusterInUse: return "EmptyClusterInUse";
    case ErrorCode::WouldEmptySourceCluster: return "WouldEmptySourceCluster";
    case ErrorCode::ClusterBudgetExceeded: return "ClusterBudgetExceeded";
    case ErrorCode::SameCluster: return "SameCluster";
    case ErrorCode::NoValidThreshold: return "NoValidThreshold";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonPositiveReference: return "NonPositiveReference";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyAfterDropping: return "EmptyAfterDropping";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace kauri
