#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kauri {

enum class ErrorCode {
  NonFiniteInput,
  NegativeInputForChi2,
  NonPositiveGamma,
  IndexOutOfRange,
  EmptyClusterInUse,
  WouldEmptySourceCluster,
  ClusterBudgetExceeded,
  SameCluster,
  NoValidThreshold,
  ConfigInvalid,
  DimensionMismatch,
  SchemaViolation,
  KTooLarge,
  LengthMismatch,
  NonPositiveReference,
  ParseError,
  EmptyAfterDropping,
  IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kauri
