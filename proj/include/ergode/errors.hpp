#pragma once

#include <stdexcept>
#include <string>

namespace ergode {

// Every contract failure in the library carries one of these codes so callers
// (and the CLI exit-code mapping) can react without parsing messages.
enum class ErrorCode {
  EmptyStateSpace,
  UnknownLabel,
  NegativeProbability,
  RowSumError,
  NonFiniteValue,
  BadChainFile,
  UnknownFamily,
  ParamOutOfRange,
  SingularSystem,
  NoConvergence,
  DimensionGuard,
  MissingMeanReturnTime,
};

const char* to_string(ErrorCode code);

class ErgodeError : public std::runtime_error {
 public:
  ErgodeError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw ErgodeError(code, message);
}

}  // namespace ergode
