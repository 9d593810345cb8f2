#include "ergode/errors.hpp"

namespace ergode {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyStateSpace: return "EmptyStateSpace";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::RowSumError: return "RowSumError";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::BadChainFile: return "BadChainFile";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionGuard: return "DimensionGuard";
    case ErrorCode::MissingMeanReturnTime: return "MissingMeanReturnTime";
  }
  return "UnknownError";
}

}  // namespace ergode
