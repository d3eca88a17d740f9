#include "qbt/error.hpp"

namespace qbt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateKernel: return "DegenerateKernel";
    case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorCode::LambdaInSpectrum: return "LambdaInSpectrum";
    case ErrorCode::SingularWeyl: return "SingularWeyl";
    case ErrorCode::SingularRobinToNeumann: return "SingularRobinToNeumann";
    case ErrorCode::SingularInverse: return "SingularInverse";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::StencilHitsSpectrum: return "StencilHitsSpectrum";
    case ErrorCode::EllipticityViolated: return "EllipticityViolated";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::TooFewValues: return "TooFewValues";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace qbt
