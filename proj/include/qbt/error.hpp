#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qbt {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  Singular,
  NotSquare,
  EmptySequence,
  DimensionMismatch,
  DegenerateKernel,
  NotSelfAdjoint,
  LambdaInSpectrum,
  SingularWeyl,
  SingularRobinToNeumann,
  SingularInverse,
  DepthExceeded,
  StencilHitsSpectrum,
  EllipticityViolated,
  DegenerateGrid,
  TooFewValues,
  NonFinite,
  ConfigError,
  UsageError,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as this exception; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qbt
