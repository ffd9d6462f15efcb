#pragma once

#include <stdexcept>
#include <string>

namespace dirac {

enum class ErrorKind {
  // configuration / input validation
  InvalidSpec,
  InvalidGrid,
  LengthMismatch,
  PacketTooWideForGrid,
  SizeGuardExceeded,
  SupportOverflow,
  Config,
  // numerical failures
  FieldNotNormalized,
  DegenerateMode,
  SingularSample,
  InsufficientQuadrature,
  ZeroFrequency,
  ApproximationDomain,
  NotApplicable,
  NormBlowup,
  BoundaryLeak,
  ZeroFunctional,
  UnnormalizedInput,
  OverflowGuard,
  SampleFailures,
  // fitting
  NonConvergence,
  DegenerateData,
  ZeroVariance,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit codes used by the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitFit = 4;

int exit_code_for(ErrorKind kind) noexcept;

}  // namespace dirac
