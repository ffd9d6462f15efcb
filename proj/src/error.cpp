#include "dirac/error.hpp"

namespace dirac {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::PacketTooWideForGrid: return "packet-too-wide-for-grid";
    case ErrorKind::SizeGuardExceeded: return "size-guard-exceeded";
    case ErrorKind::SupportOverflow: return "support-overflow";
    case ErrorKind::Config: return "config-error";
    case ErrorKind::FieldNotNormalized: return "field-not-normalized";
    case ErrorKind::DegenerateMode: return "degenerate-mode";
    case ErrorKind::SingularSample: return "singular-sample";
    case ErrorKind::InsufficientQuadrature: return "insufficient-quadrature";
    case ErrorKind::ZeroFrequency: return "zero-frequency";
    case ErrorKind::ApproximationDomain: return "approximation-domain";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::NormBlowup: return "norm-blowup";
    case ErrorKind::BoundaryLeak: return "boundary-leak";
    case ErrorKind::ZeroFunctional: return "zero-functional";
    case ErrorKind::UnnormalizedInput: return "unnormalized-input";
    case ErrorKind::OverflowGuard: return "overflow-guard";
    case ErrorKind::SampleFailures: return "sample-failures";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::DegenerateData: return "degenerate-data";
    case ErrorKind::ZeroVariance: return "zero-variance";
  }
  return "unknown";
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSpec:
    case ErrorKind::InvalidGrid:
    case ErrorKind::LengthMismatch:
    case ErrorKind::PacketTooWideForGrid:
    case ErrorKind::SizeGuardExceeded:
    case ErrorKind::SupportOverflow:
    case ErrorKind::Config:
      return kExitConfig;
    case ErrorKind::NonConvergence:
    case ErrorKind::DegenerateData:
    case ErrorKind::ZeroVariance:
      return kExitFit;
    default:
      return kExitNumeric;
  }
}

}  // namespace dirac
