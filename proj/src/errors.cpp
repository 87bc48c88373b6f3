#include "rocketopt/errors.hpp"

namespace rocketopt {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kEulerSingularity: return "euler-singularity";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kSingularConstruction: return "singular-construction";
    case ErrorKind::kInfeasibleOcp0: return "infeasible-ocp0";
    case ErrorKind::kAngleExtraction: return "angle-extraction";
    case ErrorKind::kDegenerateTarget: return "degenerate-target";
    case ErrorKind::kDivisionGuard: return "division-guard";
    case ErrorKind::kOnSwitchingSurface: return "on-switching-surface";
    case ErrorKind::kSingularDenominator: return "singular-denominator";
    case ErrorKind::kChatteringSuspected: return "chattering-suspected";
    case ErrorKind::kIntegrationFailure: return "integration-failure";
  }
  return "unknown";
}

}  // namespace rocketopt
