#pragma once

#include <stdexcept>
#include <string>

namespace rocketopt {

enum class ErrorKind {
  kInvalidInput,
  kEulerSingularity,
  kNumeric,
  kSingularConstruction,
  kInfeasibleOcp0,
  kAngleExtraction,
  kDegenerateTarget,
  kDivisionGuard,
  kOnSwitchingSurface,
  kSingularDenominator,
  kChatteringSuspected,
  kIntegrationFailure,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the extremal integrator when the step size collapses, which is
/// what an accumulation of switchings looks like from inside an explicit
/// scheme. `accumulation_time` is where the steps piled up.
class ChatteringError : public Error {
 public:
  ChatteringError(double accumulation_time, const std::string& what)
      : Error(ErrorKind::kChatteringSuspected, what),
        accumulation_time_(accumulation_time) {}

  double accumulation_time() const noexcept { return accumulation_time_; }

 private:
  double accumulation_time_;
};

}  // namespace rocketopt
