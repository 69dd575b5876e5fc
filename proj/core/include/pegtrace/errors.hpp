#ifndef PEGTRACE_ERRORS_HPP
#define PEGTRACE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pegtrace {

enum class ErrorCode {
  // polygon validation
  TooFewVertices,
  ZeroLengthEdge,
  CollinearRun,
  SelfIntersecting,
  NotOnBoundary,
  // charts
  AllParallelToL4,
  DegenerateChart,
  OffHyperplane,
  SingularPoint,
  // diameters
  AmbiguousTangency,
  TieBreakFailure,
  // tracing
  NoViableChart,
  DeadEnd,
  StepBudgetExhausted,
  CorrectorDivergence,
  UnmatchedTerminalDiameter,
  RepeatBoundViolated,
  TrickyDiameter,
  // shape / coincidence
  ClassMismatch,
  NotGracing,
  NotConverged,
  NotReallyDistinct,
  EdgeAssignmentChanged,
  // front end
  GenerationBudgetExceeded,
  InputError,
};

const char* error_code_name(ErrorCode code);

class PegError : public std::runtime_error {
 public:
  PegError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pegtrace

#endif
