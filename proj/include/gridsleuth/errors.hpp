#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridsleuth {

enum class ErrorCode {
  // topology construction
  ParseError,
  InvalidSpec,
  DuplicateId,
  SelfLoop,
  ParallelEdge,
  DanglingEndpoint,
  NonRadialNormalState,
  BreakerNotAtSource,
  // matrix / vector shape
  DimensionMismatch,
  NotABreaker,
  // metering
  UnknownNode,
  InvalidSwitchVector,
  UnknownFrtu,
  ZeroAggregateWithNonzeroReports,
  // planner
  InfeasibleIsolation,
  InfeasiblePlan,
  OracleInconsistent,
  // customer analytics
  CountOutOfRange,
  ProbabilityOutOfRange,
  EmptyHistory,
  MeterNotOnNode,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gridsleuth
