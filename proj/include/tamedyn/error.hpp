#pragma once

#include <stdexcept>
#include <string>

namespace tamedyn {

enum class ErrorCode {
  DivisionByZero,
  PrecisionExhausted,
  RootUnavailable,
  PreconditionViolated,
  TypeIPoint,
  InvalidMarks,
  NotTame,
  NotInBasin,
  BudgetExhausted,
  NotOutsideBaseDisk,
  NotComparable,
  NotOnTree,
  HypothesisViolated,
  ContractionFailed,
  MaxIterExceeded,
  OrderInsufficient,
  WellDefinednessFailure,
  InputError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code), detail_(detail) {}
  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace tamedyn
