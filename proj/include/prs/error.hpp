#pragma once

#include <stdexcept>
#include <string>

namespace prs {

enum class ErrorCode {
  // geometry
  ZeroVector,
  ConflictingTags,
  // convex sets
  DimensionMismatch,
  EmptyRegion,
  UnboundedObject,
  UnboundedDirection,
  UnboundedRegion,
  // language
  Lex,
  Parse,
  DuplicateClass,
  DuplicateProperty,
  DuplicateVariable,
  UnknownClass,
  UnknownVariable,
  MultipleOrientationSpecifiers,
  // resolution
  CyclicDependency,
  EmptyCombinedRegion,
  IncompatibleCarriers,
  ConstantViolatesConstraint,
  TypeMismatch,
  // scene generation
  RetriesExhausted,
  BudgetExhausted,
  SpecSceneMismatch,
  // tooling
  Io,
};

const char* error_code_name(ErrorCode code);

// Single exception type for every failure mode; the code decides how callers
// (and the command-line tool's exit status) react. line/col are 1-based and
// zero when there is no source location.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int line = 0, int col = 0);

  ErrorCode code() const { return code_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  ErrorCode code_;
  int line_;
  int col_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message, int line = 0,
                       int col = 0);

}  // namespace prs
