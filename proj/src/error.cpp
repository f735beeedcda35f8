#include "prs/error.hpp"

namespace prs {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ConflictingTags: return "ConflictingTags";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::UnboundedObject: return "UnboundedObject";
    case ErrorCode::UnboundedDirection: return "UnboundedDirection";
    case ErrorCode::UnboundedRegion: return "UnboundedRegion";
    case ErrorCode::Lex: return "LexError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::DuplicateClass: return "DuplicateClass";
    case ErrorCode::DuplicateProperty: return "DuplicateProperty";
    case ErrorCode::DuplicateVariable: return "DuplicateVariable";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::MultipleOrientationSpecifiers:
      return "MultipleOrientationSpecifiers";
    case ErrorCode::CyclicDependency: return "CyclicDependency";
    case ErrorCode::EmptyCombinedRegion: return "EmptyCombinedRegion";
    case ErrorCode::IncompatibleCarriers: return "IncompatibleCarriers";
    case ErrorCode::ConstantViolatesConstraint:
      return "ConstantViolatesConstraint";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::RetriesExhausted: return "RetriesExhausted";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::SpecSceneMismatch: return "SpecSceneMismatch";
    case ErrorCode::Io: return "IoError";
  }
  return "Error";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message, int line,
                           int col) {
  std::string out = error_code_name(code);
  if (line > 0) {
    out += " at line " + std::to_string(line);
    if (col > 0) out += ", col " + std::to_string(col);
  }
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, int line, int col)
    : std::runtime_error(format_message(code, message, line, col)),
      code_(code),
      line_(line),
      col_(col) {}

void fail(ErrorCode code, const std::string& message, int line, int col) {
  throw Error(code, message, line, col);
}

}  // namespace prs
