#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace safeplan {

enum class ErrorCode {
  // domain model
  ArityMismatch,
  TypeMismatch,
  UnknownSchema,
  ReservedFluentDeclared,
  UnknownSchemaInRule,
  BindingArityMismatch,
  InvalidDelta,
  AlreadyCompiled,
  DuplicateSymbol,
  TypeCycle,
  // parser
  SyntaxError,
  UnsupportedConstruct,
  UnknownSymbol,
  // executor
  PreconditionViolated,
  NumericOverflow,
  // planner
  Unsolvable,
  LimitExceeded,
  // metrics / analysis
  DuplicateRecord,
  EmptyInput,
  DegenerateX,
  TooFewPoints,
  DenominatorSlopeNearZero,
  ZeroPooledVariance,
  MissingRecord,
  // noise
  VocabularyCollision,
  InvalidNoiseLevel,
  // io / runner
  IoError,
  ProviderTimeout,
  ProviderHttpError,
  MissingPlanFile,
  PromptAuditFailed,
  InvalidArgument,
  Internal,
};

std::string_view to_string(ErrorCode code);

/// Location of a diagnostic inside an input file. Columns are 1-based and
/// half-open: [column_begin, column_end).
struct SourceSpan {
  std::string file;
  std::size_t line = 0;
  std::size_t column_begin = 0;
  std::size_t column_end = 0;

  std::string to_string() const;
  bool operator==(const SourceSpan&) const = default;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, SourceSpan span);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<SourceSpan>& span() const noexcept { return span_; }

 private:
  ErrorCode code_;
  std::optional<SourceSpan> span_;
};

} // namespace safeplan
