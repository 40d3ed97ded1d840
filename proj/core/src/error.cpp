#include "safeplan/error.hpp"

namespace safeplan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::UnknownSchema: return "UnknownSchema";
    case ErrorCode::ReservedFluentDeclared: return "ReservedFluentDeclared";
    case ErrorCode::UnknownSchemaInRule: return "UnknownSchemaInRule";
    case ErrorCode::BindingArityMismatch: return "BindingArityMismatch";
    case ErrorCode::InvalidDelta: return "InvalidDelta";
    case ErrorCode::AlreadyCompiled: return "AlreadyCompiled";
    case ErrorCode::DuplicateSymbol: return "DuplicateSymbol";
    case ErrorCode::TypeCycle: return "TypeCycle";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NumericOverflow: return "NumericOverflow";
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::DuplicateRecord: return "DuplicateRecord";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateX: return "DegenerateX";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DenominatorSlopeNearZero: return "DenominatorSlopeNearZero";
    case ErrorCode::ZeroPooledVariance: return "ZeroPooledVariance";
    case ErrorCode::MissingRecord: return "MissingRecord";
    case ErrorCode::VocabularyCollision: return "VocabularyCollision";
    case ErrorCode::InvalidNoiseLevel: return "InvalidNoiseLevel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ProviderTimeout: return "ProviderTimeout";
    case ErrorCode::ProviderHttpError: return "ProviderHttpError";
    case ErrorCode::MissingPlanFile: return "MissingPlanFile";
    case ErrorCode::PromptAuditFailed: return "PromptAuditFailed";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

std::string SourceSpan::to_string() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  out += ":" + std::to_string(line) + ":" + std::to_string(column_begin);
  if (column_end > column_begin + 1) out += "-" + std::to_string(column_end - 1);
  return out;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, SourceSpan span)
    : std::runtime_error(span.to_string() + ": " + std::string(to_string(code)) + ": " + message),
      code_(code),
      span_(std::move(span)) {}

} // namespace safeplan
