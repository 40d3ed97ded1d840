#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "safeplan/error.hpp"

namespace safeplan::detail {

/// Parses JSON, mapping parse errors to SyntaxError with a line/column span.
inline nlohmann::json parse_json(std::string_view text, const std::string& file) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::SyntaxError, e.what(), SourceSpan{file, line, column, column + 1});
  }
}

[[noreturn]] inline void json_fail(ErrorCode code, const std::string& message, const std::string& file) {
  throw Error(code, message, SourceSpan{file, 0, 0, 0});
}

} // namespace safeplan::detail
