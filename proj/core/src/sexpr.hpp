#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "safeplan/error.hpp"

namespace safeplan::detail {

/// A parsed s-expression node: either an atom (symbol/number) or a list.
struct SExpr {
  bool is_list = false;
  std::string text;  // atom text, verbatim
  std::vector<SExpr> items;
  SourceSpan span;

  bool is_atom() const { return !is_list; }
  bool is_symbol(std::string_view lowercase) const;
  /// Lowercased atom text; empty for lists.
  std::string lower() const;
  /// Keyword head of a list such as "and", ":action"; empty otherwise.
  std::string head() const;
};

/// Parses every top-level expression in `text`. ';' starts a line comment.
std::vector<SExpr> parse_sexprs(std::string_view text, const std::string& file);

[[noreturn]] void fail(ErrorCode code, const std::string& message, const SourceSpan& span);

} // namespace safeplan::detail
