#include "sexpr.hpp"

#include <cctype>

namespace safeplan::detail {

bool SExpr::is_symbol(std::string_view lowercase) const {
  return !is_list && lower() == lowercase;
}

std::string SExpr::lower() const {
  if (is_list) return {};
  std::string out = text;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string SExpr::head() const {
  if (!is_list || items.empty() || items.front().is_list) return {};
  return items.front().lower();
}

void fail(ErrorCode code, const std::string& message, const SourceSpan& span) {
  throw Error(code, message, span);
}

namespace {

class Reader {
 public:
  Reader(std::string_view text, const std::string& file) : text_(text), file_(file) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  SourceSpan here(std::size_t width = 1) const {
    return SourceSpan{file_, line_, column_, column_ + width};
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    char c = text_[pos_];
    if (c == ')') fail(ErrorCode::SyntaxError, "unexpected ')'", here());
    if (c == '(') {
      SExpr list;
      list.is_list = true;
      list.span = here();
      advance();
      skip_space();
      while (true) {
        if (pos_ >= text_.size()) {
          fail(ErrorCode::SyntaxError, "unterminated '(' opened here", list.span);
        }
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        list.items.push_back(read());
        skip_space();
      }
      if (list.span.line == line_) list.span.column_end = column_;
      return list;
    }
    SExpr atom;
    atom.span = here();
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      advance();
    }
    atom.text = std::string(text_.substr(start, pos_ - start));
    atom.span.column_end = atom.span.column_begin + atom.text.size();
    return atom;
  }

  std::string_view text_;
  const std::string& file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

} // namespace

std::vector<SExpr> parse_sexprs(std::string_view text, const std::string& file) {
  return Reader(text, file).read_all();
}

} // namespace safeplan::detail
