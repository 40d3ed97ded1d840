#include <cctype>

#include "safeplan/bundle.hpp"
#include "safeplan/error.hpp"
#include "safeplan/identifier.hpp"
#include "safeplan/plan.hpp"

namespace safeplan {

std::string_view to_string(StepStatus status) {
  switch (status) {
    case StepStatus::Resolved: return "resolved";
    case StepStatus::UnknownAction: return "unknown_action";
    case StepStatus::Malformed: return "malformed";
  }
  return "malformed";
}

std::size_t Plan::count(StepStatus status) const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.status == status;
  return n;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_words(std::string_view s, bool commas) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_space(c) || (commas && c == ',')) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Removes list markers, markdown emphasis, trailing comments and punctuation.
std::string_view strip_decorations(std::string_view s) {
  s = trim(s);
  if (auto semi = s.find(';'); semi != std::string_view::npos) s = trim(s.substr(0, semi));
  // "Step 3:" / "step 3."
  if (s.size() > 4 && (s[0] == 'S' || s[0] == 's') && (s.substr(1, 3) == "tep" || s.substr(1, 3) == "TEP")) {
    std::size_t i = 4;
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t digits = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i > digits && i < s.size() && (s[i] == ':' || s[i] == '.' || s[i] == ')')) s = trim(s.substr(i + 1));
  }
  // "1." / "2)" / "3:"
  {
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')' || s[i] == ':') &&
        (i + 1 == s.size() || is_space(s[i + 1]) || s[i + 1] == '(' || std::isalpha(static_cast<unsigned char>(s[i + 1])))) {
      s = trim(s.substr(i + 1));
    }
  }
  // "- " / "* " / "+ " bullets
  if (s.size() > 1 && (s[0] == '-' || s[0] == '*' || s[0] == '+') && is_space(s[1])) s = trim(s.substr(2));
  // `code` / **bold**, with trailing punctuation inside or outside
  for (bool changed = true; changed;) {
    changed = false;
    while (!s.empty() && (s.back() == ',' || s.back() == '.')) {
      s = trim(s.substr(0, s.size() - 1));
      changed = true;
    }
    if (s.size() >= 2 && ((s.front() == '`' && s.back() == '`') || (s.front() == '*' && s.back() == '*'))) {
      s = trim(s.substr(1, s.size() - 2));
      changed = true;
    }
  }
  return s;
}

struct Candidate {
  std::string name;
  std::vector<std::string> args;
  bool broken = false;  // recognisable call with unbalanced/nested parentheses
};

std::optional<Candidate> match_forms(std::string_view s, const Domain& domain) {
  if (s.empty()) return std::nullopt;
  // (action a b)
  if (s.front() == '(') {
    if (s.back() != ')') return std::nullopt;
    auto inner = trim(s.substr(1, s.size() - 2));
    if (inner.find_first_of("()") != std::string_view::npos) return std::nullopt;
    auto words = split_words(inner, false);
    if (words.empty() || !is_identifier(words.front())) return std::nullopt;
    Candidate c{words.front(), {words.begin() + 1, words.end()}};
    return c;
  }
  std::size_t i = 0;
  while (i < s.size() && is_word_char(s[i])) ++i;
  std::string_view name = s.substr(0, i);
  if (!is_identifier(name)) return std::nullopt;
  std::size_t j = i;
  while (j < s.size() && is_space(s[j])) ++j;
  // ACTION(a, b)
  if (j < s.size() && s[j] == '(') {
    auto close = s.find(')', j);
    bool known = domain.find_action(name).has_value();
    if (close == std::string_view::npos || close != s.size() - 1 ||
        s.substr(j + 1, close - j - 1).find('(') != std::string_view::npos) {
      if (known) return Candidate{std::string(name), {}, true};
      return std::nullopt;
    }
    auto inner = s.substr(j + 1, close - j - 1);
    return Candidate{std::string(name), split_words(inner, true)};
  }
  // action a b
  auto words = split_words(s, false);
  for (const auto& w : words) {
    for (char c : w) {
      if (!is_word_char(c)) return std::nullopt;
    }
  }
  const auto& first = words.front();
  bool known = domain.find_action(first).has_value();
  bool shaped = first.find_first_of("_-") != std::string::npos;
  bool upper = first.size() >= 2;
  for (char c : first) {
    if (std::islower(static_cast<unsigned char>(c))) upper = false;
  }
  if (!known && !shaped && !upper) return std::nullopt;
  return Candidate{first, {words.begin() + 1, words.end()}};
}

PlanStep resolve(const Candidate& c, const Domain& domain) {
  PlanStep step;
  auto schema = domain.find_action(c.name);
  if (!schema) {
    step.status = StepStatus::UnknownAction;
    step.diagnostic = "action '" + c.name + "' is not defined in the domain";
    return step;
  }
  if (c.broken) {
    step.status = StepStatus::Malformed;
    step.diagnostic = "unbalanced or nested parentheses";
    return step;
  }
  try {
    step.action = ground(domain, c.name, c.args);
    step.status = StepStatus::Resolved;
  } catch (const Error& e) {
    step.status = StepStatus::Malformed;
    step.diagnostic = e.what();
  }
  return step;
}

} // namespace

Plan parse_plan(std::string_view text, const Domain& domain) {
  Plan plan;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (trim(line).rfind("```", 0) == 0) {
      ++plan.ignored_lines;
    } else {
      auto body = strip_decorations(line);
      auto candidate = match_forms(body, domain);
      if (!candidate) {
        ++plan.ignored_lines;
      } else {
        PlanStep step = resolve(*candidate, domain);
        step.line = line_no;
        step.text = std::string(body);
        plan.steps.push_back(std::move(step));
      }
    }
    if (end == text.size()) break;
  }
  return plan;
}

Plan parse_plan(const RawPlanText& raw, const TaskBundle& bundle) {
  return parse_plan(raw.text, *bundle.basic.domain);
}

Plan make_plan(const Domain& domain, const std::vector<GroundAction>& actions) {
  Plan plan;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    PlanStep step;
    step.line = i + 1;
    step.status = StepStatus::Resolved;
    step.action = actions[i];
    step.text = format_action(domain, actions[i]);
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

std::string format_plan(const Domain& domain, const Plan& plan) {
  std::string out;
  for (const auto& step : plan.steps) {
    out += step.action ? format_action(domain, *step.action) : step.text;
    out += "\n";
  }
  return out;
}

} // namespace safeplan
