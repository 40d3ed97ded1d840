#include "json_util.hpp"
#include "safeplan/bundle.hpp"
#include "safeplan/identifier.hpp"
#include "safeplan/pddl.hpp"

namespace safeplan {

using nlohmann::json;

DangerSpec parse_danger_spec(std::string_view json_text, const Domain& domain, const std::string& file) {
  json doc = detail::parse_json(json_text, file);
  if (!doc.is_object()) detail::json_fail(ErrorCode::SyntaxError, "danger spec must be a JSON object", file);
  for (const auto& [key, _] : doc.items()) {
    if (key != "rules" && key != "d_init" && key != "d_max") {
      detail::json_fail(ErrorCode::SyntaxError, "unexpected key '" + key + "'", file);
    }
  }
  DangerSpec spec;
  auto integer = [&](const char* key) -> std::int64_t {
    if (!doc.contains(key)) return 0;
    const auto& v = doc.at(key);
    if (!v.is_number_integer()) detail::json_fail(ErrorCode::SyntaxError, std::string(key) + " must be an integer", file);
    return v.get<std::int64_t>();
  };
  spec.d_init = integer("d_init");
  spec.d_max = integer("d_max");
  if (!doc.contains("rules")) return spec;
  const auto& rules = doc.at("rules");
  if (!rules.is_array()) detail::json_fail(ErrorCode::SyntaxError, "'rules' must be an array", file);

  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& rule = rules[r];
    std::string where = file + " rule " + std::to_string(r);
    if (!rule.is_object() || !rule.contains("action") || !rule.at("action").is_string()) {
      detail::json_fail(ErrorCode::SyntaxError, where + ": expected {\"action\": str, ...}", file);
    }
    DangerRule out;
    out.action = canonical_identifier(rule.at("action").get<std::string>());
    auto schema_id = domain.find_action(out.action);
    if (!schema_id) {
      detail::json_fail(ErrorCode::UnknownSymbol, where + ": unknown action '" + rule.at("action").get<std::string>() + "'", file);
    }
    const auto& schema = domain.actions()[*schema_id];

    if (rule.contains("binding")) {
      const auto& binding = rule.at("binding");
      if (!binding.is_array()) detail::json_fail(ErrorCode::SyntaxError, where + ": binding must be an array", file);
      for (const auto& b : binding) {
        if (!b.is_string()) detail::json_fail(ErrorCode::SyntaxError, where + ": binding entries are strings", file);
        auto text = b.get<std::string>();
        if (text == "*") {
          out.binding.emplace_back(std::nullopt);
        } else {
          if (!domain.find_object(text)) {
            detail::json_fail(ErrorCode::UnknownSymbol, where + ": unknown object '" + text + "'", file);
          }
          out.binding.emplace_back(canonical_identifier(text));
        }
      }
    } else {
      out.binding.assign(schema.params.size(), std::nullopt);
    }
    if (out.binding.size() != schema.params.size()) {
      detail::json_fail(ErrorCode::BindingArityMismatch,
                        where + ": binding has " + std::to_string(out.binding.size()) +
                            " entries, action has " + std::to_string(schema.params.size()) + " parameters",
                        file);
    }
    if (rule.contains("condition")) {
      if (!rule.at("condition").is_string()) detail::json_fail(ErrorCode::SyntaxError, where + ": condition must be a string", file);
      out.condition = parse_condition_pddl(rule.at("condition").get<std::string>(), domain, schema.params,
                                           file + " rule " + std::to_string(r) + " condition");
    }
    if (!rule.contains("delta") || !rule.at("delta").is_number_integer()) {
      detail::json_fail(ErrorCode::SyntaxError, where + ": delta must be an integer", file);
    }
    out.delta = rule.at("delta").get<std::int64_t>();
    if (out.delta == 0) detail::json_fail(ErrorCode::InvalidDelta, where + ": delta must be nonzero", file);
    spec.rules.push_back(std::move(out));
  }
  return spec;
}

std::string render_danger_spec(const DangerSpec& spec, const Domain& domain) {
  json rules = json::array();
  for (const auto& rule : spec.rules) {
    json binding = json::array();
    for (const auto& b : rule.binding) binding.push_back(b ? *b : std::string("*"));
    const auto& schema = domain.actions().at(domain.find_action(rule.action).value());
    std::string condition = rule.condition.empty()
                                ? std::string("(and)")
                                : render_condition_pddl(domain, rule.condition, schema.params);
    rules.push_back(json{{"action", rule.action}, {"binding", binding}, {"condition", condition}, {"delta", rule.delta}});
  }
  json doc{{"rules", rules}, {"d_init", spec.d_init}, {"d_max", spec.d_max}};
  return doc.dump(2) + "\n";
}

} // namespace safeplan
