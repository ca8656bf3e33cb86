#include "pentestxx/advisor/advice.hpp"

#include "pentestxx/common/json_schema.hpp"
#include "pentestxx/common/strings.hpp"

namespace pentestxx::advisor {

using nlohmann::json;

const char* to_string(Purpose p) {
  switch (p) {
    case Purpose::analyze_artifact: return "analyze_artifact";
    case Purpose::suggest_exploit: return "suggest_exploit";
    case Purpose::generate_report: return "generate_report";
  }
  return "analyze_artifact";
}

const char* to_string(FindingKind k) {
  switch (k) {
    case FindingKind::hash: return "hash";
    case FindingKind::credential: return "credential";
    case FindingKind::identifier: return "identifier";
    case FindingKind::sql_statement: return "sql_statement";
    case FindingKind::vulnerability: return "vulnerability";
    case FindingKind::username: return "username";
  }
  return "vulnerability";
}

std::optional<FindingKind> finding_kind_from_string(std::string_view s) {
  for (auto k : {FindingKind::hash, FindingKind::credential, FindingKind::identifier, FindingKind::sql_statement,
                 FindingKind::vulnerability, FindingKind::username}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

const json& advice_schema() {
  static const json schema = json::parse(R"({
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Advice",
    "type": "object",
    "required": ["findings", "recommended_actions"],
    "properties": {
      "findings": {
        "type": "array",
        "items": {
          "type": "object",
          "required": ["kind", "value"],
          "properties": {
            "kind": {"type": "string", "description": "hash | credential | identifier | sql_statement | vulnerability | username"},
            "value": {"type": "string"},
            "note": {"type": "string"}
          }
        }
      },
      "recommended_actions": {"type": "array", "items": {"type": "string"}}
    }
  })");
  return schema;
}

json to_json(const Advice& advice) {
  json findings = json::array();
  for (const auto& f : advice.findings) {
    findings.push_back({{"kind", to_string(f.kind)}, {"value", f.value}, {"note", f.note}});
  }
  return {{"findings", findings}, {"recommended_actions", advice.recommended_actions}};
}

std::string serialize(const Advice& advice) { return to_json(advice).dump(); }

namespace {

// Models often wrap JSON in a fenced block; accept the first one if present.
std::string_view strip_fence(std::string_view text) {
  auto open = text.find("```");
  if (open == std::string_view::npos) return text;
  auto body_start = text.find('\n', open);
  if (body_start == std::string_view::npos) return text;
  auto close = text.find("```", body_start);
  if (close == std::string_view::npos) return text;
  return text.substr(body_start + 1, close - body_start - 1);
}

}  // namespace

Advice parse_advice(std::string_view text) {
  Advice advice;
  advice.raw = std::string(text);
  json doc = json::parse(strip_fence(text), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    advice.diagnostics.push_back("advisor reply is not JSON; findings discarded");
    return advice;
  }
  if (auto errors = validate_json(doc, advice_schema()); !errors.empty()) {
    advice.diagnostics.push_back("advisor reply violates the advice schema: " + errors.front());
    return advice;
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "findings" && key != "recommended_actions") advice.diagnostics.push_back("ignored unknown field '" + key + "'");
  }
  for (const auto& f : doc["findings"]) {
    AdviceFinding finding;
    finding.value = f["value"].get<std::string>();
    finding.note = f.value("note", "");
    const auto kind_text = f["kind"].get<std::string>();
    if (auto kind = finding_kind_from_string(kind_text)) {
      finding.kind = *kind;
    } else {
      finding.kind = FindingKind::vulnerability;
      std::string annotation = "unrecognized kind '" + kind_text + "'";
      finding.note = finding.note.empty() ? annotation : finding.note + " (" + annotation + ")";
    }
    advice.findings.push_back(std::move(finding));
  }
  for (const auto& a : doc["recommended_actions"]) advice.recommended_actions.push_back(a.get<std::string>());
  return advice;
}

}  // namespace pentestxx::advisor
