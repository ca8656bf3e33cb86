#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pentestxx::advisor {

enum class Purpose { analyze_artifact, suggest_exploit, generate_report };
enum class FindingKind { hash, credential, identifier, sql_statement, vulnerability, username };

const char* to_string(Purpose p);
const char* to_string(FindingKind k);
std::optional<FindingKind> finding_kind_from_string(std::string_view s);

/// Target and attacker addresses are mandatory for every purpose.
struct PromptContext {
  std::string target_ip;
  std::string attacker_ip;
  std::string phase;
};

struct PromptEnvelope {
  Purpose purpose = Purpose::analyze_artifact;
  std::string artifact_name;
  std::map<std::string, std::string> metadata;  // target_ip, attacker_ip, phase
  std::string instructions;                     // system text, schema embedded
  std::string body;                             // artifact or log content
};

struct AdviceFinding {
  FindingKind kind = FindingKind::vulnerability;
  std::string value;
  std::string note;

  friend bool operator==(const AdviceFinding&, const AdviceFinding&) = default;
};

struct Advice {
  std::vector<AdviceFinding> findings;
  std::vector<std::string> recommended_actions;
  std::string raw;
  std::vector<std::string> diagnostics;
};

/// JSON Schema every advisor reply must satisfy. Embedded verbatim in prompts.
const nlohmann::json& advice_schema();

nlohmann::json to_json(const Advice& advice);
std::string serialize(const Advice& advice);

/// Never throws. Replies that are not schema-valid JSON yield empty findings,
/// the raw text, and a diagnostic. Unknown finding kinds are kept as
/// vulnerability with an annotated note.
Advice parse_advice(std::string_view text);

}  // namespace pentestxx::advisor
