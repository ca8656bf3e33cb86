#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pentestxx/engine/findings.hpp"

namespace pentestxx::advisor {
class Advisor;
}

namespace pentestxx::report {

inline constexpr std::string_view kSchemaVersion = "1.0";

inline constexpr std::array<std::string_view, 8> kSectionTitles{
    "Executive Summary", "Objectives and Scope", "Methodology",  "Findings and Vulnerabilities",
    "Risk Rating",       "Recommendations",      "Conclusions", "Appendices",
};

struct ReportMetadata {
  std::string target_ip;
  std::string attacker_ip;
  std::string date;    // YYYY-MM-DD
  std::string author;
  std::string period;  // free text, e.g. "2024-11-20 to 2024-11-21"
  std::string scope;   // CIDR

  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct Section {
  std::string title;
  std::string body;

  friend bool operator==(const Section&, const Section&) = default;
};

enum class RiskLevel { High, Medium, Low };

const char* to_string(RiskLevel l);
std::optional<RiskLevel> risk_level_from_string(std::string_view s);

struct RiskEntry {
  std::size_t finding_ref = 0;  // index into ReportDocument::findings
  RiskLevel level = RiskLevel::Low;
  std::string rationale;

  friend bool operator==(const RiskEntry&, const RiskEntry&) = default;
};

/// A finding as the report presents it.
struct ReportFinding {
  std::string kind;
  std::string target_ip;
  std::string summary;
  nlohmann::json value;

  friend bool operator==(const ReportFinding&, const ReportFinding&) = default;
};

struct ReportDocument {
  ReportMetadata metadata;
  std::vector<Section> sections;
  std::vector<RiskEntry> risk_ratings;
  std::vector<ReportFinding> findings;
  std::string prose_source = "template";  // or "advisor"

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

struct RawOutput {
  std::string title;  // e.g. the command line
  std::string text;
};

struct ReportInput {
  ReportMetadata metadata;
  std::vector<engine::Finding> findings;
  std::vector<RawOutput> raw_outputs;
  std::vector<std::string> notes;  // skipped steps, exhausted strategies
};

/// Rule table: shell_access, credential -> High; vulnerability, hash,
/// export, artifact_file -> Medium; directory, port, live_host, username -> Low.
RiskLevel risk_level(engine::FindingKind kind);
RiskEntry rate_risk(const engine::Finding& f, std::size_t index);

/// One line describing the finding.
std::string summarize(const engine::Finding& f);

/// Deterministic template report. When an advisor is given and returns prose
/// for all eight sections, those bodies replace the template text; anything
/// else falls back to the template.
ReportDocument assemble_report(const ReportInput& input, advisor::Advisor* advisor = nullptr);

/// Same as assemble_report, with operator notes folded into the Conclusions
/// and handed to the advisor.
ReportDocument regenerate_report(const ReportInput& input, std::string_view notes,
                                 advisor::Advisor* advisor = nullptr);

std::string emit_text(const ReportDocument& r);
std::string emit_json(const ReportDocument& r);
nlohmann::json to_json(const ReportDocument& r);

/// Inverse of emit_json. Throws Error(parse_error).
ReportDocument parse_report_json(std::string_view text);

/// The shipped report schema (schema/report.schema.json).
const nlohmann::json& report_schema();

}  // namespace pentestxx::report
