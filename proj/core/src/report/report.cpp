#include "pentestxx/report/report.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "pentestxx/advisor/advisor.hpp"
#include "pentestxx/common/error.hpp"
#include "pentestxx/common/json_schema.hpp"
#include "pentestxx/common/strings.hpp"
#include "pentestxx/toolio/table.hpp"

namespace pentestxx::report {

namespace detail {
std::string_view embedded_schema();
}

using engine::Finding;
using engine::FindingKind;
using nlohmann::json;

namespace {

std::string str(const json& v, const char* key, std::string fallback = {}) {
  if (!v.is_object()) return fallback;
  auto it = v.find(key);
  if (it == v.end()) return fallback;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_null()) return fallback;
  return it->dump();
}

std::string index_label(std::size_t i) { return fmt::format("F{}", i + 1); }

std::string risk_rationale(FindingKind k) {
  switch (k) {
    case FindingKind::shell_access: return "interactive command execution on the target";
    case FindingKind::credential: return "working secret usable for further access";
    case FindingKind::vulnerability: return "weakness that exposes data or functionality";
    case FindingKind::hash: return "password hash recoverable offline";
    case FindingKind::export_share: return "file share readable without authentication";
    case FindingKind::artifact_file: return "sensitive file retrievable by an outsider";
    case FindingKind::directory: return "reachable web content, informational";
    case FindingKind::port: return "exposed network service, informational";
    case FindingKind::live_host: return "host answers on the network, informational";
    case FindingKind::username: return "valid account name narrows guessing";
  }
  return "informational";
}

const std::vector<std::pair<FindingKind, std::string>>& recommendations() {
  static const std::vector<std::pair<FindingKind, std::string>> recs{
      {FindingKind::shell_access, "Rebuild the compromised host and rotate every secret stored on it."},
      {FindingKind::credential, "Change the recovered passwords and stop reusing them across services."},
      {FindingKind::hash, "Store passwords with a slow salted hash (bcrypt, scrypt or Argon2) instead of MD5."},
      {FindingKind::export_share, "Restrict NFS exports to named clients and never share key material."},
      {FindingKind::vulnerability, "Fix the listed weaknesses: disable anonymous FTP, validate uploads by content and "
                                   "store them outside the web root, patch file inclusion flaws."},
      {FindingKind::artifact_file, "Remove configuration files, dumps and notes from publicly reachable locations."},
      {FindingKind::directory, "Review exposed web paths and remove unused applications."},
      {FindingKind::username, "Disable unused accounts and enforce key-only SSH where possible."},
      {FindingKind::port, "Close services that are not needed and firewall the rest."},
  };
  return recs;
}

std::string findings_log(const ReportInput& in) {
  std::string s;
  for (std::size_t i = 0; i < in.findings.size(); ++i) {
    s += fmt::format("{} [{}] {}: {}\n", index_label(i), to_string(risk_level(in.findings[i].kind)),
                     engine::to_string(in.findings[i].kind), summarize(in.findings[i]));
  }
  for (const auto& n : in.notes) s += "note: " + n + "\n";
  return s;
}

std::vector<Section> template_sections(const ReportInput& in, const std::vector<ReportFinding>& findings,
                                       const std::vector<RiskEntry>& risks, std::string_view operator_notes) {
  const auto& m = in.metadata;
  std::map<RiskLevel, int> counts;
  for (const auto& r : risks) ++counts[r.level];
  const Finding* shell = nullptr;
  for (const auto& f : in.findings) {
    if (f.kind == FindingKind::shell_access) shell = &f;
  }
  const std::string target = m.target_ip.empty() ? "no selected host" : m.target_ip;

  std::vector<Section> out;
  {
    std::string b = fmt::format("Assessment of {} from {} on {}.\n", target, m.attacker_ip.empty() ? "an unknown address" : m.attacker_ip, m.date);
    b += fmt::format("{} findings: {} high, {} medium, {} low.\n", findings.size(), counts[RiskLevel::High],
                     counts[RiskLevel::Medium], counts[RiskLevel::Low]);
    b += shell ? fmt::format("Outcome: shell obtained as {} via {}.\n", str(shell->value, "user", "unknown"), str(shell->value, "via"))
               : "Outcome: no shell was obtained.\n";
    out.push_back({"Executive Summary", b});
  }
  {
    std::string b = fmt::format("Scope: {}\nTarget: {}\nPeriod: {}\nAuthor: {}\n", m.scope.empty() ? "(none)" : m.scope, target,
                                m.period, m.author);
    b += "Objectives: find live hosts in scope, enumerate exposed services, obtain access to the target and record "
         "every step taken.\n";
    out.push_back({"Objectives and Scope", b});
  }
  {
    std::string b =
        "1. Reconnaissance: ping sweep of the scope, infrastructure hosts removed from the candidate list.\n"
        "2. Scanning and enumeration: full TCP port and version scan of the selected target.\n"
        "3. Gaining access: per-service attack vectors in ascending port order, credentials shared between them.\n"
        "4. Reporting: findings collected with the command that produced each one.\n"
        "Every intrusive command ran only after explicit approval.\n";
    if (!in.raw_outputs.empty()) {
      b += "Scans recorded:\n";
      for (const auto& r : in.raw_outputs) b += "  " + r.title + "\n";
    }
    out.push_back({"Methodology", b});
  }
  {
    std::string b;
    for (std::size_t i = 0; i < findings.size(); ++i) {
      b += fmt::format("{} [{}] {}: {}\n", index_label(i), to_string(risks[i].level), findings[i].kind, findings[i].summary);
    }
    if (b.empty()) b = "No findings.\n";
    out.push_back({"Findings and Vulnerabilities", b});
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : risks) rows.push_back({index_label(r.finding_ref), to_string(r.level), r.rationale});
    out.push_back({"Risk Rating", rows.empty() ? std::string("No findings to rate.\n")
                                               : toolio::render_table({"FINDING", "LEVEL", "RATIONALE"}, rows)});
  }
  {
    std::string b;
    for (const auto& [kind, text] : recommendations()) {
      bool present = std::any_of(in.findings.begin(), in.findings.end(), [&](const Finding& f) { return f.kind == kind; });
      if (present) b += "- " + text + "\n";
    }
    if (b.empty()) b = "- No action required beyond routine patching.\n";
    out.push_back({"Recommendations", b});
  }
  {
    std::string b = shell ? fmt::format("The target was compromised ({}).\n", summarize(*shell))
                          : "The target was not compromised with the techniques attempted.\n";
    for (const auto& n : in.notes) b += "- " + n + "\n";
    if (!operator_notes.empty()) b += "Operator notes:\n" + std::string(operator_notes) + "\n";
    out.push_back({"Conclusions", b});
  }
  {
    std::string b;
    for (const auto& r : in.raw_outputs) b += "### " + r.title + "\n" + r.text + (r.text.ends_with('\n') ? "" : "\n");
    if (b.empty()) b = "No raw tool output was kept.\n";
    out.push_back({"Appendices", b});
  }
  return out;
}

// Advisor prose must name all eight sections, either as {"sections": {title: body}}
// or as {"sections": [{"title", "body"}]}.
std::optional<std::map<std::string, std::string>> advisor_prose(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("sections")) return std::nullopt;
  std::map<std::string, std::string> bodies;
  const auto& s = j["sections"];
  if (s.is_object()) {
    for (const auto& [k, v] : s.items()) {
      if (v.is_string()) bodies[k] = v.get<std::string>();
    }
  } else if (s.is_array()) {
    for (const auto& e : s) {
      if (e.is_object() && e.contains("title") && e.contains("body") && e["title"].is_string() && e["body"].is_string()) {
        bodies[e["title"].get<std::string>()] = e["body"].get<std::string>();
      }
    }
  }
  for (auto t : kSectionTitles) {
    auto it = bodies.find(std::string(t));
    if (it == bodies.end() || trim(it->second).empty()) return std::nullopt;
  }
  return bodies;
}

ReportDocument build(const ReportInput& input, std::string_view operator_notes, advisor::Advisor* adv) {
  ReportDocument doc;
  doc.metadata = input.metadata;
  for (std::size_t i = 0; i < input.findings.size(); ++i) {
    const auto& f = input.findings[i];
    doc.findings.push_back({engine::to_string(f.kind), f.target_ip.to_string(), summarize(f), f.value.is_object() ? f.value : json{{"value", f.value}}});
    doc.risk_ratings.push_back(rate_risk(f, i));
  }
  doc.sections = template_sections(input, doc.findings, doc.risk_ratings, operator_notes);
  if (adv) {
    advisor::PromptContext ctx{input.metadata.target_ip.empty() ? "unknown" : input.metadata.target_ip,
                               input.metadata.attacker_ip.empty() ? "unknown" : input.metadata.attacker_ip, "reporting"};
    std::vector<std::string> titles(kSectionTitles.begin(), kSectionTitles.end());
    auto log = findings_log(input);
    if (!operator_notes.empty()) log += "operator notes: " + std::string(operator_notes) + "\n";
    std::optional<std::string> reply;
    try {
      reply = adv->complete(advisor::build_report_prompt(log, ctx, titles));
    } catch (const Error&) {
      reply.reset();
    }
    if (reply) {
      if (auto bodies = advisor_prose(*reply)) {
        for (auto& s : doc.sections) {
          // Tables and raw output stay machine-generated.
          if (s.title == "Risk Rating" || s.title == "Appendices") continue;
          s.body = (*bodies)[s.title];
          if (!s.body.ends_with('\n')) s.body += '\n';
        }
        doc.prose_source = "advisor";
      }
    }
  }
  return doc;
}

}  // namespace

const char* to_string(RiskLevel l) {
  switch (l) {
    case RiskLevel::High: return "High";
    case RiskLevel::Medium: return "Medium";
    case RiskLevel::Low: return "Low";
  }
  return "Low";
}

std::optional<RiskLevel> risk_level_from_string(std::string_view s) {
  if (s == "High") return RiskLevel::High;
  if (s == "Medium") return RiskLevel::Medium;
  if (s == "Low") return RiskLevel::Low;
  return std::nullopt;
}

RiskLevel risk_level(FindingKind kind) {
  switch (kind) {
    case FindingKind::shell_access:
    case FindingKind::credential: return RiskLevel::High;
    case FindingKind::vulnerability:
    case FindingKind::hash:
    case FindingKind::export_share:
    case FindingKind::artifact_file: return RiskLevel::Medium;
    case FindingKind::directory:
    case FindingKind::port:
    case FindingKind::live_host:
    case FindingKind::username: return RiskLevel::Low;
  }
  return RiskLevel::Low;
}

RiskEntry rate_risk(const Finding& f, std::size_t index) { return {index, risk_level(f.kind), risk_rationale(f.kind)}; }

std::string summarize(const Finding& f) {
  const auto& v = f.value;
  switch (f.kind) {
    case FindingKind::live_host: return "Live host " + str(v, "ip", f.target_ip.to_string());
    case FindingKind::port: {
      auto s = fmt::format("{}/{} open: {}", str(v, "port"), str(v, "protocol", "tcp"), str(v, "service", "unknown"));
      auto ver = str(v, "version");
      return ver.empty() ? s : s + " (" + ver + ")";
    }
    case FindingKind::directory:
      return fmt::format("Web path {} (HTTP {}) on port {}", str(v, "path"), str(v, "status"), str(v, "port"));
    case FindingKind::artifact_file: {
      auto hits = v.is_object() && v.contains("sensitive_hits") && v["sensitive_hits"].is_array() ? v["sensitive_hits"].size() : 0;
      return fmt::format("Retrieved {} via {} ({} sensitive line{})", str(v, "name"), str(v, "source"), hits, hits == 1 ? "" : "s");
    }
    case FindingKind::hash: return fmt::format("{} hash {} found in {}", str(v, "algorithm", "unknown"), str(v, "hash"), str(v, "source"));
    case FindingKind::credential: {
      auto kind = str(v, "kind");
      auto secret = str(v, "secret");
      if (kind == "hash_plaintext") return fmt::format("Password '{}' recovered from hash with {}", secret, str(v, "wordlist"));
      if (kind == "archive_password") return fmt::format("Archive password '{}' for {}", secret, str(v, "archive"));
      if (kind == "ssh_password") return fmt::format("SSH password '{}' for {}", secret, str(v, "user"));
      return fmt::format("Plaintext secret '{}' in {}", secret, str(v, "source"));
    }
    case FindingKind::username: return fmt::format("Username {} ({})", str(v, "username"), str(v, "source"));
    case FindingKind::export_share: return fmt::format("NFS export {} open to {}", str(v, "path"), str(v, "clients"));
    case FindingKind::vulnerability: {
      auto s = str(v, "title", "Unnamed weakness");
      if (v.is_object() && v.value("deferred", false)) s += " (deferred)";
      return s;
    }
    case FindingKind::shell_access: return fmt::format("Shell as {} via {}", str(v, "user", "unknown"), str(v, "via"));
  }
  return "finding";
}

ReportDocument assemble_report(const ReportInput& input, advisor::Advisor* advisor) { return build(input, {}, advisor); }

ReportDocument regenerate_report(const ReportInput& input, std::string_view notes, advisor::Advisor* advisor) {
  return build(input, notes, advisor);
}

json to_json(const ReportDocument& r) {
  json j;
  j["schema_version"] = std::string(kSchemaVersion);
  j["metadata"] = {{"target_ip", r.metadata.target_ip}, {"attacker_ip", r.metadata.attacker_ip}, {"date", r.metadata.date},
                   {"author", r.metadata.author},       {"period", r.metadata.period},           {"scope", r.metadata.scope}};
  j["sections"] = json::array();
  for (const auto& s : r.sections) j["sections"].push_back({{"title", s.title}, {"body", s.body}});
  j["findings"] = json::array();
  for (std::size_t i = 0; i < r.findings.size(); ++i) {
    const auto& f = r.findings[i];
    j["findings"].push_back({{"index", i}, {"kind", f.kind}, {"target_ip", f.target_ip}, {"summary", f.summary}, {"value", f.value}});
  }
  j["risk_ratings"] = json::array();
  for (const auto& e : r.risk_ratings) {
    j["risk_ratings"].push_back({{"finding_ref", e.finding_ref}, {"level", to_string(e.level)}, {"rationale", e.rationale}});
  }
  j["prose_source"] = r.prose_source;
  return j;
}

std::string emit_json(const ReportDocument& r) { return to_json(r).dump(2) + "\n"; }

std::string emit_text(const ReportDocument& r) {
  const auto& m = r.metadata;
  std::string s = "PENETRATION TEST REPORT\n=======================\n\n";
  s += fmt::format("Target:   {}\nAttacker: {}\nDate:     {}\nAuthor:   {}\nPeriod:   {}\nScope:    {}\n", m.target_ip, m.attacker_ip,
                   m.date, m.author, m.period, m.scope);
  for (std::size_t i = 0; i < r.sections.size(); ++i) {
    const auto& sec = r.sections[i];
    auto heading = fmt::format("{}. {}", i + 1, sec.title);
    s += "\n" + heading + "\n" + std::string(heading.size(), '-') + "\n" + sec.body;
    if (!sec.body.ends_with('\n')) s += '\n';
  }
  return s;
}

ReportDocument parse_report_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::parse_error, "report is not valid JSON");
  auto errors = validate_json(j, report_schema());
  if (!errors.empty()) throw Error(ErrorCode::parse_error, "report does not match schema: " + errors.front());
  ReportDocument r;
  const auto& m = j["metadata"];
  r.metadata = {m["target_ip"], m["attacker_ip"], m["date"], m["author"], m["period"], m["scope"]};
  for (std::size_t i = 0; i < j["sections"].size(); ++i) {
    const auto& s = j["sections"][i];
    if (s["title"] != kSectionTitles[i]) {
      throw Error(ErrorCode::parse_error, fmt::format("section {} must be '{}'", i + 1, kSectionTitles[i]));
    }
    r.sections.push_back({s["title"], s["body"]});
  }
  for (std::size_t i = 0; i < j["findings"].size(); ++i) {
    const auto& f = j["findings"][i];
    if (f["index"].get<std::size_t>() != i) throw Error(ErrorCode::parse_error, fmt::format("finding {} has index {}", i, f["index"].dump()));
    r.findings.push_back({f["kind"], f["target_ip"], f["summary"], f["value"]});
  }
  for (const auto& e : j["risk_ratings"]) {
    RiskEntry entry{e["finding_ref"].get<std::size_t>(), *risk_level_from_string(e["level"].get<std::string>()), e["rationale"]};
    if (entry.finding_ref >= r.findings.size()) {
      throw Error(ErrorCode::parse_error, fmt::format("risk rating refers to missing finding {}", entry.finding_ref));
    }
    r.risk_ratings.push_back(std::move(entry));
  }
  r.prose_source = j["prose_source"];
  return r;
}

const json& report_schema() {
  static const json schema = json::parse(detail::embedded_schema());
  return schema;
}

}  // namespace pentestxx::report
