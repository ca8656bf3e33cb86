#include <gtest/gtest.h>

#include "pentestxx/advisor/advisor.hpp"
#include "pentestxx/common/error.hpp"
#include "pentestxx/common/json_schema.hpp"
#include "pentestxx/report/report.hpp"
#include "support/scenario.hpp"

using namespace pentestxx;
using namespace pentestxx::report;
using engine::Finding;
using engine::FindingKind;
using nlohmann::json;
namespace t = pentestxx::testing;

namespace {

ReportInput sample_input() {
  ReportInput in;
  in.metadata = {"192.168.1.7", "192.168.1.4", "2024-11-20", "pentestxx operator", "2024-11-20", "192.168.1.0/24"};
  const Ipv4 ip = Ipv4::parse("192.168.1.7");
  in.findings = {
      {FindingKind::port, {{"port", 21}, {"protocol", "tcp"}, {"status", "open"}, {"service", "ftp"}, {"version", "vsftpd 3.0.3"}}, 5, ip},
      {FindingKind::hash, {{"hash", "cd73502828457d15655bbd7a63fb0bc8"}, {"algorithm", "md5"}, {"source", "note.txt"}}, 9, ip},
      {FindingKind::credential, {{"secret", "student"}, {"kind", "hash_plaintext"}}, 12, ip},
      {FindingKind::export_share, {{"path", "/srv/nfs"}, {"clients", "*"}}, 14, ip},
      {FindingKind::shell_access, {{"via", "php reverse shell"}, {"user", "www-data"}}, 20, ip},
  };
  in.raw_outputs = {{"nmap -p- -A -T4 192.168.1.7", "21/tcp open ftp vsftpd 3.0.3\n"}};
  in.notes = {"Operator declined the SSH dictionary attack"};
  return in;
}

class ProseAdvisor final : public advisor::Advisor {
 public:
  explicit ProseAdvisor(std::string reply) : reply_(std::move(reply)) {}
  std::string_view name() const override { return "prose"; }
  advisor::Advice analyze(const advisor::PromptEnvelope&) override { return {}; }
  std::optional<std::string> complete(const advisor::PromptEnvelope& env) override {
    last_body = env.body;
    return reply_;
  }
  std::string last_body;

 private:
  std::string reply_;
};

std::string all_sections_reply() {
  json sections = json::array();
  for (auto title : kSectionTitles) sections.push_back({{"title", title}, {"body", "advisor text for " + std::string(title)}});
  return json{{"sections", sections}}.dump();
}

}  // namespace

TEST(Report, EightSectionsInOrder) {
  auto doc = assemble_report(sample_input());
  ASSERT_EQ(doc.sections.size(), kSectionTitles.size());
  for (std::size_t i = 0; i < kSectionTitles.size(); ++i) EXPECT_EQ(doc.sections[i].title, kSectionTitles[i]);
  EXPECT_EQ(doc.prose_source, "template");
  EXPECT_EQ(doc.findings.size(), 5u);
  EXPECT_EQ(doc.findings[3].kind, "export");
}

TEST(Report, ValidatesAgainstTheShippedSchema) {
  auto doc = assemble_report(sample_input());
  auto errors = validate_json(to_json(doc), report_schema());
  EXPECT_TRUE(errors.empty()) << (errors.empty() ? "" : errors.front());
  EXPECT_EQ(to_json(doc)["schema_version"], "1.0");
}

TEST(Report, RiskRules) {
  EXPECT_EQ(risk_level(FindingKind::shell_access), RiskLevel::High);
  EXPECT_EQ(risk_level(FindingKind::credential), RiskLevel::High);
  EXPECT_EQ(risk_level(FindingKind::vulnerability), RiskLevel::Medium);
  EXPECT_EQ(risk_level(FindingKind::hash), RiskLevel::Medium);
  EXPECT_EQ(risk_level(FindingKind::export_share), RiskLevel::Medium);
  EXPECT_EQ(risk_level(FindingKind::artifact_file), RiskLevel::Medium);
  EXPECT_EQ(risk_level(FindingKind::directory), RiskLevel::Low);
  EXPECT_EQ(risk_level(FindingKind::port), RiskLevel::Low);
  EXPECT_EQ(risk_level(FindingKind::live_host), RiskLevel::Low);
  EXPECT_EQ(risk_level(FindingKind::username), RiskLevel::Low);
  auto doc = assemble_report(sample_input());
  ASSERT_EQ(doc.risk_ratings.size(), doc.findings.size());
  for (std::size_t i = 0; i < doc.risk_ratings.size(); ++i) {
    EXPECT_EQ(doc.risk_ratings[i].finding_ref, i);
    EXPECT_FALSE(doc.risk_ratings[i].rationale.empty());
  }
  EXPECT_EQ(doc.risk_ratings[4].level, RiskLevel::High);
}

TEST(Report, JsonRoundTrip) {
  auto doc = assemble_report(sample_input());
  auto text = emit_json(doc);
  EXPECT_TRUE(text.ends_with("\n"));
  EXPECT_EQ(parse_report_json(text), doc);
}

TEST(Report, ParseRejectsInvalidDocuments) {
  auto good = to_json(assemble_report(sample_input()));
  auto expect_bad = [](json j, const char* why) {
    try {
      parse_report_json(j.dump());
      ADD_FAILURE() << why;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::parse_error) << why;
    }
  };
  {
    auto j = good;
    std::swap(j["sections"][0], j["sections"][1]);
    expect_bad(j, "section order");
  }
  {
    auto j = good;
    j["risk_ratings"][0]["finding_ref"] = 99;
    expect_bad(j, "dangling finding_ref");
  }
  {
    auto j = good;
    j["risk_ratings"][0]["level"] = "Critical";
    expect_bad(j, "unknown level");
  }
  {
    auto j = good;
    j["sections"].erase(7);
    expect_bad(j, "seven sections");
  }
  {
    auto j = good;
    j["metadata"]["date"] = "20/11/2024";
    expect_bad(j, "date format");
  }
  {
    auto j = good;
    j["findings"][1]["index"] = 5;
    expect_bad(j, "index mismatch");
  }
  {
    auto j = good;
    j["unexpected"] = true;
    expect_bad(j, "extra property");
  }
  EXPECT_THROW(parse_report_json("{"), Error);
}

TEST(Report, TextRendering) {
  auto doc = assemble_report(sample_input());
  auto text = emit_text(doc);
  EXPECT_TRUE(text.starts_with("PENETRATION TEST REPORT"));
  std::size_t pos = 0;
  for (std::size_t i = 0; i < kSectionTitles.size(); ++i) {
    auto heading = std::to_string(i + 1) + ". " + std::string(kSectionTitles[i]);
    auto at = text.find(heading, pos);
    ASSERT_NE(at, std::string::npos) << heading;
    pos = at;
  }
  EXPECT_NE(text.find("192.168.1.0/24"), std::string::npos);
  EXPECT_NE(text.find("Operator declined the SSH dictionary attack"), std::string::npos);
  EXPECT_NE(text.find("nmap -p- -A -T4 192.168.1.7"), std::string::npos);
}

TEST(Report, AdvisorProseReplacesTemplateText) {
  ProseAdvisor adv(all_sections_reply());
  auto doc = assemble_report(sample_input(), &adv);
  EXPECT_EQ(doc.prose_source, "advisor");
  EXPECT_EQ(doc.sections[0].body, "advisor text for Executive Summary\n");
  // Tables and raw output stay machine-generated.
  auto templ = assemble_report(sample_input());
  EXPECT_EQ(doc.sections[4].body, templ.sections[4].body);
  EXPECT_EQ(doc.sections[7].body, templ.sections[7].body);
  EXPECT_NE(adv.last_body.find("cd73502828457d15655bbd7a63fb0bc8"), std::string::npos);
  EXPECT_TRUE(validate_json(to_json(doc), report_schema()).empty());
}

TEST(Report, IncompleteAdvisorProseFallsBack) {
  for (const char* reply : {"not json", R"({"sections": []})", R"({"sections": [{"title": "Executive Summary", "body": "x"}]})",
                            R"({"sections": 3})"}) {
    ProseAdvisor adv(reply);
    auto doc = assemble_report(sample_input(), &adv);
    EXPECT_EQ(doc.prose_source, "template") << reply;
    EXPECT_EQ(doc, assemble_report(sample_input())) << reply;
  }
}

TEST(Report, RegenerateFoldsInNotes) {
  auto doc = regenerate_report(sample_input(), "Client asked for a retest in Q1.");
  std::string conclusions = doc.sections[6].body;
  EXPECT_NE(conclusions.find("Client asked for a retest in Q1."), std::string::npos);
  EXPECT_NE(conclusions.find("Operator notes:"), std::string::npos);
  EXPECT_EQ(doc.sections[0], assemble_report(sample_input()).sections[0]);
}

TEST(Report, Summaries) {
  auto in = sample_input();
  for (const auto& f : in.findings) EXPECT_FALSE(summarize(f).empty());
  EXPECT_NE(summarize(in.findings[1]).find("cd73502828457d15655bbd7a63fb0bc8"), std::string::npos);
}

TEST(Report, ScenarioReportsValidate) {
  for (const char* fx : {"vm1", "vm2"}) {
    auto r = t::run_scenario({fx, t::scratch_dir(std::string("report_") + fx)});
    ASSERT_TRUE(r.report.has_value()) << fx;
    auto on_disk = json::parse(t::read_file(r.workspace / "report.json"));
    auto errors = validate_json(on_disk, report_schema());
    EXPECT_TRUE(errors.empty()) << fx << ": " << (errors.empty() ? "" : errors.front());
    EXPECT_EQ(parse_report_json(on_disk.dump()), *r.report);
    auto text = t::read_file(r.workspace / "report.txt");
    EXPECT_EQ(text, emit_text(*r.report));
  }
}
