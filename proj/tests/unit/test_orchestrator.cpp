#include <fstream>

#include <gtest/gtest.h>

#include "pentestxx/common/error.hpp"
#include "pentestxx/common/json_schema.hpp"
#include "pentestxx/engine/replay.hpp"
#include "pentestxx/labsim/fixture.hpp"
#include "pentestxx/labsim/sim_backend.hpp"
#include "pentestxx/report/report.hpp"
#include "support/scenario.hpp"

using namespace pentestxx;
using namespace pentestxx::engine;
using nlohmann::json;
namespace fs = std::filesystem;
namespace t = pentestxx::testing;

namespace {

std::vector<const Event*> of_kind(const std::vector<Event>& events, const std::string& kind) {
  std::vector<const Event*> out;
  for (const auto& e : events) {
    if (e.kind == kind) out.push_back(&e);
  }
  return out;
}

bool has_kind(const std::vector<Finding>& fs, FindingKind k) {
  return std::any_of(fs.begin(), fs.end(), [k](const Finding& f) { return f.kind == k; });
}

void expect_log_sound(const t::ScenarioResult& r, bool expect_gated = true) {
  auto in_memory = verify_event_log(r.events);
  EXPECT_TRUE(in_memory.ok()) << (in_memory.violations.empty() ? "" : in_memory.violations.front());
  auto persisted = read_event_log(r.workspace / "events.ndjson");
  EXPECT_EQ(persisted, r.events);
  auto replayed = verify_event_log(persisted);
  EXPECT_TRUE(replayed.ok());
  if (expect_gated) EXPECT_GT(replayed.gated_commands, 0u);
}

t::GatePolicy deny_when(std::function<bool(const ApprovalRequest&)> pred) {
  return [pred](const ApprovalRequest& req) -> std::optional<Decision> {
    if (pred(req)) return Decision{false, json::object(), DecisionSource::synthetic};
    return std::nullopt;
  };
}

}  // namespace

TEST(Scenario, Vm1ReachesAShell) {
  auto r = t::run_scenario({"vm1", t::scratch_dir("orch_vm1")});
  ASSERT_EQ(r.status, SessionStatus::completed);
  const auto& f = r.findings;
  auto i = t::find_finding(f, 0, [](const Finding& x) { return x.kind == FindingKind::port && x.value["port"] == 21; });
  ASSERT_NE(i, std::string::npos);
  i = t::find_finding(f, i, [](const Finding& x) { return x.kind == FindingKind::artifact_file && x.value["name"] == "note.txt"; });
  ASSERT_NE(i, std::string::npos);
  i = t::find_finding(f, i, [](const Finding& x) { return x.kind == FindingKind::hash && x.value["hash"] == "cd73502828457d15655bbd7a63fb0bc8"; });
  ASSERT_NE(i, std::string::npos);
  i = t::find_finding(f, i, [](const Finding& x) { return x.kind == FindingKind::credential && x.value["secret"] == "student"; });
  ASSERT_NE(i, std::string::npos);
  i = t::find_finding(f, i, [](const Finding& x) { return x.kind == FindingKind::shell_access; });
  ASSERT_NE(i, std::string::npos);
  EXPECT_EQ(f[i].value["user"], "www-data");
  for (const auto& x : f) EXPECT_EQ(x.target_ip.to_string(), "192.168.1.7");

  ASSERT_TRUE(r.report.has_value());
  EXPECT_TRUE(fs::exists(r.workspace / "report.txt"));
  EXPECT_TRUE(fs::exists(r.workspace / "report.json"));
  expect_log_sound(r);

  // Every command the operator saw is the one that ran.
  auto started = of_kind(r.events, "command_started");
  std::set<std::string> programs;
  for (const auto* e : started) programs.insert(e->payload["program"].get<std::string>());
  for (const char* p : {"nmap", "curl", "hashcat", "gobuster"}) EXPECT_TRUE(programs.contains(p)) << p;
  auto listeners = of_kind(r.events, "listener_started");
  ASSERT_EQ(listeners.size(), 1u);
  EXPECT_EQ(listeners[0]->payload["display_line"], "nc -nvlp 6655");
  EXPECT_FALSE(of_kind(r.events, "warning").empty());  // auto-approve is announced
}

TEST(Scenario, Vm2ReachesAShellOverSsh) {
  auto r = t::run_scenario({"vm2", t::scratch_dir("orch_vm2")});
  ASSERT_EQ(r.status, SessionStatus::completed);
  const auto& f = r.findings;
  EXPECT_NE(t::find_finding(f, 0, [](const Finding& x) { return x.kind == FindingKind::export_share && x.value["path"] == "/srv/nfs"; }),
            std::string::npos);
  EXPECT_NE(t::find_finding(f, 0, [](const Finding& x) {
              return x.kind == FindingKind::credential && x.value["secret"] == "java101" && x.value["kind"] == "archive_password";
            }),
            std::string::npos);
  std::set<std::string> users;
  for (const auto& x : f) {
    if (x.kind == FindingKind::username) users.insert(x.value["username"].get<std::string>());
  }
  EXPECT_TRUE(users.contains("jeanpaul"));
  EXPECT_TRUE(users.contains("root"));
  auto shell = t::find_finding(f, 0, [](const Finding& x) { return x.kind == FindingKind::shell_access; });
  ASSERT_NE(shell, std::string::npos);
  EXPECT_EQ(f[shell].value["via"], "ssh key");
  EXPECT_EQ(f[shell].value["user"], "jeanpaul");

  auto perms = of_kind(r.events, "key_permissions");
  ASSERT_FALSE(perms.empty());
  EXPECT_EQ(perms[0]->payload["after"], "0600");
  expect_log_sound(r);
}

TEST(Scenario, DeniedUploadSkipsTheShellButStillReports) {
  auto r = t::run_scenario({"vm1", t::scratch_dir("orch_deny_upload"), false,
                            deny_when([](const ApprovalRequest& req) {
                              return req.kind == "command" && req.command_preview.find(" -F ") != std::string::npos;
                            })});
  ASSERT_EQ(r.status, SessionStatus::completed);
  auto skipped = of_kind(r.events, "step_skipped");
  ASSERT_EQ(skipped.size(), 1u);
  EXPECT_NE(skipped[0]->payload["display_line"].get<std::string>().find("photo.php"), std::string::npos);
  EXPECT_FALSE(has_kind(r.findings, FindingKind::shell_access));
  EXPECT_TRUE(of_kind(r.events, "shell_connected").empty());
  auto phases = of_kind(r.events, "phase_changed");
  ASSERT_FALSE(phases.empty());
  EXPECT_TRUE(std::any_of(phases.begin(), phases.end(), [](const Event* e) { return e->payload["phase"] == "reporting"; }));
  ASSERT_TRUE(r.report.has_value());
  expect_log_sound(r);
  // The denied command never started.
  for (const auto* e : of_kind(r.events, "command_started")) {
    EXPECT_EQ(e->payload["display_line"].get<std::string>().find(" -F "), std::string::npos);
  }
}

TEST(Scenario, InteractiveGrantsMatchAutoApprove) {
  auto a = t::run_scenario({"vm2", t::scratch_dir("orch_interactive_auto")});
  auto b = t::run_scenario({"vm2", t::scratch_dir("orch_interactive_manual"), false});
  ASSERT_EQ(b.status, SessionStatus::completed);
  ASSERT_EQ(a.findings.size(), b.findings.size());
  for (std::size_t i = 0; i < a.findings.size(); ++i) EXPECT_EQ(comparable(a.findings[i]), comparable(b.findings[i]));
  for (const auto* e : of_kind(b.events, "approval_decided")) EXPECT_EQ(e->payload["source"], "synthetic");
}

TEST(Scenario, DenyingTheScopeEndsWithNoTargets) {
  auto r = t::run_scenario({"vm1", t::scratch_dir("orch_deny_scope"), false,
                            deny_when([](const ApprovalRequest& req) { return req.kind == "confirm_subnet"; })});
  EXPECT_EQ(r.status, SessionStatus::no_targets);
  EXPECT_TRUE(of_kind(r.events, "command_started").empty());
  EXPECT_TRUE(r.events.back().kind == "session_finished");
}

TEST(Scenario, ScopeOverrideReprompts) {
  int asked = 0;
  t::GatePolicy policy = [&asked](const ApprovalRequest& req) -> std::optional<Decision> {
    if (req.kind != "confirm_subnet") return std::nullopt;
    if (asked++ == 0) return Decision{false, {{"cidr", "192.168.1.0/25"}}, DecisionSource::synthetic};
    return std::nullopt;
  };
  auto r = t::run_scenario({"vm1", t::scratch_dir("orch_scope_override"), false, policy});
  EXPECT_EQ(asked, 2);
  ASSERT_EQ(r.status, SessionStatus::completed);
  auto scope = of_kind(r.events, "scope_confirmed");
  ASSERT_EQ(scope.size(), 1u);
  EXPECT_EQ(scope[0]->payload["cidr"], "192.168.1.0/25");
}

TEST(Scenario, DenyingTargetSelectionStillReports) {
  auto r = t::run_scenario({"vm1", t::scratch_dir("orch_deny_target"), false,
                            deny_when([](const ApprovalRequest& req) { return req.kind == "select_target"; })});
  ASSERT_EQ(r.status, SessionStatus::completed);
  EXPECT_TRUE(of_kind(r.events, "target_selected").empty());
  ASSERT_TRUE(r.report.has_value());
  EXPECT_TRUE(validate_json(report::to_json(*r.report), report::report_schema()).empty());
  // Only the ping sweep ran, and it is covered by the subnet gate.
  expect_log_sound(r, false);
}

TEST(Scenario, LabTargetChoice) {
  auto first = t::run_scenario({"lab", t::scratch_dir("orch_lab_default")});
  auto sel = of_kind(first.events, "target_selected");
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_EQ(sel[0]->payload["ip"], "192.168.1.7");

  t::ScenarioOptions o{"lab", t::scratch_dir("orch_lab_target")};
  o.target = "192.168.1.10";
  auto second = t::run_scenario(o);
  sel = of_kind(second.events, "target_selected");
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_EQ(sel[0]->payload["ip"], "192.168.1.10");
  EXPECT_EQ(second.status, SessionStatus::completed);

  // Both targets are recorded as live hosts; infrastructure is not.
  std::set<std::string> live;
  for (const auto& f : first.findings) {
    if (f.kind == FindingKind::live_host) live.insert(f.value["ip"].get<std::string>());
  }
  EXPECT_EQ(live, (std::set<std::string>{"192.168.1.7", "192.168.1.10"}));
}

TEST(Scenario, ChoosingAnotherTargetThroughTheGate) {
  t::GatePolicy pick_second = [](const ApprovalRequest& req) -> std::optional<Decision> {
    if (req.kind == "select_target") return Decision{true, {{"choice", 1}}, DecisionSource::synthetic};
    return std::nullopt;
  };
  auto r = t::run_scenario({"lab", t::scratch_dir("orch_lab_choice"), false, pick_second});
  auto sel = of_kind(r.events, "target_selected");
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_EQ(sel[0]->payload["ip"], "192.168.1.10");
}

TEST(Scenario, HydraFallbackWhenNothingLeaks) {
  auto dir = t::scratch_dir("orch_hydra");
  const auto fixture = dir / "ssh_only.yaml";
  std::ofstream(fixture) << R"(name: ssh_only
subnet: 10.10.0.0/24
attacker_ip: 10.10.0.4
infrastructure:
  gateway_ip: 10.10.0.1
hosts:
  - ip: 10.10.0.20
    hostname: bastion
    services:
      - { port: 22, service: ssh, version: "OpenSSH 8.2p1" }
    credentials:
      - { user: root, secret: iloveyou, mechanism: ssh-password }
)";
  auto r = t::run_scenario({fixture.string(), dir / "ws"});
  ASSERT_EQ(r.status, SessionStatus::completed);
  auto hydra = std::find_if(r.events.begin(), r.events.end(), [](const Event& e) {
    return e.kind == "command_started" && e.payload["program"] == "hydra";
  });
  ASSERT_NE(hydra, r.events.end());
  auto shell = t::find_finding(r.findings, 0, [](const Finding& x) { return x.kind == FindingKind::shell_access; });
  ASSERT_NE(shell, std::string::npos);
  EXPECT_EQ(r.findings[shell].value["user"], "root");
  EXPECT_NE(t::find_finding(r.findings, 0, [](const Finding& x) {
              return x.kind == FindingKind::credential && x.value["kind"] == "ssh_password" && x.value["secret"] == "iloveyou";
            }),
            std::string::npos);
  expect_log_sound(r);
}

TEST(Scenario, ExhaustedStrategiesAreRecorded) {
  auto dir = t::scratch_dir("orch_exhausted");
  const auto fixture = dir / "hard.yaml";
  std::ofstream(fixture) << R"(name: hard
subnet: 10.10.0.0/24
attacker_ip: 10.10.0.4
infrastructure:
  gateway_ip: 10.10.0.1
hosts:
  - ip: 10.10.0.20
    hostname: hard
    services:
      - { port: 22, service: ssh }
      - { port: 111, service: rpcbind }
    credentials:
      - { user: root, secret: "not-in-any-list-9f3b", mechanism: ssh-password }
)";
  auto r = t::run_scenario({fixture.string(), dir / "ws"});
  ASSERT_EQ(r.status, SessionStatus::completed);
  EXPECT_EQ(of_kind(r.events, "strategies_exhausted").size(), 1u);
  EXPECT_FALSE(has_kind(r.findings, FindingKind::shell_access));
  ASSERT_TRUE(r.report.has_value());
  std::string conclusions;
  for (const auto& s : r.report->sections) {
    if (s.title == "Conclusions") conclusions = s.body;
  }
  EXPECT_NE(conclusions.find("exhausted"), std::string::npos);
}

TEST(Scenario, CancelWhileWaitingOnAGate) {
  EngineConfig cfg;
  cfg.fixture = "vm1";
  cfg.workspace = t::scratch_dir("orch_cancel");
  auto s = make_session(cfg);
  s->start();
  // Nobody answers; the first gate blocks until cancel.
  for (int i = 0; i < 200 && s->approvals().pending().empty(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  ASSERT_EQ(s->approvals().pending().size(), 1u);
  EXPECT_EQ(s->approvals().pending()[0].kind, "confirm_subnet");
  s->cancel();
  s->join();
  EXPECT_EQ(s->status(), SessionStatus::cancelled);
  auto events = s->events().all();
  EXPECT_EQ(events.back().kind, "session_finished");
  EXPECT_EQ(events.back().payload["status"], "cancelled");
  EXPECT_TRUE(s->events().closed());
}

TEST(Scenario, UnknownFixtureFailsFast) {
  EngineConfig cfg;
  cfg.fixture = "vm9";
  cfg.workspace = t::scratch_dir("orch_bad_fixture");
  EXPECT_THROW(make_session(cfg), Error);
}

TEST(Scenario, ReportMetadataFromTheGate) {
  t::GatePolicy meta = [](const ApprovalRequest& req) -> std::optional<Decision> {
    if (req.kind == "report_metadata") {
      return Decision{true, {{"author", "A. Tester"}, {"date", "2024-11-21"}, {"period", "two days"}}, DecisionSource::synthetic};
    }
    return std::nullopt;
  };
  auto r = t::run_scenario({"vm1", t::scratch_dir("orch_meta"), false, meta});
  ASSERT_TRUE(r.report.has_value());
  EXPECT_EQ(r.report->metadata.author, "A. Tester");
  EXPECT_EQ(r.report->metadata.date, "2024-11-21");
  EXPECT_EQ(r.report->metadata.period, "two days");

  t::GatePolicy bad_date = [](const ApprovalRequest& req) -> std::optional<Decision> {
    if (req.kind == "report_metadata") return Decision{true, {{"date", "21/11/2024"}}, DecisionSource::synthetic};
    return std::nullopt;
  };
  auto r2 = t::run_scenario({"vm1", t::scratch_dir("orch_meta_bad"), false, bad_date});
  ASSERT_TRUE(r2.report.has_value());
  EXPECT_EQ(r2.report->metadata.date, "2024-11-20");
}

// -- advisor faults --------------------------------------------------------------------

namespace {

class GarbageAdvisor final : public advisor::Advisor {
 public:
  std::string_view name() const override { return "garbage"; }
  advisor::Advice analyze(const advisor::PromptEnvelope&) override {
    return advisor::parse_advice("Sure! Here are the findings: {\"findings\": [oops");
  }
  std::optional<std::string> complete(const advisor::PromptEnvelope&) override { return "{\"sections\": 3}"; }
};

}  // namespace

TEST(Scenario, MalformedAdvisorRepliesDoNotFailTheSession) {
  EngineConfig cfg;
  cfg.fixture = "vm1";
  cfg.auto_approve = true;
  cfg.workspace = t::scratch_dir("orch_garbage_advisor");
  auto fx = std::make_shared<const labsim::LabFixture>(labsim::builtin_fixture("vm1"));
  Session s(cfg, labsim::make_sim_backend(fx), std::make_unique<GarbageAdvisor>());
  s.run();
  EXPECT_EQ(s.status(), SessionStatus::completed);
  auto events = s.events().all();
  auto responses = of_kind(events, "advisor_response");
  ASSERT_FALSE(responses.empty());
  // No hash came back, so nothing was cracked and no shell followed.
  EXPECT_FALSE(has_kind(s.snapshot().findings, FindingKind::hash));
  auto doc = s.report();
  ASSERT_TRUE(doc.has_value());
  EXPECT_EQ(doc->prose_source, "template");
}
