#include <gtest/gtest.h>

#include "pentestxx/console.hpp"

using namespace pentestxx;
using engine::ApprovalRequest;
using nlohmann::json;

namespace {

ApprovalRequest gate(std::string kind, std::vector<std::string> options = {}) {
  return {"a3", std::move(kind), "Run nmap", "nmap -sn 192.168.1.0/24", std::move(options)};
}

engine::Event event(std::string kind, json payload) {
  engine::Event e;
  e.seq = 42;
  e.timestamp = "2024-11-20T09:00:00.000Z";
  e.phase = engine::Phase::scan_enum;
  e.kind = std::move(kind);
  e.payload = std::move(payload);
  return e;
}

}  // namespace

TEST(ConsoleReply, GrantAndDenyWords) {
  auto req = gate("command");
  for (const char* r : {"", "y", "YES", " grant ", "Y"}) {
    auto d = cli::parse_reply(r, req);
    ASSERT_TRUE(d) << r;
    EXPECT_TRUE(d->granted);
    EXPECT_EQ(d->params["choice"], 0);
    EXPECT_EQ(d->source, engine::DecisionSource::console);
  }
  for (const char* r : {"n", "No", "deny"}) {
    auto d = cli::parse_reply(r, req);
    ASSERT_TRUE(d) << r;
    EXPECT_FALSE(d->granted);
  }
  for (const char* r : {"maybe", "yess", "1.2", "-1"}) EXPECT_FALSE(cli::parse_reply(r, req)) << r;
}

TEST(ConsoleReply, NumberedChoices) {
  auto req = gate("select_wordlist", {"rockyou.txt", "fasttrack.txt", "common.txt"});
  auto d = cli::parse_reply("3", req);
  ASSERT_TRUE(d);
  EXPECT_TRUE(d->granted);
  EXPECT_EQ(d->params["choice"], 2);
  EXPECT_FALSE(cli::parse_reply("0", req));
  EXPECT_FALSE(cli::parse_reply("4", req));
  // Plain gates accept "1" as a grant.
  EXPECT_TRUE(cli::parse_reply("1", gate("proceed")));
  EXPECT_FALSE(cli::parse_reply("2", gate("proceed")));
}

TEST(ConsoleReply, CidrOverride) {
  auto d = cli::parse_reply("10.0.0.0/24", gate("confirm_subnet"));
  ASSERT_TRUE(d);
  EXPECT_TRUE(d->granted);
  EXPECT_EQ(d->params["cidr"], "10.0.0.0/24");
  EXPECT_FALSE(cli::parse_reply("10.0.0/24", gate("confirm_subnet")));
}

TEST(ConsoleReply, KeyValueParams) {
  auto d = cli::parse_reply("author=Jane Doe; date=2024-11-21 ;period=two days", gate("report_metadata"));
  ASSERT_TRUE(d);
  EXPECT_TRUE(d->granted);
  EXPECT_EQ(d->params["author"], "Jane Doe");
  EXPECT_EQ(d->params["date"], "2024-11-21");
  EXPECT_EQ(d->params["period"], "two days");
  EXPECT_EQ(d->params["choice"], 0);

  d = cli::parse_reply("choice=2", gate("select_target", {"a", "b", "c"}));
  ASSERT_TRUE(d);
  EXPECT_EQ(d->params["choice"], 2);
  EXPECT_FALSE(cli::parse_reply("choice=x", gate("select_target", {"a"})));
  EXPECT_FALSE(cli::parse_reply("=3", gate("report_metadata")));
}

TEST(ConsolePrompt, NumbersOptionsFromOne) {
  auto p = cli::render_prompt(gate("select_wordlist", {"rockyou.txt", "fasttrack.txt"}));
  EXPECT_NE(p.find("[approval a3] Run nmap"), std::string::npos);
  EXPECT_NE(p.find("> nmap -sn 192.168.1.0/24"), std::string::npos);
  EXPECT_NE(p.find("1) rockyou.txt"), std::string::npos);
  EXPECT_NE(p.find("2) fasttrack.txt"), std::string::npos);
  EXPECT_TRUE(p.ends_with("decision: "));
  EXPECT_NE(cli::render_prompt(gate("confirm_subnet")).find("another CIDR"), std::string::npos);
}

TEST(ConsoleEvents, Rendering) {
  EXPECT_EQ(cli::render_event(event("phase_changed", {{"phase", "gaining_access"}}), false), "\n==== gaining_access ====");
  auto line = cli::render_event(event("command_started", {{"display_line", "nmap -p- -A -T4 192.168.1.7"}}), false);
  EXPECT_NE(line.find("[  42]"), std::string::npos);
  EXPECT_TRUE(line.ends_with("$ nmap -p- -A -T4 192.168.1.7"));
  EXPECT_TRUE(cli::render_event(event("step_skipped", {{"display_line", "curl -F x"}}), false).ends_with("skipped: curl -F x"));
  EXPECT_TRUE(cli::render_event(event("session_finished", {{"status", "completed"}}), false).ends_with("finished: completed"));
  auto fin = event("command_finished", {{"exit_status", 0}, {"duration_seconds", 1.5}, {"stdout", "21/tcp open"}});
  EXPECT_EQ(cli::render_event(fin, false).find("21/tcp"), std::string::npos);
  EXPECT_NE(cli::render_event(fin, true).find("21/tcp open"), std::string::npos);
  EXPECT_NE(cli::render_event(fin, false).find("(1.50s)"), std::string::npos);
}

TEST(ConsoleEvents, QuietKinds) {
  EXPECT_TRUE(cli::render_event(event("approval_requested", {{"approval_id", "a1"}}), true).empty());
  EXPECT_TRUE(cli::render_event(event("hosts", {{"hosts", json::array()}}), false).empty());
  EXPECT_FALSE(cli::render_event(event("hosts", {{"hosts", json::array()}}), true).empty());
  // Missing payload fields render as blanks, never throw.
  EXPECT_NO_THROW(cli::render_event(event("finding", json::object()), false));
  EXPECT_NO_THROW(cli::render_event(event("command_finished", {{"duration_seconds", "x"}}), false));
}
