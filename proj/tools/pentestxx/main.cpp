#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <unistd.h>

#include "pentestxx/api/server.hpp"
#include "pentestxx/common/error.hpp"
#include "pentestxx/common/strings.hpp"
#include "pentestxx/console.hpp"
#include "pentestxx/engine/replay.hpp"
#include "pentestxx/engine/session.hpp"
#include "pentestxx/labsim/fixture.hpp"

using namespace pentestxx;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

void install_signal_handlers() {
  struct sigaction sa{};
  sa.sa_handler = on_signal;
  sigemptyset(&sa.sa_mask);
  sa.sa_flags = 0;  // no SA_RESTART: a blocked prompt read returns
  sigaction(SIGINT, &sa, nullptr);
  sigaction(SIGTERM, &sa, nullptr);
}

// A generated token goes to an owner-only file, never to the terminal or a log.
std::filesystem::path write_token_file(const std::filesystem::path& dir, const std::string& token) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto path = dir / "api-token";
  {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  }
  fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
  std::ofstream(path, std::ios::trunc) << token << "\n";
  return path;
}

std::string token_from_env_or(const std::string& given) {
  if (!given.empty()) return given;
  const char* env = std::getenv("PENTESTXX_API_TOKEN");
  return env ? std::string(env) : std::string{};
}

int exit_code(engine::SessionStatus s) {
  switch (s) {
    case engine::SessionStatus::completed: return 0;
    case engine::SessionStatus::no_targets: return 2;
    case engine::SessionStatus::cancelled: return 130;
    default: return 1;
  }
}

struct RunArgs {
  std::string backend = "sim";
  std::string fixture = "vm1";
  std::string scope;
  std::string target;
  bool auto_approve = false;
  std::string wordlist_dir;
  std::string report = "text,json";
  std::string workspace;
  std::vector<std::string> exclude;
  int listener_port = 6655;
  std::string advisor_endpoint;
  int serve_port = -1;
  std::string host = "127.0.0.1";
  std::string token;
  bool json_events = false;
  bool verbose = false;
};

engine::EngineConfig to_config(const RunArgs& a) {
  nlohmann::json j{{"backend", a.backend}, {"fixture", a.fixture}, {"auto_approve", a.auto_approve}, {"listener_port", a.listener_port}};
  if (!a.scope.empty()) j["scope"] = a.scope;
  if (!a.target.empty()) j["target"] = a.target;
  if (!a.wordlist_dir.empty()) j["wordlist_dir"] = a.wordlist_dir;
  if (!a.workspace.empty()) j["workspace"] = a.workspace;
  if (!a.advisor_endpoint.empty()) j["advisor_endpoint"] = a.advisor_endpoint;
  if (!a.exclude.empty()) j["excluded_ips"] = a.exclude;
  nlohmann::json formats = nlohmann::json::array();
  for (auto f : split(a.report, ',')) {
    if (!trim(f).empty()) formats.push_back(std::string(trim(f)));
  }
  j["report_formats"] = formats;
  return engine::config_from_json(j);
}

// Reads one operator reply; nullopt on EOF or interrupt.
std::optional<std::string> read_reply() {
  std::string line;
  if (!std::getline(std::cin, line) || g_interrupted) {
    std::cin.clear();
    return std::nullopt;
  }
  return line;
}

void prompt_gate(engine::Session& session, const std::string& id) {
  auto req = session.approvals().find(id);
  if (!req) return;
  for (;;) {
    std::cout << cli::render_prompt(*req) << std::flush;
    auto line = read_reply();
    if (!line) {
      std::cout << "\nno answer; cancelling the session\n";
      session.cancel();
      return;
    }
    auto d = cli::parse_reply(*line, *req);
    if (!d) {
      std::cout << "  not understood\n";
      continue;
    }
    switch (session.approvals().submit(id, *d)) {
      case engine::SubmitResult::accepted: return;
      case engine::SubmitResult::conflict: std::cout << "  already decided elsewhere\n"; return;
      case engine::SubmitResult::not_found: return;
      case engine::SubmitResult::invalid: std::cout << "  choice out of range\n"; break;
    }
  }
}

int cmd_run(const RunArgs& a) {
  auto config = to_config(a);
  std::shared_ptr<engine::Session> session = engine::make_session(config);
  std::unique_ptr<api::ApiServer> server;
  auto manager = std::make_shared<api::SessionManager>();
  const bool serving = a.serve_port >= 0;
  if (serving) {
    manager->adopt(session);
    api::ServerOptions opts;
    opts.host = a.host;
    opts.port = a.serve_port;
    auto token = token_from_env_or(a.token);
    opts.token = token.empty() ? api::random_token() : token;
    server = std::make_unique<api::ApiServer>(manager, opts);
    int port = server->start();
    std::cerr << fmt::format("control API on http://{}:{}/v1 (session {})\n", a.host, port, session->id());
    if (token.empty()) std::cerr << "bearer token written to " << write_token_file(session->workspace(), opts.token).string() << "\n";
  }
  std::cerr << fmt::format("session {} workspace {}\n", session->id(), session->workspace().string());

  const bool console = !config.auto_approve && !serving;
  session->start();
  std::uint64_t cursor = 1;
  for (;;) {
    if (g_interrupted) session->cancel();
    auto batch = session->events().wait_since(cursor, std::chrono::milliseconds(200));
    for (const auto& e : batch) {
      cursor = e.seq + 1;
      if (a.json_events) {
        std::cout << engine::to_ndjson_line(e) << "\n";
      } else if (auto line = cli::render_event(e, a.verbose); !line.empty()) {
        std::cout << line << "\n";
      }
      if (console && e.kind == "approval_requested") prompt_gate(*session, e.payload.value("approval_id", ""));
    }
    std::cout << std::flush;
    if (batch.empty() && session->events().closed() && cursor > session->events().last_seq()) break;
  }
  session->join();

  auto snap = session->snapshot();
  std::cerr << fmt::format("status {}; {} findings", to_string(snap.status), snap.findings.size());
  if (snap.report_ready) std::cerr << "; report in " << session->workspace().string();
  std::cerr << "\n";
  if (serving) {
    std::cerr << "session finished; API stays up until interrupted\n";
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    server->stop();
  }
  return exit_code(snap.status);
}

int cmd_serve(const std::string& host, int port, std::string token) {
  auto manager = std::make_shared<api::SessionManager>();
  api::ServerOptions opts;
  opts.host = host;
  opts.port = port;
  token = token_from_env_or(token);
  const bool generated = token.empty();
  opts.token = generated ? api::random_token() : token;
  api::ApiServer server(manager, opts);
  int bound = server.start();
  std::cerr << fmt::format("control API on http://{}:{}/v1\n", host, bound);
  if (generated) {
    auto dir = std::filesystem::current_path() / "pentestxx-runs";
    std::cerr << "bearer token written to " << write_token_file(dir, opts.token).string() << "\n";
  }
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  server.stop();
  manager->shutdown();
  return 0;
}

int cmd_verify(const std::string& path) {
  auto events = engine::read_event_log(path);
  auto report = engine::verify_event_log(events);
  std::cout << fmt::format("{} events, {} gated commands, {} grants\n", events.size(), report.gated_commands, report.grants);
  for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
  std::cout << (report.ok() ? "OK" : "FAILED") << "\n";
  return report.ok() ? 0 : 1;
}

int cmd_fixtures(const std::string& show) {
  if (!show.empty()) {
    std::cout << labsim::builtin_fixture_document(show);
    return 0;
  }
  for (const auto& name : labsim::builtin_fixture_names()) {
    auto fx = labsim::builtin_fixture(name);
    std::cout << fmt::format("{}  subnet {}  attacker {}\n", name, fx.subnet.to_string(), fx.attacker_ip.to_string());
    for (const auto& h : fx.hosts) {
      std::vector<std::string> ports;
      for (const auto& [port, svc] : h.services) ports.push_back(fmt::format("{}/{}", port, svc.service));
      std::cout << fmt::format("  {:<15} {:<10} {}\n", h.ip.to_string(), h.hostname, join(ports, " "));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pentestxx: approval-gated penetration test orchestration"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("pentestxx 0.3.0"));

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an engagement from recon to report");
  run_cmd->add_option("--backend", run.backend, "sim or live")->check(CLI::IsMember({"sim", "live"}));
  run_cmd->add_option("--fixture", run.fixture, "Builtin fixture (vm1, vm2, lab) or YAML path; sim only");
  run_cmd->add_option("--scope", run.scope, "Subnet to scan, CIDR");
  run_cmd->add_option("--target", run.target, "Preselect this target address");
  run_cmd->add_flag("--auto-approve", run.auto_approve, "Grant every gate with its default (lab use only)");
  run_cmd->add_option("--wordlist-dir", run.wordlist_dir, "Directory with *.txt password lists and dirb/common.txt");
  run_cmd->add_option("--report", run.report, "Comma-separated report formats: text,json");
  run_cmd->add_option("--workspace", run.workspace, "Run directory (default ./pentestxx-runs/<session>)");
  run_cmd->add_option("--exclude", run.exclude, "Addresses never treated as targets");
  run_cmd->add_option("--listener-port", run.listener_port, "Reverse shell listener port")->check(CLI::Range(1, 65535));
  run_cmd->add_option("--advisor-endpoint", run.advisor_endpoint,
                      "Chat-completions URL; key read from PENTESTXX_ADVISOR_KEY");
  run_cmd->add_option("--serve", run.serve_port, "Also expose the control API on this port (0 = any)");
  run_cmd->add_option("--host", run.host, "Control API bind address");
  run_cmd->add_option("--token", run.token, "Control API bearer token (else PENTESTXX_API_TOKEN, else generated)");
  run_cmd->add_flag("--json-events", run.json_events, "Print raw NDJSON events");
  run_cmd->add_flag("-v,--verbose", run.verbose, "Show tool output and every event");

  std::string host = "127.0.0.1", token;
  int port = 8765;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the control API");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port (0 = any)");
  serve_cmd->add_option("--token", token, "Bearer token (else PENTESTXX_API_TOKEN, else generated)");

  std::string log_path;
  auto* verify_cmd = app.add_subcommand("verify-log", "Check a persisted events.ndjson for gate soundness");
  verify_cmd->add_option("events", log_path, "Path to events.ndjson")->required()->check(CLI::ExistingFile);

  std::string show;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "List builtin lab fixtures");
  fixtures_cmd->add_option("--show", show, "Print one fixture document");

  CLI11_PARSE(app, argc, argv);
  install_signal_handlers();

  try {
    if (*run_cmd) return cmd_run(run);
    if (*serve_cmd) return cmd_serve(host, port, token);
    if (*verify_cmd) return cmd_verify(log_path);
    if (*fixtures_cmd) return cmd_fixtures(show);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
