#include "pentestxx/engine/session.hpp"

#include <random>

#include <fmt/format.h>

#include "pentestxx/common/error.hpp"
#include "pentestxx/labsim/sim_backend.hpp"
#include "orchestrator.hpp"

namespace pentestxx::engine {

namespace fs = std::filesystem;

const char* to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::created: return "created";
    case SessionStatus::running: return "running";
    case SessionStatus::completed: return "completed";
    case SessionStatus::no_targets: return "no_targets";
    case SessionStatus::failed: return "failed";
    case SessionStatus::cancelled: return "cancelled";
  }
  return "created";
}

namespace {

std::string random_id() {
  std::random_device rd;
  std::uniform_int_distribution<int> nibble(0, 15);
  std::string id;
  for (int i = 0; i < 16; ++i) id.push_back("0123456789abcdef"[nibble(rd)]);
  return id;
}

}  // namespace

nlohmann::json to_json(const SessionSnapshot& s) {
  nlohmann::json j{{"session_id", s.id},
                   {"phase", to_string(s.phase)},
                   {"status", to_string(s.status)},
                   {"last_seq", s.last_seq},
                   {"report_ready", s.report_ready}};
  j["scope"] = s.scope ? nlohmann::json(*s.scope) : nlohmann::json(nullptr);
  j["attacker_ip"] = s.attacker_ip ? nlohmann::json(s.attacker_ip->to_string()) : nlohmann::json(nullptr);
  j["target"] = s.target ? nlohmann::json(s.target->to_string()) : nlohmann::json(nullptr);
  j["hosts"] = nlohmann::json::array();
  for (const auto& h : s.hosts) {
    j["hosts"].push_back({{"ip", h.ip.to_string()}, {"role", netcalc::to_string(h.role)}, {"alive", h.alive}});
  }
  j["findings"] = nlohmann::json::array();
  for (const auto& f : s.findings) j["findings"].push_back(to_json(f));
  j["pending_approvals"] = nlohmann::json::array();
  for (const auto& a : s.pending_approvals) j["pending_approvals"].push_back(to_json(a));
  j["error"] = s.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(s.error);
  return j;
}

Session::Session(EngineConfig config, std::unique_ptr<toolio::ToolBackend> backend,
                 std::unique_ptr<advisor::Advisor> advisor, Clock clock)
    : id_(random_id()),
      config_(std::move(config)),
      backend_(std::move(backend)),
      advisor_(advisor ? std::move(advisor) : advisor::make_mock_advisor()),
      events_(std::move(clock)),
      approvals_(config_.auto_approve) {
  if (!backend_) throw Error(ErrorCode::invalid_argument, "session needs a tool backend");
  if (config_.wordlist_dir.empty()) config_.wordlist_dir = default_data_dir() / "wordlists";
  workspace_ = config_.workspace.empty() ? fs::current_path() / "pentestxx-runs" / id_ : config_.workspace;
  std::error_code ec;
  fs::create_directories(workspace_, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create workspace " + workspace_.string() + ": " + ec.message());
  workspace_ = fs::canonical(workspace_);
  events_.persist_to(workspace_ / "events.ndjson");
}

Session::~Session() {
  cancel();
  join();
}

void Session::run() {
  {
    std::lock_guard lock(mu_);
    if (status_ != SessionStatus::created) return;
    status_ = SessionStatus::running;
  }
  Orchestrator(*this).run();
}

void Session::start() {
  if (worker_.joinable()) return;
  worker_ = std::thread([this] { run(); });
}

void Session::join() {
  if (worker_.joinable() && worker_.get_id() != std::this_thread::get_id()) worker_.join();
}

void Session::cancel() {
  cancelled_ = true;
  approvals_.cancel();
}

SessionSnapshot Session::snapshot() const {
  std::lock_guard lock(mu_);
  SessionSnapshot s;
  s.id = id_;
  s.phase = phase_;
  s.status = status_;
  s.scope = scope_;
  s.attacker_ip = attacker_ip_;
  s.target = target_;
  s.hosts = hosts_;
  s.findings = findings_;
  s.pending_approvals = approvals_.pending();
  s.last_seq = events_.last_seq();
  s.report_ready = report_.has_value();
  s.error = error_;
  return s;
}

Phase Session::phase() const {
  std::lock_guard lock(mu_);
  return phase_;
}

SessionStatus Session::status() const {
  std::lock_guard lock(mu_);
  return status_;
}

bool Session::finished() const {
  auto s = status();
  return s != SessionStatus::created && s != SessionStatus::running;
}

std::optional<report::ReportDocument> Session::report() const {
  std::lock_guard lock(mu_);
  return report_;
}

std::optional<report::ReportDocument> Session::regenerate_report(std::string_view notes) {
  std::lock_guard lock(mu_);
  if (!report_input_) return std::nullopt;
  report_ = report::regenerate_report(*report_input_, notes, advisor_.get());
  return report_;
}

std::unique_ptr<Session> make_session(EngineConfig config, Clock clock) {
  std::unique_ptr<toolio::ToolBackend> backend;
  if (config.backend == BackendKind::sim) {
    auto fixture = std::make_shared<const labsim::LabFixture>(labsim::resolve_fixture(config.fixture));
    backend = labsim::make_sim_backend(std::move(fixture));
  } else {
    backend = toolio::make_live_backend();
  }
  std::unique_ptr<advisor::Advisor> adv;
  // The wire log needs the session, which needs the advisor; bind late.
  auto owner = std::make_shared<Session*>(nullptr);
  if (config.advisor_endpoint) {
    auto tc = advisor::transport_config_from_env(*config.advisor_endpoint);
    if (!tc) throw Error(ErrorCode::invalid_argument, "advisor endpoint given but PENTESTXX_ADVISOR_KEY is not set");
    advisor::AdvisorLog log = [owner](std::string_view kind, const nlohmann::json& payload) {
      if (Session* s = *owner) s->events().append(s->phase(), std::string(kind) + "_wire", payload);
    };
    adv = advisor::make_live_advisor(advisor::make_http_transport(*tc), tc->model, std::move(log));
  }
  auto session = std::make_unique<Session>(std::move(config), std::move(backend), std::move(adv), std::move(clock));
  *owner = session.get();
  return session;
}

}  // namespace pentestxx::engine
