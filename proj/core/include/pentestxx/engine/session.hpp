#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "pentestxx/advisor/advisor.hpp"
#include "pentestxx/engine/approvals.hpp"
#include "pentestxx/engine/config.hpp"
#include "pentestxx/engine/events.hpp"
#include "pentestxx/engine/findings.hpp"
#include "pentestxx/netcalc/netcalc.hpp"
#include "pentestxx/report/report.hpp"
#include "pentestxx/toolio/backend.hpp"

namespace pentestxx::engine {

enum class SessionStatus { created, running, completed, no_targets, failed, cancelled };

const char* to_string(SessionStatus s);

struct SessionSnapshot {
  std::string id;
  Phase phase = Phase::recon;
  SessionStatus status = SessionStatus::created;
  std::optional<std::string> scope;
  std::optional<Ipv4> attacker_ip;
  std::optional<Ipv4> target;
  std::vector<netcalc::HostRecord> hosts;
  std::vector<Finding> findings;
  std::vector<ApprovalRequest> pending_approvals;
  std::uint64_t last_seq = 0;
  bool report_ready = false;
  std::string error;
};

nlohmann::json to_json(const SessionSnapshot& s);

/// One engagement. The orchestrator is the only writer; snapshot(), the event
/// log and the approval broker are safe to use from other threads.
class Session {
 public:
  Session(EngineConfig config, std::unique_ptr<toolio::ToolBackend> backend,
          std::unique_ptr<advisor::Advisor> advisor, Clock clock = {});
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }
  const EngineConfig& config() const { return config_; }
  const std::filesystem::path& workspace() const { return workspace_; }

  /// Runs all phases on the calling thread. Never throws; the outcome is in
  /// status() and the event log.
  void run();
  /// run() on a background thread.
  void start();
  void join();
  /// Unblocks any pending gate and stops at the next step boundary.
  void cancel();

  SessionSnapshot snapshot() const;
  Phase phase() const;
  SessionStatus status() const;
  bool finished() const;

  EventLog& events() { return events_; }
  const EventLog& events() const { return events_; }
  ApprovalBroker& approvals() { return approvals_; }

  std::optional<report::ReportDocument> report() const;
  /// Rebuilds the report with operator notes. Requires report().
  std::optional<report::ReportDocument> regenerate_report(std::string_view notes);

 private:
  friend class Orchestrator;

  std::string id_;
  EngineConfig config_;
  std::filesystem::path workspace_;
  std::unique_ptr<toolio::ToolBackend> backend_;
  std::unique_ptr<advisor::Advisor> advisor_;
  EventLog events_;
  ApprovalBroker approvals_;

  mutable std::mutex mu_;  // guards everything below
  Phase phase_ = Phase::recon;
  SessionStatus status_ = SessionStatus::created;
  std::optional<std::string> scope_;
  std::optional<Ipv4> attacker_ip_;
  std::optional<Ipv4> target_;
  std::vector<netcalc::HostRecord> hosts_;
  std::vector<Finding> findings_;
  std::optional<report::ReportDocument> report_;
  std::optional<report::ReportInput> report_input_;
  std::string error_;

  std::atomic<bool> cancelled_{false};
  std::thread worker_;
};

/// Builds backend and advisor from the config (sim fixture or live tools).
/// Throws Error on an unknown fixture or unusable config.
std::unique_ptr<Session> make_session(EngineConfig config, Clock clock = {});

}  // namespace pentestxx::engine
