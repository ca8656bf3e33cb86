#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pentestxx/engine/session.hpp"

namespace pentestxx::testing {

/// Per-test scratch directory under the build tree, emptied on creation.
std::filesystem::path scratch_dir(const std::string& name);

/// Reads a file from tests/golden.
std::string golden(const std::string& name);

/// Fake clock: fixed start, one millisecond per call.
engine::Clock stepping_clock(std::chrono::system_clock::time_point start);
std::chrono::system_clock::time_point fixed_epoch();  // 2024-11-20T09:00:00Z

/// Answers one gate. nullopt means "use the default grant".
using GatePolicy = std::function<std::optional<engine::Decision>(const engine::ApprovalRequest&)>;

struct ScenarioResult {
  engine::SessionStatus status = engine::SessionStatus::created;
  std::vector<engine::Event> events;
  std::vector<engine::Finding> findings;
  std::optional<report::ReportDocument> report;
  std::filesystem::path workspace;
  double seconds = 0.0;
};

struct ScenarioOptions {
  std::string fixture = "vm1";
  std::filesystem::path workspace;  // required
  bool auto_approve = true;
  GatePolicy policy;                // used when auto_approve is false
  bool fixed_clock = true;
  std::optional<std::string> target;
};

/// Runs a sim session to completion and collects what it left behind.
ScenarioResult run_scenario(const ScenarioOptions& opts);

/// Kinds of the events, in order.
std::vector<std::string> kinds(const std::vector<engine::Event>& events);

/// Index of the first finding at or after `from` matching pred, or npos.
std::size_t find_finding(const std::vector<engine::Finding>& findings, std::size_t from,
                         const std::function<bool(const engine::Finding&)>& pred);

std::string read_file(const std::filesystem::path& p);

/// report.json with the date and period replaced by a placeholder everywhere.
nlohmann::json normalized_report(const nlohmann::json& report);

}  // namespace pentestxx::testing
