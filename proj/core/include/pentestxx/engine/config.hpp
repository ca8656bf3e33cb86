#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pentestxx/common/ipv4.hpp"

namespace pentestxx::engine {

enum class BackendKind { sim, live };

struct EngineConfig {
  BackendKind backend = BackendKind::sim;
  std::string fixture = "vm1";              // sim only: builtin name or YAML path
  std::optional<std::string> scope;         // CIDR; detected when absent
  std::optional<Ipv4> target;               // preselected target
  bool auto_approve = false;
  std::filesystem::path wordlist_dir;       // *.txt password lists, dirb/common.txt
  std::vector<Ipv4> excluded_ips;
  int listener_port = 6655;
  std::set<std::string> report_formats{"text", "json"};
  std::filesystem::path workspace;          // created when empty
  std::optional<std::string> advisor_endpoint;  // live advisor; mock when absent
};

/// Accepts the API body shape documented in docs/api.md. Throws
/// Error(invalid_argument) naming the offending field.
EngineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EngineConfig& c);

/// The data directory shipped with the project (wordlists, fixtures).
std::filesystem::path default_data_dir();

}  // namespace pentestxx::engine
