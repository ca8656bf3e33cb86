#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pentestxx/common/ipv4.hpp"

namespace pentestxx::engine {

enum class FindingKind {
  live_host,
  port,
  directory,
  artifact_file,
  hash,
  credential,
  username,
  export_share,  // "export" on the wire
  vulnerability,
  shell_access,
};

const char* to_string(FindingKind k);
std::optional<FindingKind> finding_kind_from_string(std::string_view s);

struct Finding {
  FindingKind kind = FindingKind::live_host;
  nlohmann::json value = nlohmann::json::object();
  std::uint64_t produced_by = 0;  // seq of the event that produced it
  Ipv4 target_ip;

  friend bool operator==(const Finding&, const Finding&) = default;
};

nlohmann::json to_json(const Finding& f);
Finding finding_from_json(const nlohmann::json& j);

/// The finding with provenance stripped; what two identical runs must agree on.
nlohmann::json comparable(const Finding& f);

}  // namespace pentestxx::engine
