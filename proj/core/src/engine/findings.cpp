#include "pentestxx/engine/findings.hpp"

#include "pentestxx/common/error.hpp"

namespace pentestxx::engine {

namespace {
constexpr const char* kKindNames[] = {"live_host", "port",   "directory",     "artifact_file", "hash",
                                      "credential", "username", "export", "vulnerability", "shell_access"};
}

const char* to_string(FindingKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<FindingKind> finding_kind_from_string(std::string_view s) {
  for (int i = 0; i < 10; ++i) {
    if (s == kKindNames[i]) return static_cast<FindingKind>(i);
  }
  return std::nullopt;
}

nlohmann::json to_json(const Finding& f) {
  return {{"kind", to_string(f.kind)},
          {"value", f.value},
          {"produced_by", f.produced_by},
          {"target_ip", f.target_ip.to_string()}};
}

Finding finding_from_json(const nlohmann::json& j) {
  try {
    Finding f;
    auto kind = finding_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::parse_error, "unknown finding kind " + j.at("kind").dump());
    f.kind = *kind;
    f.value = j.at("value");
    f.produced_by = j.at("produced_by").get<std::uint64_t>();
    f.target_ip = Ipv4::parse(j.at("target_ip").get<std::string>());
    return f;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::parse_error, std::string("malformed finding: ") + ex.what());
  }
}

nlohmann::json comparable(const Finding& f) {
  return {{"kind", to_string(f.kind)}, {"value", f.value}, {"target_ip", f.target_ip.to_string()}};
}

}  // namespace pentestxx::engine
