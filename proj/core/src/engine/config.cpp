#include "pentestxx/engine/config.hpp"

#include <cstdlib>

#include "pentestxx/common/error.hpp"
#include "pentestxx/netcalc/netcalc.hpp"

#ifndef PENTESTXX_SOURCE_DATA_DIR
#define PENTESTXX_SOURCE_DATA_DIR ""
#endif
#ifndef PENTESTXX_INSTALL_DATA_DIR
#define PENTESTXX_INSTALL_DATA_DIR ""
#endif

namespace pentestxx::engine {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::invalid_argument, "config." + field + ": " + why);
}

template <typename T>
T field(const nlohmann::json& j, const char* key, nlohmann::json::value_t type, const char* type_name) {
  const auto& v = j.at(key);
  bool ok = v.type() == type || (type == nlohmann::json::value_t::number_integer && v.is_number_integer());
  if (!ok) bad(key, std::string("expected ") + type_name);
  return v.get<T>();
}

Ipv4 ip_field(const std::string& name, const nlohmann::json& v) {
  if (!v.is_string()) bad(name, "expected an IPv4 string");
  auto ip = Ipv4::try_parse(v.get<std::string>());
  if (!ip) bad(name, "invalid IPv4 address '" + v.get<std::string>() + "'");
  return *ip;
}

}  // namespace

EngineConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "config must be a JSON object");
  static const std::set<std::string> known{"backend",      "fixture",       "scope",          "target",
                                           "auto_approve", "wordlist_dir",  "excluded_ips",   "listener_port",
                                           "report_formats", "workspace",   "advisor_endpoint"};
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) bad(k, "unknown field");
  }
  EngineConfig c;
  using vt = nlohmann::json::value_t;
  if (j.contains("backend")) {
    auto b = field<std::string>(j, "backend", vt::string, "a string");
    if (b == "sim") c.backend = BackendKind::sim;
    else if (b == "live") c.backend = BackendKind::live;
    else bad("backend", "must be \"sim\" or \"live\"");
  }
  if (j.contains("fixture")) c.fixture = field<std::string>(j, "fixture", vt::string, "a string");
  if (j.contains("scope") && !j["scope"].is_null()) {
    auto s = field<std::string>(j, "scope", vt::string, "a CIDR string");
    try {
      (void)netcalc::parse_cidr(s);
    } catch (const Error& e) {
      bad("scope", e.what());
    }
    c.scope = s;
  }
  if (j.contains("target") && !j["target"].is_null()) c.target = ip_field("target", j["target"]);
  if (j.contains("auto_approve")) c.auto_approve = field<bool>(j, "auto_approve", vt::boolean, "a boolean");
  if (j.contains("wordlist_dir")) c.wordlist_dir = field<std::string>(j, "wordlist_dir", vt::string, "a string");
  if (j.contains("excluded_ips")) {
    if (!j["excluded_ips"].is_array()) bad("excluded_ips", "expected an array");
    for (const auto& v : j["excluded_ips"]) c.excluded_ips.push_back(ip_field("excluded_ips", v));
  }
  if (j.contains("listener_port")) {
    if (!j["listener_port"].is_number_integer()) bad("listener_port", "expected an integer");
    c.listener_port = j["listener_port"].get<int>();
    if (c.listener_port < 1 || c.listener_port > 65535) bad("listener_port", "out of range");
  }
  if (j.contains("report_formats")) {
    if (!j["report_formats"].is_array()) bad("report_formats", "expected an array");
    c.report_formats.clear();
    for (const auto& v : j["report_formats"]) {
      if (!v.is_string() || (v != "text" && v != "json")) bad("report_formats", "entries must be \"text\" or \"json\"");
      c.report_formats.insert(v.get<std::string>());
    }
  }
  if (j.contains("workspace")) c.workspace = field<std::string>(j, "workspace", vt::string, "a string");
  if (j.contains("advisor_endpoint") && !j["advisor_endpoint"].is_null()) {
    c.advisor_endpoint = field<std::string>(j, "advisor_endpoint", vt::string, "a string");
  }
  return c;
}

nlohmann::json to_json(const EngineConfig& c) {
  nlohmann::json j{{"backend", c.backend == BackendKind::sim ? "sim" : "live"},
                   {"fixture", c.fixture},
                   {"auto_approve", c.auto_approve},
                   {"wordlist_dir", c.wordlist_dir.string()},
                   {"listener_port", c.listener_port},
                   {"report_formats", c.report_formats},
                   {"workspace", c.workspace.string()}};
  j["scope"] = c.scope ? nlohmann::json(*c.scope) : nlohmann::json(nullptr);
  j["target"] = c.target ? nlohmann::json(c.target->to_string()) : nlohmann::json(nullptr);
  j["excluded_ips"] = nlohmann::json::array();
  for (auto ip : c.excluded_ips) j["excluded_ips"].push_back(ip.to_string());
  j["advisor_endpoint"] = c.advisor_endpoint ? nlohmann::json(*c.advisor_endpoint) : nlohmann::json(nullptr);
  return j;
}

std::filesystem::path default_data_dir() {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (const char* env = std::getenv("PENTESTXX_DATA_DIR"); env && *env) return env;
  for (const char* dir : {PENTESTXX_SOURCE_DATA_DIR, PENTESTXX_INSTALL_DATA_DIR}) {
    if (*dir && fs::is_directory(dir, ec)) return dir;
  }
  return "data";
}

}  // namespace pentestxx::engine
