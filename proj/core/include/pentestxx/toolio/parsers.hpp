#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pentestxx/netcalc/netcalc.hpp"
#include "pentestxx/toolio/command.hpp"

// Line-oriented parsers for human-readable tool output. None of them throw on
// arbitrary input: unrecognized lines that look like they should have parsed
// are reported as diagnostics and skipped.

namespace pentestxx::toolio {

template <typename T>
struct ParseResult {
  std::vector<T> items;
  std::vector<std::string> diagnostics;
};

enum class Protocol { tcp, udp };
enum class PortStatus { open, closed, filtered };

const char* to_string(Protocol p);
const char* to_string(PortStatus s);

struct PortFinding {
  int port = 0;
  Protocol protocol = Protocol::tcp;
  PortStatus status = PortStatus::open;
  std::string service;
  std::string version;

  friend bool operator==(const PortFinding&, const PortFinding&) = default;
};

struct DirectoryHit {
  std::string path;  // always begins with '/'
  int http_status = 0;

  friend bool operator==(const DirectoryHit&, const DirectoryHit&) = default;
};

struct CrackResult {
  std::string target;
  std::optional<std::string> plaintext;
  std::string wordlist;
  long long attempts = 0;

  friend bool operator==(const CrackResult&, const CrackResult&) = default;
};

struct ExportEntry {
  std::string export_path;
  std::string allowed_clients;

  friend bool operator==(const ExportEntry&, const ExportEntry&) = default;
};

struct HydraHit {
  std::string host;
  int port = 0;
  std::string login;
  std::string password;

  friend bool operator==(const HydraHit&, const HydraHit&) = default;
};

struct PasswdEntry {
  std::string name;
  int uid = -1;
  int gid = -1;
  std::string home;
  std::string shell;

  bool has_login_shell() const;
  friend bool operator==(const PasswdEntry&, const PasswdEntry&) = default;
};

struct WordlistInfo {
  std::string path;
  long long entries = 0;
};

ParseResult<netcalc::HostRecord> parse_ping_scan(const ToolOutput& out);
ParseResult<PortFinding> parse_full_scan(const ToolOutput& out);
ParseResult<DirectoryHit> parse_dir_scan(const ToolOutput& out);
ParseResult<ExportEntry> parse_export_list(const ToolOutput& out);
ParseResult<HydraHit> parse_hydra(const ToolOutput& out);
ParseResult<PasswdEntry> parse_passwd(std::string_view text);

/// Handles hashcat ("<hash>:<plain>") and john ("<plain> (<name>)") result
/// lines. An exhausted run yields no plaintext and attempts == wordlist.entries.
CrackResult parse_crack_result(const ToolOutput& out, std::string_view target, const WordlistInfo& wordlist = {});

/// Plain name-per-line listing (curl -l, find).
std::vector<std::string> parse_name_list(std::string_view text);

/// True when nmap reported the host as down.
bool full_scan_host_down(const ToolOutput& out);

}  // namespace pentestxx::toolio
