#include "pentestxx/toolio/parsers.hpp"

#include <charconv>
#include <regex>

#include "pentestxx/common/strings.hpp"

namespace pentestxx::toolio {

namespace {

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  int number = 0;
  for (auto line : split_lines(text)) {
    ++number;
    // Progress-bar style output rewrites the line with carriage returns.
    if (auto cr = line.rfind('\r'); cr != std::string_view::npos) line = line.substr(cr + 1);
    fn(number, line);
  }
}

std::string diag(int line, std::string_view what, std::string_view text) {
  std::string out = "line " + std::to_string(line) + ": " + std::string(what) + ": '";
  out += text.substr(0, 120);
  out += "'";
  return out;
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

const char* to_string(Protocol p) { return p == Protocol::tcp ? "tcp" : "udp"; }

const char* to_string(PortStatus s) {
  switch (s) {
    case PortStatus::open: return "open";
    case PortStatus::closed: return "closed";
    case PortStatus::filtered: return "filtered";
  }
  return "filtered";
}

bool PasswdEntry::has_login_shell() const {
  return !shell.empty() && !shell.ends_with("nologin") && !shell.ends_with("/false") && !shell.ends_with("/sync");
}

ParseResult<netcalc::HostRecord> parse_ping_scan(const ToolOutput& out) {
  static const std::regex report_re(R"(^Nmap scan report for (?:(\S+) \(([^)]*)\)|(\S+))\s*$)");
  ParseResult<netcalc::HostRecord> result;
  for_each_line(out.stdout_text, [&](int n, std::string_view line) {
    if (!line.starts_with("Nmap scan report for")) return;
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(line.begin(), line.end(), m, report_re)) {
      result.diagnostics.push_back(diag(n, "unrecognized scan report line", line));
      return;
    }
    std::string candidate = m[2].matched ? m[2].str() : m[3].str();
    auto ip = Ipv4::try_parse(candidate);
    if (!ip) {
      result.diagnostics.push_back(diag(n, "scan report without an IPv4 address", line));
      return;
    }
    result.items.push_back({*ip, netcalc::HostRole::candidate_target, true});
  });
  return result;
}

ParseResult<PortFinding> parse_full_scan(const ToolOutput& out) {
  static const std::regex port_re(R"(^(\d{1,5})/(tcp|udp)\s+(\S+)\s+(\S+)(?:\s+(.*?))?\s*$)");
  static const std::regex looks_like_port(R"(^\d+/\w+\s)");
  ParseResult<PortFinding> result;
  for_each_line(out.stdout_text, [&](int n, std::string_view line) {
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(line.begin(), line.end(), m, port_re)) {
      if (std::regex_search(line.begin(), line.end(), looks_like_port)) {
        result.diagnostics.push_back(diag(n, "malformed port line", line));
      }
      return;
    }
    auto port = to_int(std::string_view(&*m[1].first, m[1].length()));
    if (!port || *port < 1 || *port > 65535) {
      result.diagnostics.push_back(diag(n, "port out of range", line));
      return;
    }
    PortFinding pf;
    pf.port = *port;
    pf.protocol = m[2].str() == "tcp" ? Protocol::tcp : Protocol::udp;
    const std::string state = m[3].str();
    if (state == "open") {
      pf.status = PortStatus::open;
    } else if (state == "closed") {
      pf.status = PortStatus::closed;
    } else if (state == "filtered" || state == "open|filtered" || state == "closed|filtered") {
      pf.status = PortStatus::filtered;
    } else {
      result.diagnostics.push_back(diag(n, "unknown port state", line));
      return;
    }
    pf.service = m[4].str();
    pf.version = m[5].matched ? m[5].str() : std::string{};
    result.items.push_back(std::move(pf));
  });
  return result;
}

bool full_scan_host_down(const ToolOutput& out) {
  return out.stdout_text.find("Host seems down") != std::string::npos ||
         out.stdout_text.find("(0 hosts up)") != std::string::npos;
}

ParseResult<DirectoryHit> parse_dir_scan(const ToolOutput& out) {
  static const std::regex hit_re(R"(^\s*(/\S*)\s+\(Status:\s*(\d{3})\))");
  ParseResult<DirectoryHit> result;
  for_each_line(out.stdout_text, [&](int n, std::string_view line) {
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(line.begin(), line.end(), m, hit_re)) {
      result.items.push_back({m[1].str(), std::stoi(m[2].str())});
    } else if (trim(line).starts_with('/') && line.find("Status") != std::string_view::npos) {
      result.diagnostics.push_back(diag(n, "malformed result line", line));
    }
  });
  return result;
}

ParseResult<ExportEntry> parse_export_list(const ToolOutput& out) {
  ParseResult<ExportEntry> result;
  for_each_line(out.stdout_text, [&](int n, std::string_view raw) {
    auto line = trim(raw);
    if (line.empty() || line.starts_with("Export list for")) return;
    if (!line.starts_with('/')) {
      result.diagnostics.push_back(diag(n, "not an export line", line));
      return;
    }
    auto ws = line.find_first_of(" \t");
    ExportEntry e;
    e.export_path = std::string(line.substr(0, ws));
    e.allowed_clients = ws == std::string_view::npos ? std::string{} : std::string(trim(line.substr(ws)));
    result.items.push_back(std::move(e));
  });
  return result;
}

ParseResult<HydraHit> parse_hydra(const ToolOutput& out) {
  static const std::regex hit_re(
      R"(^\[(\d+)\]\[[\w-]+\]\s+host:\s+(\S+)\s+login:\s+(\S+)\s+password:\s?(.*)$)");
  ParseResult<HydraHit> result;
  for_each_line(out.stdout_text, [&](int n, std::string_view line) {
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_match(line.begin(), line.end(), m, hit_re)) {
      result.items.push_back({m[2].str(), std::stoi(m[1].str()), m[3].str(), m[4].str()});
    } else if (line.starts_with("[") && line.find("login:") != std::string_view::npos &&
               line.find("password:") != std::string_view::npos && !line.starts_with("[ATTEMPT]")) {
      result.diagnostics.push_back(diag(n, "malformed hydra result", line));
    }
  });
  return result;
}

ParseResult<PasswdEntry> parse_passwd(std::string_view text) {
  ParseResult<PasswdEntry> result;
  for_each_line(text, [&](int n, std::string_view line) {
    auto fields = split(line, ':');
    if (fields.size() != 7) return;  // surrounding HTML or prose
    PasswdEntry e;
    e.name = std::string(fields[0]);
    auto uid = to_int(fields[2]);
    auto gid = to_int(fields[3]);
    if (e.name.empty() || !uid || !gid) {
      result.diagnostics.push_back(diag(n, "malformed passwd entry", line));
      return;
    }
    // Tolerate markup glued to the first entry, e.g. "<pre>root".
    if (auto gt = e.name.rfind('>'); gt != std::string::npos) e.name = e.name.substr(gt + 1);
    e.uid = *uid;
    e.gid = *gid;
    e.home = std::string(fields[5]);
    e.shell = std::string(trim(fields[6]));
    if (auto lt = e.shell.find('<'); lt != std::string::npos) e.shell = e.shell.substr(0, lt);
    result.items.push_back(std::move(e));
  });
  return result;
}

CrackResult parse_crack_result(const ToolOutput& out, std::string_view target, const WordlistInfo& wordlist) {
  static const std::regex progress_re(R"(^Progress\.*:\s*(\d+)/(\d+))");
  CrackResult r;
  r.target = std::string(target);
  r.wordlist = wordlist.path;
  long long progress = -1;
  const std::string hash_prefix = lower(target) + ":";
  for_each_line(out.stdout_text, [&](int, std::string_view line) {
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(line.begin(), line.end(), m, progress_re)) {
      progress = std::stoll(m[1].str());
      return;
    }
    if (r.plaintext) return;
    if (lower(line).starts_with(hash_prefix) && line.size() > hash_prefix.size()) {
      r.plaintext = std::string(line.substr(hash_prefix.size()));
      return;
    }
    // john: "<plain><spaces>(<name>)", where name is the target or target/member.
    if (line.ends_with(')')) {
      auto open = line.rfind(" (");
      if (open == std::string_view::npos) return;
      auto name = line.substr(open + 2, line.size() - open - 3);
      if (name == target || (name.starts_with(target) && name.size() > target.size() && name[target.size()] == '/')) {
        auto plain = rtrim(line.substr(0, open));
        if (!plain.empty()) r.plaintext = std::string(plain);
      }
    }
  });
  if (!r.plaintext) {
    r.attempts = wordlist.entries;
  } else {
    r.attempts = progress >= 0 ? progress : wordlist.entries;
  }
  return r;
}

std::vector<std::string> parse_name_list(std::string_view text) {
  std::vector<std::string> names;
  for_each_line(text, [&](int, std::string_view line) {
    auto t = trim(line);
    if (!t.empty()) names.emplace_back(t);
  });
  return names;
}

}  // namespace pentestxx::toolio
