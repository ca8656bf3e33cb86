#include "pentestxx/console.hpp"

#include <charconv>

#include <fmt/format.h>

#include "pentestxx/common/ipv4.hpp"
#include "pentestxx/common/strings.hpp"

namespace pentestxx::cli {

using nlohmann::json;

std::optional<engine::Decision> parse_reply(std::string_view reply, const engine::ApprovalRequest& req) {
  auto r = lower(trim(reply));
  engine::Decision d;
  d.source = engine::DecisionSource::console;
  if (r.empty() || r == "y" || r == "yes" || r == "grant") {
    d.granted = true;
    d.params = {{"choice", 0}};
    return d;
  }
  if (r == "n" || r == "no" || r == "deny") return d;

  std::size_t n = 0;
  auto [end, ec] = std::from_chars(r.data(), r.data() + r.size(), n);
  if (ec == std::errc{} && end == r.data() + r.size()) {
    if (n < 1 || n > std::max<std::size_t>(req.options.size(), 1)) return std::nullopt;
    d.granted = true;
    d.params = {{"choice", n - 1}};
    return d;
  }

  std::string raw(trim(reply));
  if (auto slash = raw.find('/'); slash != std::string::npos && raw.find('=') == std::string::npos) {
    if (!Ipv4::try_parse(raw.substr(0, slash))) return std::nullopt;
    d.granted = true;
    d.params = {{"cidr", raw}};
    return d;
  }

  if (raw.find('=') != std::string::npos) {
    d.granted = true;
    for (auto part : split(raw, ';')) {
      auto kv = trim(part);
      if (kv.empty()) continue;
      auto eq = kv.find('=');
      if (eq == std::string_view::npos || eq == 0) return std::nullopt;
      d.params[std::string(trim(kv.substr(0, eq)))] = std::string(trim(kv.substr(eq + 1)));
    }
    if (d.params.contains("choice")) {
      auto c = d.params["choice"].get<std::string>();
      std::size_t v = 0;
      auto [e2, ec2] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec2 != std::errc{} || e2 != c.data() + c.size()) return std::nullopt;
      d.params["choice"] = v;
    } else {
      d.params["choice"] = 0;
    }
    return d;
  }
  return std::nullopt;
}

std::string render_prompt(const engine::ApprovalRequest& req) {
  std::string s = fmt::format("\n[approval {}] {}\n  > {}\n", req.id, req.description, req.command_preview);
  for (std::size_t i = 0; i < req.options.size(); ++i) s += fmt::format("    {}) {}\n", i + 1, req.options[i]);
  if (req.kind == "confirm_subnet") s += "  y = scan, n = stop, or type another CIDR\n";
  else if (req.kind == "report_metadata") s += "  y = accept, or author=...; date=YYYY-MM-DD; period=...\n";
  else if (!req.options.empty()) s += "  number = choose, y = first, n = deny\n";
  else s += "  y = grant, n = deny\n";
  s += "  decision: ";
  return s;
}

namespace {

std::string str(const json& p, const char* key) {
  auto it = p.find(key);
  if (it == p.end() || it->is_null()) return {};
  return it->is_string() ? it->get<std::string>() : it->dump();
}

}  // namespace

std::string render_event(const engine::Event& e, bool verbose) {
  const auto& p = e.payload;
  auto head = fmt::format("[{:>4}] {:<14}", e.seq, to_string(e.phase));
  const auto& k = e.kind;
  if (k == "phase_changed") return fmt::format("\n==== {} ====", str(p, "phase"));
  if (k == "command_started") return head + " $ " + str(p, "display_line");
  if (k == "command_finished") {
    auto d = p.find("duration_seconds");
    double secs = d != p.end() && d->is_number() ? d->get<double>() : 0.0;
    auto line = head + fmt::format(" exit {} ({:.2f}s)", str(p, "exit_status"), secs);
    if (verbose) line += "\n" + str(p, "stdout");
    return line;
  }
  if (k == "command_failed") return head + " ! " + str(p, "error");
  if (k == "table") return fmt::format("{}\n{}", str(p, "title"), str(p, "text"));
  if (k == "finding") return head + fmt::format(" + {} {}", str(p, "kind"), p.contains("value") ? p["value"].dump() : "");
  if (k == "note" || k == "warning") return head + " " + k + ": " + str(p, k == "note" ? "text" : "message");
  if (k == "approval_decided") return head + fmt::format(" {} {} ({})", str(p, "approval_id"), str(p, "decision"), str(p, "source"));
  if (k == "step_skipped") return head + " skipped: " + str(p, "display_line");
  if (k == "vector_started") return head + fmt::format(" >> {} on port {}", str(p, "vector"), str(p, "port"));
  if (k == "vector_failed") return head + fmt::format(" {} failed: {}", str(p, "vector"), str(p, "error"));
  if (k == "shell_connected") return head + " shell: " + str(p, "banner");
  if (k == "report_written") return head + " report: " + str(p, "path");
  if (k == "error") return head + " error: " + str(p, "message");
  if (k == "session_finished") return head + " finished: " + str(p, "status");
  if (k == "approval_requested" || k == "command_finished") return {};
  return verbose ? head + " " + k + " " + p.dump() : std::string{};
}

}  // namespace pentestxx::cli
