#include "pentestxx/labsim/fixture.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pentestxx/common/error.hpp"

namespace pentestxx::labsim {

namespace detail {
const std::map<std::string, std::string>& embedded_fixture_documents();
}

namespace {

std::string normalize_path(std::string_view p) {
  std::string out(p);
  while (out.size() > 1 && out.ends_with('/')) out.pop_back();
  return out;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  int line = node.IsDefined() ? node.Mark().line + 1 : 0;
  throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

const YAML::Node require(const YAML::Node& parent, const char* key) {
  auto child = parent[key];
  if (!child.IsDefined() || child.IsNull()) fail(parent, std::string("missing required key '") + key + "'");
  return child;
}

std::string text(const YAML::Node& node, const char* key) {
  auto child = require(node, key);
  if (!child.IsScalar()) fail(child, std::string("'") + key + "' must be a scalar");
  return child.as<std::string>();
}

std::string text_or(const YAML::Node& node, const char* key, std::string fallback) {
  auto child = node[key];
  if (!child.IsDefined() || child.IsNull()) return fallback;
  if (!child.IsScalar()) fail(child, std::string("'") + key + "' must be a scalar");
  return child.as<std::string>();
}

int integer(const YAML::Node& node, const char* key) {
  auto child = require(node, key);
  try {
    return child.as<int>();
  } catch (const YAML::Exception&) {
    fail(child, std::string("'") + key + "' must be an integer");
  }
}

bool boolean_or(const YAML::Node& node, const char* key, bool fallback) {
  auto child = node[key];
  if (!child.IsDefined() || child.IsNull()) return fallback;
  try {
    return child.as<bool>();
  } catch (const YAML::Exception&) {
    fail(child, std::string("'") + key + "' must be true or false");
  }
}

Ipv4 address(const YAML::Node& node, const char* key) {
  auto value = text(node, key);
  auto ip = Ipv4::try_parse(value);
  if (!ip) fail(node[key], "invalid IPv4 address '" + value + "'");
  return *ip;
}

std::string url_path(const YAML::Node& node, const char* key) {
  auto p = text(node, key);
  if (!p.starts_with('/')) fail(node[key], std::string("'") + key + "' must start with '/'");
  return p;
}

Mechanism mechanism(const YAML::Node& node) {
  auto m = text(node, "mechanism");
  if (m == "ssh-password") return Mechanism::ssh_password;
  if (m == "ssh-key") return Mechanism::ssh_key;
  if (m == "http-form") return Mechanism::http_form;
  fail(node["mechanism"], "unknown credential mechanism '" + m + "' (ssh-password, ssh-key, http-form)");
}

// Joins a web root and a URL path into a tree path.
std::string under(const std::string& root, std::string_view url) {
  std::string p = normalize_path(root);
  if (url.empty() || url == "/") return p;
  if (!url.starts_with('/')) p += '/';
  p += url;
  return normalize_path(p);
}

void require_path(const SimHost& host, const std::string& path, const YAML::Node& where, const std::string& what) {
  if (!host.files.exists(path)) fail(where, what + " '" + path + "' does not exist in the host's file tree");
}

SimHost parse_host(const YAML::Node& node) {
  SimHost host;
  host.ip = address(node, "ip");
  host.hostname = text_or(node, "hostname", "");
  host.mac = text_or(node, "mac", "08:00:27:00:00:" + std::to_string(host.ip.value() & 0xff));

  if (auto services = node["services"]; services.IsDefined()) {
    if (!services.IsSequence()) fail(services, "'services' must be a list");
    for (const auto& s : services) {
      SimService svc;
      svc.port = integer(s, "port");
      if (svc.port < 1 || svc.port > 65535) fail(s["port"], "port " + std::to_string(svc.port) + " out of range");
      svc.protocol = text_or(s, "protocol", "tcp");
      if (svc.protocol != "tcp" && svc.protocol != "udp") fail(s["protocol"], "protocol must be tcp or udp");
      svc.service = text(s, "service");
      svc.version = text_or(s, "version", "");
      if (!host.services.emplace(svc.port, svc).second) fail(s, "duplicate service port " + std::to_string(svc.port));
    }
  }

  // Files first (archive members may reference other files), then resolve.
  std::vector<std::pair<YAML::Node, SimFile>> pending;
  if (auto files = node["files"]; files.IsDefined()) {
    if (!files.IsSequence()) fail(files, "'files' must be a list");
    for (const auto& f : files) {
      SimFile file;
      file.path = normalize_path(text(f, "path"));
      if (!file.path.starts_with('/')) fail(f["path"], "file paths must be absolute");
      file.directory = boolean_or(f, "directory", false);
      file.content = text_or(f, "content", "");
      if (auto a = f["archive"]; a.IsDefined()) {
        SimArchive archive;
        archive.password = text_or(a, "password", "");
        auto members = require(a, "members");
        if (!members.IsSequence()) fail(members, "'members' must be a list");
        for (const auto& m : members) {
          ArchiveMember member;
          member.name = text(m, "name");
          member.from = text_or(m, "from", "");
          member.content = text_or(m, "content", "");
          archive.members.push_back(std::move(member));
        }
        file.archive = std::move(archive);
      }
      pending.emplace_back(f, file);
    }
  }
  for (auto& [n, f] : pending) host.files.add(f);
  for (auto& [n, f] : pending) {
    if (!f.archive) continue;
    SimFile resolved = f;
    for (auto& m : resolved.archive->members) {
      if (m.from.empty()) continue;
      const auto* src = host.files.file(m.from);
      if (!src || src->directory) fail(n, "archive member source '" + m.from + "' does not exist in the host's file tree");
      m.content = src->content;
    }
    host.files.add(resolved);
  }

  if (auto creds = node["credentials"]; creds.IsDefined()) {
    if (!creds.IsSequence()) fail(creds, "'credentials' must be a list");
    for (const auto& c : creds) {
      SimCredential cred;
      cred.user = text(c, "user");
      cred.secret = text_or(c, "secret", "");
      cred.mechanism = mechanism(c);
      cred.target = text_or(c, "target", "");
      cred.key = text_or(c, "key", "");
      if (cred.mechanism == Mechanism::ssh_key) {
        if (cred.key.empty()) fail(c, "ssh-key credential needs 'key'");
        require_path(host, cred.key, c["key"], "key");
      }
      if (cred.mechanism == Mechanism::http_form && cred.target.empty()) fail(c, "http-form credential needs 'target'");
      host.credentials.push_back(std::move(cred));
    }
  }

  if (auto b = node["behaviors"]; b.IsDefined()) {
    host.behaviors.ftp_anonymous = boolean_or(b, "ftp_anonymous", false);
    host.behaviors.ftp_root = normalize_path(text_or(b, "ftp_root", "/srv/ftp"));
    if (host.behaviors.ftp_anonymous) {
      if (!host.services.contains(21)) fail(b, "ftp_anonymous set but no service on port 21");
      if (!host.files.is_directory(host.behaviors.ftp_root)) {
        fail(b, "ftp_root '" + host.behaviors.ftp_root + "' does not exist in the host's file tree");
      }
    }
    if (auto web = b["web"]; web.IsDefined()) {
      if (!web.IsSequence()) fail(web, "'web' must be a list");
      for (const auto& w : web) {
        WebSite site;
        site.port = integer(w, "port");
        site.root = normalize_path(text(w, "root"));
        if (!host.services.contains(site.port)) fail(w, "web site on port " + std::to_string(site.port) + " has no service");
        if (!host.files.is_directory(site.root)) fail(w["root"], "web root '" + site.root + "' does not exist in the host's file tree");
        if (auto l = w["login"]; l.IsDefined()) {
          WebLogin login{url_path(l, "path"), text(l, "user_field"), text(l, "password_field"), url_path(l, "success_page")};
          require_path(host, under(site.root, login.path), l["path"], "login page");
          require_path(host, under(site.root, login.success_page), l["success_page"], "login success page");
          site.login = login;
        }
        if (auto u = w["upload"]; u.IsDefined()) {
          WebUpload up{url_path(u, "form_page"), url_path(u, "action"), text(u, "field"), url_path(u, "store_dir"),
                       boolean_or(u, "executes_php", true)};
          require_path(host, under(site.root, up.form_page), u["form_page"], "upload form page");
          require_path(host, under(site.root, up.store_dir), u["store_dir"], "upload directory");
          site.upload = up;
        }
        if (auto l = w["lfi"]; l.IsDefined()) {
          WebLfi lfi{url_path(l, "path"), text(l, "param"), text_or(l, "register_path", ""),
                     boolean_or(l, "requires_auth", true), 1};
          if (l["min_depth"].IsDefined()) lfi.min_depth = integer(l, "min_depth");
          site.lfi = lfi;
        }
        host.behaviors.web.push_back(std::move(site));
      }
    }
    if (auto exports = b["nfs_exports"]; exports.IsDefined()) {
      if (!exports.IsSequence()) fail(exports, "'nfs_exports' must be a list");
      for (const auto& e : exports) {
        NfsExport ex{normalize_path(text(e, "path")), text_or(e, "clients", "*")};
        if (!host.files.is_directory(ex.path)) fail(e["path"], "export '" + ex.path + "' does not exist in the host's file tree");
        host.behaviors.nfs_exports.push_back(std::move(ex));
      }
    }
  }
  return host;
}

}  // namespace

const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::ssh_password: return "ssh-password";
    case Mechanism::ssh_key: return "ssh-key";
    case Mechanism::http_form: return "http-form";
  }
  return "ssh-password";
}

void FileTree::add(SimFile file) {
  auto key = file.path;
  entries_[key] = std::move(file);
}

const SimFile* FileTree::file(std::string_view path) const {
  auto it = entries_.find(normalize_path(path));
  return it == entries_.end() ? nullptr : &it->second;
}

bool FileTree::exists(std::string_view path) const { return file(path) != nullptr || is_directory(path); }

bool FileTree::is_directory(std::string_view path) const {
  auto p = normalize_path(path);
  if (auto f = file(p)) return f->directory;
  const std::string prefix = p == "/" ? "/" : p + "/";
  auto it = entries_.lower_bound(prefix);
  return it != entries_.end() && it->first.starts_with(prefix);
}

std::vector<std::string> FileTree::list(std::string_view dir) const {
  auto p = normalize_path(dir);
  const std::string prefix = p == "/" ? "/" : p + "/";
  std::set<std::string> names;
  for (auto it = entries_.lower_bound(prefix); it != entries_.end() && it->first.starts_with(prefix); ++it) {
    auto rest = it->first.substr(prefix.size());
    auto slash = rest.find('/');
    if (slash != std::string::npos) {
      names.insert(rest.substr(0, slash) + "/");
    } else {
      names.insert(it->second.directory ? rest + "/" : rest);
    }
  }
  return {names.begin(), names.end()};
}

std::vector<const SimFile*> FileTree::walk(std::string_view dir) const {
  auto p = normalize_path(dir);
  const std::string prefix = p == "/" ? "/" : p + "/";
  std::vector<const SimFile*> out;
  for (auto it = entries_.lower_bound(prefix); it != entries_.end() && it->first.starts_with(prefix); ++it) {
    if (!it->second.directory) out.push_back(&it->second);
  }
  return out;
}

const WebSite* SimHost::web_site(int port) const {
  for (const auto& w : behaviors.web) {
    if (w.port == port) return &w;
  }
  return nullptr;
}

std::map<std::string, std::string> SimHost::zip_passwords() const {
  std::map<std::string, std::string> out;
  for (const auto& [path, f] : files.entries()) {
    if (f.archive && !f.archive->password.empty()) out[path] = f.archive->password;
  }
  return out;
}

const SimHost* LabFixture::host(Ipv4 ip) const {
  for (const auto& h : hosts) {
    if (h.ip == ip) return &h;
  }
  return nullptr;
}

std::vector<Ipv4> LabFixture::alive_addresses() const {
  std::vector<Ipv4> ips{infrastructure.gateway_ip, attacker_ip};
  if (infrastructure.dhcp_ip) ips.push_back(*infrastructure.dhcp_ip);
  for (const auto& h : hosts) ips.push_back(h.ip);
  std::sort(ips.begin(), ips.end());
  return ips;
}

LabFixture load_fixture(std::string_view document) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(document));
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::parse_error, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw Error(ErrorCode::parse_error, "line 1: fixture document must be a mapping");

  LabFixture fx;
  fx.name = text_or(root, "name", "custom");
  try {
    fx.subnet = netcalc::parse_cidr(text(root, "subnet"));
  } catch (const Error& e) {
    fail(root["subnet"], e.what());
  }
  fx.attacker_ip = address(root, "attacker_ip");
  auto infra = require(root, "infrastructure");
  fx.infrastructure.gateway_ip = address(infra, "gateway_ip");
  if (infra["dhcp_ip"].IsDefined()) fx.infrastructure.dhcp_ip = address(infra, "dhcp_ip");

  auto hosts = require(root, "hosts");
  if (!hosts.IsSequence()) fail(hosts, "'hosts' must be a list");
  for (const auto& h : hosts) fx.hosts.push_back(parse_host(h));

  // All addresses distinct and inside the subnet.
  std::set<Ipv4> seen;
  auto check_ip = [&](Ipv4 ip, const YAML::Node& where) {
    if (!fx.subnet.contains(ip) || ip == fx.subnet.network_address() || ip == fx.subnet.broadcast_address()) {
      fail(where, ip.to_string() + " is not a host address of " + fx.subnet.to_string());
    }
    if (!seen.insert(ip).second) fail(where, "duplicate address " + ip.to_string());
  };
  check_ip(fx.attacker_ip, root["attacker_ip"]);
  check_ip(fx.infrastructure.gateway_ip, infra["gateway_ip"]);
  if (fx.infrastructure.dhcp_ip) check_ip(*fx.infrastructure.dhcp_ip, infra["dhcp_ip"]);
  for (std::size_t i = 0; i < fx.hosts.size(); ++i) check_ip(fx.hosts[i].ip, hosts[i]["ip"]);
  return fx;
}

LabFixture load_fixture_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read fixture " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_fixture(ss.str());
}

std::vector<std::string> builtin_fixture_names() {
  std::vector<std::string> names;
  for (const auto& [name, doc] : detail::embedded_fixture_documents()) names.push_back(name);
  return names;
}

std::string builtin_fixture_document(std::string_view name) {
  const auto& docs = detail::embedded_fixture_documents();
  auto it = docs.find(std::string(name));
  if (it == docs.end()) throw Error(ErrorCode::not_found, "no builtin fixture named '" + std::string(name) + "'");
  return it->second;
}

LabFixture builtin_fixture(std::string_view name) { return load_fixture(builtin_fixture_document(name)); }

LabFixture resolve_fixture(std::string_view name_or_path) {
  const auto& docs = detail::embedded_fixture_documents();
  if (docs.contains(std::string(name_or_path))) return builtin_fixture(name_or_path);
  return load_fixture_file(std::string(name_or_path));
}

}  // namespace pentestxx::labsim
