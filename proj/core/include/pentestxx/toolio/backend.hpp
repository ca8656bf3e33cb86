#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "pentestxx/common/ipv4.hpp"
#include "pentestxx/netcalc/netcalc.hpp"
#include "pentestxx/toolio/command.hpp"

namespace pentestxx::toolio {

/// An established reverse-shell connection.
struct ShellSessionHandle {
  Ipv4 remote;
  int local_port = 0;
  std::string banner;
  std::shared_ptr<void> connection;  // owns the live socket, if any
};

/// A listening socket waiting for a connect-back.
class Listener {
 public:
  virtual ~Listener() = default;
  virtual int port() const = 0;
  /// Throws Error(timeout) when nothing connects in time.
  virtual ShellSessionHandle await_connection(std::chrono::milliseconds timeout) = 0;
};

/// What the environment knows about the local network without scanning it.
struct NetworkHints {
  std::optional<netcalc::SubnetSpec> subnet;
  std::optional<Ipv4> attacker_ip;
  std::optional<Ipv4> gateway_ip;
  std::optional<Ipv4> dhcp_ip;
};

/// Executes commands either as real subprocesses or against a simulated lab.
/// A session picks one backend at start and keeps it.
class ToolBackend {
 public:
  virtual ~ToolBackend() = default;

  virtual std::string_view name() const = 0;

  /// Throws Error(program_missing) for live runs when the executable does not
  /// exist, Error(unmodeled) for simulated runs with no modeled behavior.
  virtual ToolOutput run(const CommandSpec& cmd) = 0;

  /// Throws Error(port_in_use).
  virtual std::unique_ptr<Listener> listen(int port) = 0;

  virtual NetworkHints network_hints() const = 0;
};

using CommandObserver = std::function<void(const CommandSpec&)>;

/// Announces the display line to the observer, then runs the command.
ToolOutput execute(const CommandSpec& cmd, ToolBackend& backend, const CommandObserver& before = {});

struct LiveBackendOptions {
  std::chrono::seconds command_timeout{3600};
};

/// Runs real programs via posix_spawn and captures stdout/stderr in full.
std::unique_ptr<ToolBackend> make_live_backend(LiveBackendOptions options = {});

/// PATH lookup used by the live backend.
std::optional<std::string> find_program(std::string_view program);

}  // namespace pentestxx::toolio
