#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pentestxx/engine/session.hpp"

namespace pentestxx::api {

/// Owns the sessions the control API can see. Sessions start running as soon
/// as they are created.
class SessionManager {
 public:
  using Factory = std::function<std::unique_ptr<engine::Session>(engine::EngineConfig)>;

  explicit SessionManager(Factory factory = {});
  ~SessionManager();

  std::shared_ptr<engine::Session> create(engine::EngineConfig config);
  /// Registers a session created elsewhere (the CLI's run --serve).
  void adopt(std::shared_ptr<engine::Session> session);
  std::shared_ptr<engine::Session> find(const std::string& id) const;
  std::vector<std::shared_ptr<engine::Session>> list() const;
  /// Cancels and joins every session.
  void shutdown();

 private:
  Factory factory_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<engine::Session>> sessions_;
  std::vector<std::string> order_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8765;  // 0 picks a free port
  std::string token;  // required as "Authorization: Bearer <token>" when non-empty
  std::chrono::milliseconds stream_poll{250};
};

/// HTTP/JSON control surface under /v1. See docs/api.md.
class ApiServer {
 public:
  ApiServer(std::shared_ptr<SessionManager> sessions, ServerOptions options);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds and serves on a background thread. Returns the bound port.
  /// Throws Error(port_in_use) when the address cannot be bound.
  int start();
  /// Blocks until stop() is called from another thread.
  void wait();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<SessionManager> sessions_;
  ServerOptions options_;
  int port_ = 0;
};

/// A 32-hex random token for ad-hoc servers.
std::string random_token();

}  // namespace pentestxx::api
