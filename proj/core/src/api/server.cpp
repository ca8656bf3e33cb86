#include "pentestxx/api/server.hpp"

#include <cctype>
#include <random>

#include <fmt/format.h>
#include <httplib.h>

#include "pentestxx/common/error.hpp"

namespace pentestxx::api {

using engine::Session;
using nlohmann::json;

// -- sessions -------------------------------------------------------------------

SessionManager::SessionManager(Factory factory) : factory_(std::move(factory)) {
  if (!factory_) factory_ = [](engine::EngineConfig c) { return engine::make_session(std::move(c)); };
}

SessionManager::~SessionManager() { shutdown(); }

std::shared_ptr<Session> SessionManager::create(engine::EngineConfig config) {
  std::shared_ptr<Session> s = factory_(std::move(config));
  adopt(s);
  s->start();
  return s;
}

void SessionManager::adopt(std::shared_ptr<Session> session) {
  std::lock_guard lock(mu_);
  if (sessions_.emplace(session->id(), session).second) order_.push_back(session->id());
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<Session>> SessionManager::list() const {
  std::lock_guard lock(mu_);
  std::vector<std::shared_ptr<Session>> out;
  for (const auto& id : order_) out.push_back(sessions_.at(id));
  return out;
}

void SessionManager::shutdown() {
  for (const auto& s : list()) {
    s->cancel();
    s->join();
  }
}

// -- server ---------------------------------------------------------------------

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

bool token_matches(std::string_view given, std::string_view expected) {
  // Length leaks, content does not.
  if (given.size() != expected.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < given.size(); ++i) diff |= static_cast<unsigned char>(given[i] ^ expected[i]);
  return diff == 0;
}

}  // namespace

struct ApiServer::Impl {
  httplib::Server svr;
  std::thread thread;
  std::atomic<bool> stopping{false};
};

std::string random_token() {
  std::random_device rd;
  std::uniform_int_distribution<int> nibble(0, 15);
  std::string t;
  for (int i = 0; i < 32; ++i) t.push_back("0123456789abcdef"[nibble(rd)]);
  return t;
}

ApiServer::ApiServer(std::shared_ptr<SessionManager> sessions, ServerOptions options)
    : impl_(std::make_unique<Impl>()), sessions_(std::move(sessions)), options_(std::move(options)) {
  auto& svr = impl_->svr;
  auto* impl = impl_.get();
  auto mgr = sessions_;
  const auto poll = options_.stream_poll;

  svr.new_task_queue = [] { return new httplib::ThreadPool(32); };
  // No SO_REUSEPORT: a second server on the same port must fail, not share it.
  svr.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  svr.set_pre_routing_handler([token = options_.token](const httplib::Request& req, httplib::Response& res) {
    if (token.empty()) return httplib::Server::HandlerResponse::Unhandled;
    auto auth = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (auth.size() > prefix.size() && auth.starts_with(prefix) && token_matches(std::string_view(auth).substr(prefix.size()), token)) {
      return httplib::Server::HandlerResponse::Unhandled;
    }
    res.set_header("WWW-Authenticate", "Bearer");
    send_error(res, 401, "unauthorized", "missing or wrong bearer token");
    return httplib::Server::HandlerResponse::Handled;
  });

  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    } catch (...) {
      send_error(res, 500, "internal", "unknown error");
    }
  });

  auto with_session = [mgr](const httplib::Request& req, httplib::Response& res) -> std::shared_ptr<Session> {
    auto s = mgr->find(req.matches[1]);
    if (!s) send_error(res, 404, "not_found", "no session " + std::string(req.matches[1]));
    return s;
  };

  svr.Post("/v1/sessions", [mgr](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body.empty() ? std::string("{}") : req.body, nullptr, false);
    if (body.is_discarded()) return send_error(res, 400, "invalid_argument", "request body is not JSON");
    try {
      auto s = mgr->create(engine::config_from_json(body));
      res.set_header("Location", "/v1/sessions/" + s->id());
      send_json(res, 201, {{"session_id", s->id()}});
    } catch (const Error& e) {
      send_error(res, 400, to_string(e.code()), e.what());
    }
  });

  svr.Get("/v1/sessions", [mgr](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& s : mgr->list()) {
      auto snap = s->snapshot();
      out.push_back({{"session_id", snap.id}, {"phase", to_string(snap.phase)}, {"status", to_string(snap.status)}});
    }
    send_json(res, 200, {{"sessions", out}});
  });

  svr.Get(R"(/v1/sessions/([0-9a-f]+))", [with_session](const httplib::Request& req, httplib::Response& res) {
    if (auto s = with_session(req, res)) send_json(res, 200, engine::to_json(s->snapshot()));
  });

  svr.Get(R"(/v1/sessions/([0-9a-f]+)/events)", [with_session, impl, poll](const httplib::Request& req, httplib::Response& res) {
    auto s = with_session(req, res);
    if (!s) return;
    std::uint64_t from = 1;
    if (req.has_param("from")) {
      try {
        std::size_t used = 0;
        auto text = req.get_param_value("from");
        // stoull would wrap "-1"
        if (text.empty() || !std::isdigit(static_cast<unsigned char>(text[0]))) throw std::invalid_argument(text);
        from = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        return send_error(res, 400, "invalid_argument", "from must be a non-negative integer");
      }
      if (from == 0) from = 1;
    }
    auto cursor = std::make_shared<std::uint64_t>(from);
    res.set_chunked_content_provider("application/x-ndjson", [s, cursor, impl, poll](std::size_t, httplib::DataSink& sink) {
      if (impl->stopping) return false;
      auto batch = s->events().wait_since(*cursor, poll);
      for (const auto& e : batch) {
        auto line = engine::to_ndjson_line(e) + "\n";
        if (!sink.write(line.data(), line.size())) return false;
        *cursor = e.seq + 1;
      }
      if (batch.empty() && s->events().closed() && *cursor > s->events().last_seq()) sink.done();
      return true;
    });
  });

  svr.Post(R"(/v1/sessions/([0-9a-f]+)/approvals/([A-Za-z0-9_-]+))", [with_session](const httplib::Request& req, httplib::Response& res) {
    auto s = with_session(req, res);
    if (!s) return;
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return send_error(res, 400, "invalid_argument", "request body is not JSON");
    engine::Decision d;
    try {
      d = engine::decision_from_json(body, engine::DecisionSource::api);
    } catch (const Error& e) {
      return send_error(res, 400, to_string(e.code()), e.what());
    }
    const std::string aid = req.matches[2];
    switch (s->approvals().submit(aid, std::move(d))) {
      case engine::SubmitResult::accepted: res.status = 204; return;
      case engine::SubmitResult::not_found: return send_error(res, 404, "not_found", "no approval " + aid);
      case engine::SubmitResult::conflict: return send_error(res, 409, "conflict", "approval " + aid + " was already decided");
      case engine::SubmitResult::invalid: return send_error(res, 400, "invalid_argument", "choice is out of range for approval " + aid);
    }
  });

  svr.Get(R"(/v1/sessions/([0-9a-f]+)/report)", [with_session](const httplib::Request& req, httplib::Response& res) {
    auto s = with_session(req, res);
    if (!s) return;
    auto format = req.has_param("format") ? req.get_param_value("format") : std::string("json");
    if (format != "text" && format != "json") return send_error(res, 400, "invalid_argument", "format must be text or json");
    auto doc = s->report();
    if (!doc) return send_error(res, 409, "conflict", "report not ready");
    res.status = 200;
    if (format == "text") res.set_content(report::emit_text(*doc), "text/plain; charset=utf-8");
    else res.set_content(report::emit_json(*doc), "application/json");
  });

  svr.Post(R"(/v1/sessions/([0-9a-f]+)/report/regenerate)", [with_session](const httplib::Request& req, httplib::Response& res) {
    auto s = with_session(req, res);
    if (!s) return;
    json body = json::parse(req.body.empty() ? std::string("{}") : req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return send_error(res, 400, "invalid_argument", "request body is not a JSON object");
    std::string notes;
    if (body.contains("notes")) {
      if (!body["notes"].is_string()) return send_error(res, 400, "invalid_argument", "notes must be a string");
      notes = body["notes"].get<std::string>();
    }
    auto doc = s->regenerate_report(notes);
    if (!doc) return send_error(res, 409, "conflict", "report not ready");
    res.status = 200;
    res.set_content(report::emit_json(*doc), "application/json");
  });

  svr.Post(R"(/v1/sessions/([0-9a-f]+)/cancel)", [with_session](const httplib::Request& req, httplib::Response& res) {
    auto s = with_session(req, res);
    if (!s) return;
    s->cancel();
    res.status = 204;
  });
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start() {
  auto& svr = impl_->svr;
  if (options_.port == 0) {
    port_ = svr.bind_to_any_port(options_.host);
    if (port_ <= 0) throw Error(ErrorCode::port_in_use, "cannot bind " + options_.host);
  } else {
    if (!svr.bind_to_port(options_.host, options_.port)) {
      throw Error(ErrorCode::port_in_use, fmt::format("cannot bind {}:{}", options_.host, options_.port));
    }
    port_ = options_.port;
  }
  impl_->thread = std::thread([this] { impl_->svr.listen_after_bind(); });
  impl_->svr.wait_until_ready();
  return port_;
}

void ApiServer::wait() {
  while (!impl_->stopping && impl_->svr.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->stopping = true;
  impl_->svr.stop();
  if (impl_->thread.joinable() && impl_->thread.get_id() != std::this_thread::get_id()) impl_->thread.join();
}

}  // namespace pentestxx::api
