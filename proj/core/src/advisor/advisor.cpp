#include "pentestxx/advisor/advisor.hpp"

#include <cstdlib>

#include <httplib.h>

#include "pentestxx/common/error.hpp"
#include "pentestxx/common/ipv4.hpp"
#include "pentestxx/common/strings.hpp"

namespace pentestxx::advisor {

using nlohmann::json;

namespace {

PromptEnvelope base_envelope(Purpose purpose, const PromptContext& ctx) {
  if (ctx.target_ip.empty() || ctx.attacker_ip.empty()) {
    throw Error(ErrorCode::invalid_argument, "prompt metadata needs target and attacker addresses");
  }
  PromptEnvelope env;
  env.purpose = purpose;
  env.metadata = {{"target_ip", ctx.target_ip}, {"attacker_ip", ctx.attacker_ip}, {"phase", ctx.phase}};
  return env;
}

}  // namespace

PromptEnvelope build_analysis_prompt(std::string_view artifact_name, std::string_view content,
                                     const PromptContext& ctx) {
  if (content.empty()) throw Error(ErrorCode::invalid_argument, "refusing to analyze empty artifact");
  auto env = base_envelope(Purpose::analyze_artifact, ctx);
  env.artifact_name = std::string(artifact_name);
  env.instructions =
      "You assist an authorized penetration test of " + ctx.target_ip + " from " + ctx.attacker_ip +
      ". Examine the artifact '" + env.artifact_name +
      "' retrieved during the engagement and list anything useful for gaining access: password hashes, "
      "credentials, usernames, login identifiers, SQL statements and vulnerabilities. "
      "Reply with a single JSON object and nothing else. It must validate against this JSON Schema:\n" +
      advice_schema().dump(2);
  env.body = std::string(content);
  return env;
}

PromptEnvelope build_report_prompt(std::string_view findings_log, const PromptContext& ctx,
                                   const std::vector<std::string>& section_titles) {
  auto env = base_envelope(Purpose::generate_report, ctx);
  json titles = section_titles;
  env.instructions =
      "Write a professional penetration test report for target " + ctx.target_ip + " (tester machine " +
      ctx.attacker_ip + ") from the structured log that follows. Reply with a single JSON object of the form "
      "{\"sections\": [{\"title\": ..., \"body\": ...}]} containing exactly these section titles in this order: " +
      titles.dump() + ". Use only facts present in the log.";
  env.body = std::string(findings_log);
  return env;
}

std::optional<HttpTransportConfig> transport_config_from_env(std::string endpoint, const char* secret_var) {
  const char* secret = std::getenv(secret_var);
  if (!secret || !*secret || endpoint.empty()) return std::nullopt;
  HttpTransportConfig cfg;
  cfg.endpoint = std::move(endpoint);
  cfg.secret = secret;
  return cfg;
}

namespace {

bool is_loopback_host(std::string_view authority) {
  std::string host;
  if (authority.starts_with('[')) {
    host = std::string(authority.substr(1, authority.find(']') - 1));
  } else {
    host = std::string(authority.substr(0, authority.find(':')));
  }
  host = lower(host);
  if (host == "localhost" || host == "::1") return true;
  auto ip = Ipv4::try_parse(host);
  return ip && (ip->value() >> 24) == 127;
}

class HttpTransport final : public AdvisorTransport {
 public:
  explicit HttpTransport(HttpTransportConfig cfg) : cfg_(std::move(cfg)) {
    auto scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::invalid_argument, "advisor endpoint needs a scheme");
    auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
    origin_ = cfg_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);
    const auto scheme = lower(std::string_view(cfg_.endpoint).substr(0, scheme_end));
    if (scheme == "http") {
      // The bearer secret may only cross the wire in clear to this machine.
      if (!is_loopback_host(origin_.substr(scheme_end + 3))) {
        throw Error(ErrorCode::invalid_argument, "advisor endpoint must use https unless it is on localhost");
      }
    } else if (scheme != "https") {
      throw Error(ErrorCode::invalid_argument, "advisor endpoint scheme must be http or https");
    }
  }

  TransportReply post(const std::string& body) override {
    httplib::Client client(origin_);
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_write_timeout(cfg_.timeout);
    httplib::Headers headers{{"Authorization", "Bearer " + cfg_.secret}};
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout) {
        throw Error(ErrorCode::advisor_timeout, "advisor request timed out (" + httplib::to_string(err) + ")");
      }
      throw Error(ErrorCode::advisor_network, "advisor request failed: " + httplib::to_string(err));
    }
    return {res->status, res->body};
  }

  std::string describe() const override { return cfg_.endpoint; }
  std::string secret() const override { return cfg_.secret; }

 private:
  HttpTransportConfig cfg_;
  std::string origin_;
  std::string path_;
};

}  // namespace

std::unique_ptr<AdvisorTransport> make_http_transport(HttpTransportConfig config) {
  return std::make_unique<HttpTransport>(std::move(config));
}

json request_body(const PromptEnvelope& env, std::string_view model) {
  return {{"model", model},
          {"purpose", to_string(env.purpose)},
          {"metadata", env.metadata},
          {"messages", json::array({{{"role", "system"}, {"content", env.instructions}},
                                    {{"role", "user"}, {"content", env.body}}})}};
}

std::string reply_text(std::string_view body) {
  json doc = json::parse(body, nullptr, false);
  if (!doc.is_discarded() && doc.is_object() && doc.contains("choices") && doc["choices"].is_array() &&
      !doc["choices"].empty()) {
    const auto& first = doc["choices"][0];
    if (first.contains("message") && first["message"].contains("content") && first["message"]["content"].is_string()) {
      return first["message"]["content"].get<std::string>();
    }
  }
  return std::string(body);
}

std::string redact(std::string_view text, std::string_view secret) {
  std::string out(text);
  if (secret.empty()) return out;
  for (auto pos = out.find(secret); pos != std::string::npos; pos = out.find(secret, pos + 3)) {
    out.replace(pos, secret.size(), "***");
  }
  return out;
}

Advice live_query(const PromptEnvelope& env, AdvisorTransport& transport, std::string_view model,
                  const AdvisorLog& log) {
  const auto body = request_body(env, model).dump();
  const auto secret = transport.secret();
  if (log) {
    log("advisor_request", {{"endpoint", redact(transport.describe(), secret)},
                            {"authorization", "Bearer ***"},
                            {"body", redact(body, secret)}});
  }
  auto reply = transport.post(body);
  if (log) log("advisor_response", {{"status", reply.status}, {"body", redact(reply.body, secret)}});
  if (reply.status < 200 || reply.status >= 300) {
    throw Error(ErrorCode::advisor_status, "advisor endpoint answered HTTP " + std::to_string(reply.status));
  }
  return parse_advice(reply_text(reply.body));
}

namespace {

class MockAdvisor final : public Advisor {
 public:
  std::string_view name() const override { return "mock"; }
  Advice analyze(const PromptEnvelope& env) override { return mock_analyze(env.artifact_name, env.body); }
  std::optional<std::string> complete(const PromptEnvelope&) override { return std::nullopt; }
};

class LiveAdvisor final : public Advisor {
 public:
  LiveAdvisor(std::unique_ptr<AdvisorTransport> transport, std::string model, AdvisorLog log)
      : transport_(std::move(transport)), model_(std::move(model)), log_(std::move(log)) {}

  std::string_view name() const override { return "live"; }

  Advice analyze(const PromptEnvelope& env) override {
    try {
      auto advice = live_query(env, *transport_, model_, log_);
      if (!advice.diagnostics.empty()) {
        // Hallucination containment: keep the raw reply, fall back to rules.
        auto fallback = mock_analyze(env.artifact_name, env.body);
        fallback.diagnostics = advice.diagnostics;
        fallback.diagnostics.push_back("used rule-based analysis instead");
        fallback.raw = advice.raw;
        return fallback;
      }
      return advice;
    } catch (const Error& e) {
      auto fallback = mock_analyze(env.artifact_name, env.body);
      fallback.diagnostics.push_back(std::string(to_string(e.code())) + ": " + redact(e.what(), transport_->secret()));
      return fallback;
    }
  }

  std::optional<std::string> complete(const PromptEnvelope& env) override {
    try {
      const auto body = request_body(env, model_).dump();
      if (log_) log_("advisor_request", {{"endpoint", redact(transport_->describe(), transport_->secret())}, {"authorization", "Bearer ***"},
                                         {"body", redact(body, transport_->secret())}});
      auto reply = transport_->post(body);
      if (log_) log_("advisor_response", {{"status", reply.status}, {"body", redact(reply.body, transport_->secret())}});
      if (reply.status < 200 || reply.status >= 300) return std::nullopt;
      return reply_text(reply.body);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

 private:
  std::unique_ptr<AdvisorTransport> transport_;
  std::string model_;
  AdvisorLog log_;
};

}  // namespace

std::unique_ptr<Advisor> make_mock_advisor() { return std::make_unique<MockAdvisor>(); }

std::unique_ptr<Advisor> make_live_advisor(std::unique_ptr<AdvisorTransport> transport, std::string model,
                                           AdvisorLog log) {
  return std::make_unique<LiveAdvisor>(std::move(transport), std::move(model), std::move(log));
}

}  // namespace pentestxx::advisor
