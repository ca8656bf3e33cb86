#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pentestxx/advisor/advice.hpp"

namespace pentestxx::advisor {

// -- prompts -------------------------------------------------------------------

/// Throws Error(invalid_argument) for empty content or missing addresses.
PromptEnvelope build_analysis_prompt(std::string_view artifact_name, std::string_view content,
                                     const PromptContext& ctx);

PromptEnvelope build_report_prompt(std::string_view findings_log, const PromptContext& ctx,
                                   const std::vector<std::string>& section_titles);

// -- deterministic analysis ------------------------------------------------------

/// Rule-based stand-in for the language model: 32-hex tokens become hash
/// findings, INSERT ... INTO statements become sql_statement findings, and
/// key/value pairs with identifier-like keys become identifier, username or
/// credential findings. Pure.
Advice mock_analyze(std::string_view artifact_name, std::string_view content);

struct SensitiveHit {
  std::string keyword;
  int line_number = 0;  // 1-based
  std::string line;

  friend bool operator==(const SensitiveHit&, const SensitiveHit&) = default;
};

const std::vector<std::string>& default_keywords();

/// One hit per matching line (first keyword in list order wins), case-insensitive.
std::vector<SensitiveHit> scan_for_keywords(std::string_view content, const std::vector<std::string>& keywords);

// -- live transport --------------------------------------------------------------

struct TransportReply {
  int status = 0;
  std::string body;
};

class AdvisorTransport {
 public:
  virtual ~AdvisorTransport() = default;
  /// Throws Error(advisor_network) or Error(advisor_timeout).
  virtual TransportReply post(const std::string& json_body) = 0;
  /// Endpoint description safe to log.
  virtual std::string describe() const = 0;
  virtual std::string secret() const = 0;
};

struct HttpTransportConfig {
  std::string endpoint;  // e.g. https://api.openai.com/v1/chat/completions
  std::string model = "gpt-4o";
  std::string secret;    // bearer token
  std::chrono::seconds timeout{60};
};

/// Reads the secret from an environment variable (PENTESTXX_ADVISOR_KEY by default).
std::optional<HttpTransportConfig> transport_config_from_env(std::string endpoint,
                                                             const char* secret_var = "PENTESTXX_ADVISOR_KEY");

std::unique_ptr<AdvisorTransport> make_http_transport(HttpTransportConfig config);

/// Request body sent to the endpoint.
nlohmann::json request_body(const PromptEnvelope& env, std::string_view model);

/// Extracts the model's text from a chat-completions style reply, or returns
/// the body unchanged when it is not one.
std::string reply_text(std::string_view body);

/// Replaces every occurrence of secret with "***".
std::string redact(std::string_view text, std::string_view secret);

using AdvisorLog = std::function<void(std::string_view kind, const nlohmann::json& payload)>;

/// Sends the envelope and parses the reply. Network failure, timeout and
/// non-success status are reported as distinct Error codes. The log only ever
/// sees redacted text.
Advice live_query(const PromptEnvelope& env, AdvisorTransport& transport, std::string_view model = "gpt-4o",
                  const AdvisorLog& log = {});

// -- engine-facing interface -----------------------------------------------------

class Advisor {
 public:
  virtual ~Advisor() = default;
  virtual std::string_view name() const = 0;
  /// Never throws; failures come back as diagnostics on the Advice.
  virtual Advice analyze(const PromptEnvelope& env) = 0;
  /// Free-text completion (report prose). nullopt when unavailable.
  virtual std::optional<std::string> complete(const PromptEnvelope& env) = 0;
};

std::unique_ptr<Advisor> make_mock_advisor();
/// Falls back to mock_analyze when the transport fails.
std::unique_ptr<Advisor> make_live_advisor(std::unique_ptr<AdvisorTransport> transport, std::string model,
                                           AdvisorLog log = {});

}  // namespace pentestxx::advisor
