#pragma once

#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pentestxx::engine {

struct ApprovalRequest {
  std::string id;
  std::string kind;  // confirm_subnet, select_target, proceed, command, select_wordlist, ...
  std::string description;
  std::string command_preview;       // display line for command gates, action summary otherwise
  std::vector<std::string> options;  // choice gates only; params.choice indexes this
};

enum class DecisionSource { console, api, synthetic };

const char* to_string(DecisionSource s);

struct Decision {
  bool granted = false;
  nlohmann::json params = nlohmann::json::object();
  DecisionSource source = DecisionSource::console;
};

nlohmann::json to_json(const ApprovalRequest& r);

/// Decision from the wire form {"decision": "grant"|"deny", "params": {...}}.
/// Throws Error(invalid_argument).
Decision decision_from_json(const nlohmann::json& j, DecisionSource source);

enum class SubmitResult { accepted, not_found, conflict, invalid };

/// Rendezvous between the orchestrator, which blocks on a gate, and whatever
/// answers it (console, control API, or the auto-approve policy).
class ApprovalBroker {
 public:
  explicit ApprovalBroker(bool auto_approve) : auto_approve_(auto_approve) {}

  /// Registers the request; returns its id.
  std::string open(ApprovalRequest req);
  /// Blocks until decided. Auto-approve grants immediately with choice 0.
  /// Throws Error(cancelled) after cancel().
  Decision wait(const std::string& id);

  SubmitResult submit(const std::string& id, Decision d);

  std::vector<ApprovalRequest> pending() const;
  std::optional<ApprovalRequest> find(const std::string& id) const;
  bool auto_approve() const { return auto_approve_; }

  void cancel();

 private:
  struct Slot {
    ApprovalRequest request;
    std::optional<Decision> decision;
  };

  bool auto_approve_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, Slot> slots_;
  std::vector<std::string> order_;
  int next_ = 1;
  bool cancelled_ = false;
};

}  // namespace pentestxx::engine
