#include "pentestxx/engine/approvals.hpp"

#include <algorithm>

#include "pentestxx/common/error.hpp"

namespace pentestxx::engine {

const char* to_string(DecisionSource s) {
  switch (s) {
    case DecisionSource::console: return "console";
    case DecisionSource::api: return "api";
    case DecisionSource::synthetic: return "synthetic";
  }
  return "console";
}

nlohmann::json to_json(const ApprovalRequest& r) {
  return {{"approval_id", r.id},
          {"kind", r.kind},
          {"description", r.description},
          {"command_preview", r.command_preview},
          {"options", r.options}};
}

Decision decision_from_json(const nlohmann::json& j, DecisionSource source) {
  if (!j.is_object() || !j.contains("decision") || !j["decision"].is_string()) {
    throw Error(ErrorCode::invalid_argument, "body must be an object with \"decision\": \"grant\" or \"deny\"");
  }
  Decision d;
  d.source = source;
  const auto& s = j["decision"].get_ref<const std::string&>();
  if (s == "grant") d.granted = true;
  else if (s != "deny") throw Error(ErrorCode::invalid_argument, "decision must be \"grant\" or \"deny\", got \"" + s + "\"");
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw Error(ErrorCode::invalid_argument, "params must be an object");
    d.params = j["params"];
  }
  if (d.params.contains("choice") && !d.params["choice"].is_number_unsigned()) {
    throw Error(ErrorCode::invalid_argument, "params.choice must be a non-negative integer");
  }
  return d;
}

std::string ApprovalBroker::open(ApprovalRequest req) {
  std::lock_guard lock(mu_);
  if (cancelled_) throw Error(ErrorCode::cancelled, "session cancelled");
  req.id = "a" + std::to_string(next_++);
  auto id = req.id;
  order_.push_back(id);
  slots_.emplace(id, Slot{std::move(req), std::nullopt});
  if (auto_approve_) slots_[id].decision = Decision{true, {{"choice", 0}}, DecisionSource::synthetic};
  return id;
}

Decision ApprovalBroker::wait(const std::string& id) {
  std::unique_lock lock(mu_);
  auto it = slots_.find(id);
  if (it == slots_.end()) throw Error(ErrorCode::not_found, "unknown approval " + id);
  cv_.wait(lock, [&] { return cancelled_ || it->second.decision.has_value(); });
  if (!it->second.decision) throw Error(ErrorCode::cancelled, "session cancelled while waiting on " + id);
  return *it->second.decision;
}

SubmitResult ApprovalBroker::submit(const std::string& id, Decision d) {
  {
    std::lock_guard lock(mu_);
    auto it = slots_.find(id);
    if (it == slots_.end()) return SubmitResult::not_found;
    if (it->second.decision || cancelled_) return SubmitResult::conflict;
    if (d.params.contains("choice")) {
      const auto& cj = d.params["choice"];
      if (!cj.is_number_integer() || cj.get<std::int64_t>() < 0) return SubmitResult::invalid;
      auto c = cj.get<std::size_t>();
      // Gates without options still accept choice 0, the default.
      if (c >= std::max<std::size_t>(it->second.request.options.size(), 1)) return SubmitResult::invalid;
    }
    it->second.decision = std::move(d);
  }
  cv_.notify_all();
  return SubmitResult::accepted;
}

std::vector<ApprovalRequest> ApprovalBroker::pending() const {
  std::lock_guard lock(mu_);
  std::vector<ApprovalRequest> out;
  for (const auto& id : order_) {
    const auto& slot = slots_.at(id);
    if (!slot.decision) out.push_back(slot.request);
  }
  return out;
}

std::optional<ApprovalRequest> ApprovalBroker::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = slots_.find(id);
  if (it == slots_.end()) return std::nullopt;
  return it->second.request;
}

void ApprovalBroker::cancel() {
  {
    std::lock_guard lock(mu_);
    cancelled_ = true;
  }
  cv_.notify_all();
}

}  // namespace pentestxx::engine
