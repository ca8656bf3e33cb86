#include "pentestxx/engine/replay.hpp"

#include <map>
#include <set>

#include <fmt/format.h>

namespace pentestxx::engine {

ReplayReport verify_event_log(const std::vector<Event>& events) {
  ReplayReport r;
  std::map<std::string, std::string> previews;  // approval id -> command_preview
  std::map<std::string, bool> granted;          // approval id -> unused grant
  std::set<std::uint64_t> seen;
  int phase = 0;
  std::string last_ts;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const auto& p = e.payload;
    if (e.seq != i + 1) r.violations.push_back(fmt::format("seq {} at position {} (expected {})", e.seq, i + 1, i + 1));
    if (!last_ts.empty() && e.timestamp < last_ts) {
      r.violations.push_back(fmt::format("seq {}: timestamp {} precedes {}", e.seq, e.timestamp, last_ts));
    }
    last_ts = e.timestamp;
    if (static_cast<int>(e.phase) < phase) {
      r.violations.push_back(fmt::format("seq {}: phase regressed to {}", e.seq, to_string(e.phase)));
    }
    phase = std::max(phase, static_cast<int>(e.phase));

    if (e.kind == "approval_requested") {
      previews[p.value("approval_id", "")] = p.value("command_preview", "");
    } else if (e.kind == "approval_decided") {
      auto id = p.value("approval_id", "");
      if (!previews.contains(id)) {
        r.violations.push_back(fmt::format("seq {}: decision for unknown approval {}", e.seq, id));
      } else if (p.value("decision", "") == "grant") {
        granted[id] = true;
        ++r.grants;
      }
    } else if (e.kind == "command_started" && p.value("gate_required", false)) {
      ++r.gated_commands;
      auto line = p.value("display_line", "");
      auto id = p.value("approval_id", "");
      auto it = granted.find(id);
      if (id.empty() || it == granted.end()) {
        r.violations.push_back(fmt::format("seq {}: gated command without a granted approval: {}", e.seq, line));
      } else if (!it->second) {
        r.violations.push_back(fmt::format("seq {}: approval {} used twice", e.seq, id));
      } else if (previews[id] != line) {
        r.violations.push_back(
            fmt::format("seq {}: approval {} previewed '{}' but ran '{}'", e.seq, id, previews[id], line));
      } else {
        it->second = false;
      }
    } else if (e.kind == "finding") {
      auto by = p.value("produced_by", std::uint64_t{0});
      if (by == 0 || !seen.contains(by)) {
        r.violations.push_back(fmt::format("seq {}: finding cites seq {} which is not an earlier event", e.seq, by));
      }
    }
    seen.insert(e.seq);
  }
  return r;
}

}  // namespace pentestxx::engine
