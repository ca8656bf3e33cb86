#pragma once

#include <string>
#include <vector>

#include "pentestxx/engine/events.hpp"

namespace pentestxx::engine {

struct ReplayReport {
  std::size_t gated_commands = 0;
  std::size_t grants = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks a session log on its own:
///  - every gate_required command_started cites a granted approval whose
///    command_preview equals the display line, and no grant is used twice;
///  - phases never regress;
///  - seq is gapless from 1 and timestamps never decrease;
///  - every finding cites an earlier event.
ReplayReport verify_event_log(const std::vector<Event>& events);

}  // namespace pentestxx::engine
