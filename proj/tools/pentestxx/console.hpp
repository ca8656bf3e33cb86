#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pentestxx/engine/approvals.hpp"
#include "pentestxx/engine/events.hpp"

namespace pentestxx::cli {

/// Operator reply to a gate prompt:
///   y, yes, grant, empty line  -> grant, choice 0
///   n, no, deny                -> deny
///   <N>                        -> grant, choice N-1 (choice gates)
///   a.b.c.d/p                  -> grant with params.cidr
///   key=value[; key=value...]  -> grant with those params
/// nullopt means the reply was not understood.
std::optional<engine::Decision> parse_reply(std::string_view reply, const engine::ApprovalRequest& req);

/// The prompt shown for a gate, options numbered from 1.
std::string render_prompt(const engine::ApprovalRequest& req);

/// One line per event for the console; empty for events not worth showing.
std::string render_event(const engine::Event& e, bool verbose);

}  // namespace pentestxx::cli
