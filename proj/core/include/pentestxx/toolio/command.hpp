#pragma once

#include <string>
#include <vector>

namespace pentestxx::toolio {

/// One external tool invocation. The display line is exactly what the
/// operator sees before execution; it is derived from program and args so
/// the two can never drift.
struct CommandSpec {
  std::string program;
  std::vector<std::string> args;
  bool gate_required = false;

  std::string display_line() const;

  friend bool operator==(const CommandSpec&, const CommandSpec&) = default;
};

/// Validates that neither program nor args are empty or contain whitespace,
/// so the display line splits back into the same tokens.
CommandSpec make_command(std::string program, std::vector<std::string> args, bool gate_required);

struct ToolOutput {
  int exit_status = 0;
  std::string stdout_text;
  std::string stderr_text;
  double duration_seconds = 0.0;

  bool ok() const { return exit_status == 0; }
};

}  // namespace pentestxx::toolio
