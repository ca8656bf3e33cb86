#pragma once

#include <stdexcept>
#include <string>

namespace pentestxx {

enum class ErrorCode {
  invalid_argument,
  parse_error,
  io_error,
  program_missing,   // live backend: executable not on PATH
  unmodeled,         // sim backend: fixture has no behavior for the command
  timeout,
  port_in_use,
  not_found,
  conflict,
  cancelled,
  advisor_network,
  advisor_status,
  advisor_timeout,
  scan_failed,
  no_scope,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pentestxx
