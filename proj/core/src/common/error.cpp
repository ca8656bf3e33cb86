#include "pentestxx/common/error.hpp"

namespace pentestxx {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::program_missing: return "program_missing";
    case ErrorCode::unmodeled: return "unmodeled";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::port_in_use: return "port_in_use";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::cancelled: return "cancelled";
    case ErrorCode::advisor_network: return "advisor_network";
    case ErrorCode::advisor_status: return "advisor_status";
    case ErrorCode::advisor_timeout: return "advisor_timeout";
    case ErrorCode::scan_failed: return "scan_failed";
    case ErrorCode::no_scope: return "no_scope";
  }
  return "unknown";
}

}  // namespace pentestxx
