#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pentestxx/toolio/parsers.hpp"

namespace pentestxx::engine {

enum class VectorKind { ftp, http80, http8080, ssh, nfs, proxy, noop };

const char* to_string(VectorKind k);

struct VectorPlan {
  VectorKind kind = VectorKind::noop;
  int port = 0;
  std::string note;
};

/// Service name first, port number as fallback.
VectorPlan dispatch_vector(const toolio::PortFinding& pf);

/// Web applications recognized from their landing page.
struct KnownApp {
  std::string name;
  std::string marker;         // case-insensitive substring of the page
  std::string register_path;  // path?query creating an account
  std::string lfi_path;       // path?query ending in the traversal parameter
  int depth = 7;
};

const std::vector<KnownApp>& known_apps();
std::optional<KnownApp> detect_app(std::string_view page);

}  // namespace pentestxx::engine
