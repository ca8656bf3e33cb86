#include "pentestxx/engine/vectors.hpp"

#include "pentestxx/common/strings.hpp"

namespace pentestxx::engine {

const char* to_string(VectorKind k) {
  switch (k) {
    case VectorKind::ftp: return "ftp_vector";
    case VectorKind::http80: return "http80_vector";
    case VectorKind::http8080: return "http8080_vector";
    case VectorKind::ssh: return "ssh_vector";
    case VectorKind::nfs: return "nfs_vector";
    case VectorKind::proxy: return "proxy_vector";
    case VectorKind::noop: return "noop";
  }
  return "noop";
}

namespace {

std::optional<VectorKind> by_name(std::string_view service, int port) {
  auto s = lower(service);
  if (s.starts_with("ssl/")) s = s.substr(4);
  if (s == "ftp") return VectorKind::ftp;
  if (s == "ssh") return VectorKind::ssh;
  if (s == "nfs" || s == "nfs_acl" || s == "mountd") return VectorKind::nfs;
  if (s == "http-proxy" || s == "squid-http") return VectorKind::proxy;
  if (s == "http" || s == "https" || s == "http-alt") return port == 8080 ? VectorKind::http8080 : VectorKind::http80;
  return std::nullopt;
}

std::optional<VectorKind> by_port(int port) {
  switch (port) {
    case 21: return VectorKind::ftp;
    case 22: return VectorKind::ssh;
    case 80:
    case 443: return VectorKind::http80;
    case 8080: return VectorKind::http8080;
    case 2049: return VectorKind::nfs;
    case 3128: return VectorKind::proxy;
    default: return std::nullopt;
  }
}

}  // namespace

VectorPlan dispatch_vector(const toolio::PortFinding& pf) {
  VectorPlan plan{VectorKind::noop, pf.port, {}};
  if (pf.status != toolio::PortStatus::open) {
    plan.note = "port is not open";
    return plan;
  }
  if (auto k = by_name(pf.service, pf.port)) {
    plan.kind = *k;
  } else if (auto p = by_port(pf.port)) {
    plan.kind = *p;
    plan.note = "service '" + pf.service + "' not recognized; chosen by port number";
  } else {
    plan.note = "no attack vector for service '" + pf.service + "' on port " + std::to_string(pf.port);
  }
  if (plan.kind == VectorKind::proxy) plan.note = "HTTP proxy detected; no exploitation modeled";
  return plan;
}

const std::vector<KnownApp>& known_apps() {
  static const std::vector<KnownApp> apps{
      {"BoltWire", "boltwire", "/dev/index.php?p=action.register", "/dev/index.php?p=action.search&action=", 7},
  };
  return apps;
}

std::optional<KnownApp> detect_app(std::string_view page) {
  for (const auto& app : known_apps()) {
    if (icontains(page, app.marker)) return app;
  }
  return std::nullopt;
}

}  // namespace pentestxx::engine
