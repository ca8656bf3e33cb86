#include "pentestxx/netcalc/netcalc.hpp"

#include <ifaddrs.h>
#include <netinet/in.h>
#include <arpa/inet.h>

#include <algorithm>
#include <bit>
#include <charconv>

#include "pentestxx/common/error.hpp"

namespace pentestxx::netcalc {

namespace {

std::uint32_t mask_for(int prefix) {
  return prefix == 0 ? 0u : ~std::uint32_t{0} << (32 - prefix);
}

}  // namespace

SubnetSpec::SubnetSpec(Ipv4 network, int prefix_length) : prefix_(prefix_length) {
  if (prefix_length < 0 || prefix_length > kMaxPrefix) {
    throw Error(ErrorCode::invalid_argument,
                "prefix length /" + std::to_string(prefix_length) + " outside 0-30");
  }
  network_ = Ipv4{network.value() & mask_for(prefix_length)};
}

std::uint32_t SubnetSpec::netmask() const { return mask_for(prefix_); }

Ipv4 SubnetSpec::broadcast_address() const { return Ipv4{network_.value() | ~netmask()}; }

bool SubnetSpec::contains(Ipv4 ip) const { return (ip.value() & netmask()) == network_.value(); }

std::string SubnetSpec::to_string() const {
  return network_.to_string() + "/" + std::to_string(prefix_);
}

const char* to_string(HostRole role) {
  switch (role) {
    case HostRole::candidate_target: return "candidate_target";
    case HostRole::default_gateway: return "default_gateway";
    case HostRole::dhcp_server: return "dhcp_server";
    case HostRole::attacker_self: return "attacker_self";
    case HostRole::excluded: return "excluded";
  }
  return "excluded";
}

SubnetSpec parse_cidr(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument, "CIDR '" + std::string(text) + "' lacks a /prefix");
  }
  auto ip = Ipv4::try_parse(text.substr(0, slash));
  auto prefix_text = text.substr(slash + 1);
  int prefix = -1;
  auto [end, ec] = std::from_chars(prefix_text.data(), prefix_text.data() + prefix_text.size(), prefix);
  if (!ip || prefix_text.empty() || ec != std::errc{} || end != prefix_text.data() + prefix_text.size()) {
    throw Error(ErrorCode::invalid_argument, "malformed CIDR '" + std::string(text) + "'");
  }
  if (prefix < 0 || prefix > kMaxPrefix) {
    throw Error(ErrorCode::invalid_argument,
                "prefix /" + std::string(prefix_text) + " rejected: only /0 to /30 have usable hosts");
  }
  return SubnetSpec{*ip, prefix};
}

std::uint64_t host_count(const SubnetSpec& subnet) {
  return (std::uint64_t{1} << (32 - subnet.prefix_length())) - 2;
}

std::vector<Ipv4> enumerate_hosts(const SubnetSpec& subnet) {
  std::vector<Ipv4> hosts;
  hosts.reserve(host_count(subnet));
  const std::uint64_t first = std::uint64_t{subnet.network_address().value()} + 1;
  const std::uint64_t last = subnet.broadcast_address().value();
  for (std::uint64_t v = first; v < last; ++v) hosts.emplace_back(static_cast<std::uint32_t>(v));
  return hosts;
}

std::vector<HostRecord> filter_infrastructure(std::span<const HostRecord> hosts,
                                              std::span<const Ipv4> exclusions) {
  std::vector<HostRecord> kept;
  for (const auto& h : hosts) {
    if (h.role != HostRole::candidate_target) continue;
    if (std::find(exclusions.begin(), exclusions.end(), h.ip) != exclusions.end()) continue;
    kept.push_back(h);
  }
  return kept;
}

Ipv4 default_gateway_guess(const SubnetSpec& subnet) {
  return Ipv4{subnet.network_address().value() + 1};
}

std::vector<InterfaceAddress> detect_interfaces() {
  std::vector<InterfaceAddress> found;
  ifaddrs* list = nullptr;
  if (getifaddrs(&list) != 0) return found;
  for (ifaddrs* it = list; it != nullptr; it = it->ifa_next) {
    if (it->ifa_addr == nullptr || it->ifa_netmask == nullptr) continue;
    if (it->ifa_addr->sa_family != AF_INET) continue;
    auto addr = ntohl(reinterpret_cast<sockaddr_in*>(it->ifa_addr)->sin_addr.s_addr);
    auto mask = ntohl(reinterpret_cast<sockaddr_in*>(it->ifa_netmask)->sin_addr.s_addr);
    if ((addr >> 24) == 127) continue;
    int prefix = std::popcount(mask);
    if (prefix > kMaxPrefix) continue;
    found.push_back({it->ifa_name, Ipv4{addr}, SubnetSpec{Ipv4{addr}, prefix}});
  }
  freeifaddrs(list);
  return found;
}

}  // namespace pentestxx::netcalc
