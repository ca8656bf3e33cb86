#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pentestxx/common/ipv4.hpp"

namespace pentestxx::netcalc {

inline constexpr int kMaxPrefix = 30;

/// A normalized IPv4 subnet. Host bits of the network address are always zero
/// and the prefix is in [0, 30]; /31 and /32 have no usable host range.
class SubnetSpec {
 public:
  SubnetSpec(Ipv4 network, int prefix_length);

  Ipv4 network_address() const { return network_; }
  int prefix_length() const { return prefix_; }
  std::uint32_t netmask() const;
  Ipv4 broadcast_address() const;
  bool contains(Ipv4 ip) const;
  std::string to_string() const;

  friend bool operator==(const SubnetSpec&, const SubnetSpec&) = default;

 private:
  Ipv4 network_;
  int prefix_;
};

enum class HostRole { candidate_target, default_gateway, dhcp_server, attacker_self, excluded };

const char* to_string(HostRole role);

struct HostRecord {
  Ipv4 ip;
  HostRole role = HostRole::candidate_target;
  bool alive = true;

  friend bool operator==(const HostRecord&, const HostRecord&) = default;
};

SubnetSpec parse_cidr(std::string_view text);

/// 2^(32 - prefix) - 2
std::uint64_t host_count(const SubnetSpec& subnet);

/// Ascending usable addresses, network and broadcast excluded.
std::vector<Ipv4> enumerate_hosts(const SubnetSpec& subnet);

/// Keeps candidate targets that are neither excluded nor the attacker.
std::vector<HostRecord> filter_infrastructure(std::span<const HostRecord> hosts,
                                              std::span<const Ipv4> exclusions);

/// Live-mode heuristic: the lowest host address is assumed to be the gateway.
Ipv4 default_gateway_guess(const SubnetSpec& subnet);

struct InterfaceAddress {
  std::string name;
  Ipv4 address;
  SubnetSpec subnet;
};

/// First non-loopback IPv4 interface, read from the host's interface table.
/// Returns an empty vector when nothing usable is configured.
std::vector<InterfaceAddress> detect_interfaces();

}  // namespace pentestxx::netcalc
