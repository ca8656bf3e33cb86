#include <gtest/gtest.h>

#include "pentestxx/common/error.hpp"
#include "pentestxx/netcalc/netcalc.hpp"

using namespace pentestxx;
using namespace pentestxx::netcalc;

TEST(Netcalc, HostCountForEveryPrefix) {
  for (int p = 0; p <= kMaxPrefix; ++p) {
    SubnetSpec s(Ipv4::parse("10.0.0.0"), p);
    const std::uint64_t expected = (std::uint64_t{1} << (32 - p)) - 2;
    EXPECT_EQ(host_count(s), expected) << "/" << p;
  }
}

TEST(Netcalc, EnumerationMatchesCountExhaustively) {
  // Every network address of every /p for p >= 24 inside 192.168.0.0/16.
  for (int p = 24; p <= kMaxPrefix; ++p) {
    const std::uint32_t block = 1u << (32 - p);
    for (std::uint32_t net = 0xC0A80000; net < 0xC0A90000; net += block) {
      SubnetSpec s(Ipv4(net), p);
      auto hosts = enumerate_hosts(s);
      ASSERT_EQ(hosts.size(), host_count(s));
      ASSERT_EQ(hosts.front().value(), net + 1);
      ASSERT_EQ(hosts.back().value(), net + block - 2);
      for (std::size_t i = 1; i < hosts.size(); ++i) ASSERT_LT(hosts[i - 1], hosts[i]);
      for (auto h : hosts) ASSERT_TRUE(s.contains(h));
      ASSERT_FALSE(s.contains(Ipv4(net + block)));
      if (net > 0) ASSERT_FALSE(s.contains(Ipv4(net - 1)));
    }
  }
}

TEST(Netcalc, EnumerationLengthForShortPrefixes) {
  // Large enough to be real, small enough to materialize.
  for (int p = 12; p < 24; ++p) {
    SubnetSpec s(Ipv4::parse("10.0.0.0"), p);
    EXPECT_EQ(enumerate_hosts(s).size(), host_count(s)) << "/" << p;
  }
}

TEST(Netcalc, RejectsSlash31And32) {
  EXPECT_THROW(parse_cidr("192.168.1.0/31"), Error);
  EXPECT_THROW(parse_cidr("192.168.1.1/32"), Error);
  EXPECT_THROW(SubnetSpec(Ipv4::parse("192.168.1.0"), 31), Error);
  EXPECT_THROW(SubnetSpec(Ipv4::parse("192.168.1.0"), 32), Error);
  EXPECT_THROW(SubnetSpec(Ipv4::parse("192.168.1.0"), -1), Error);
}

TEST(Netcalc, ParseCidrNormalizesHostBits) {
  auto s = parse_cidr("192.168.1.77/24");
  EXPECT_EQ(s.network_address().to_string(), "192.168.1.0");
  EXPECT_EQ(s.prefix_length(), 24);
  EXPECT_EQ(s.to_string(), "192.168.1.0/24");
  EXPECT_EQ(s.broadcast_address().to_string(), "192.168.1.255");
  EXPECT_EQ(s.netmask(), 0xFFFFFF00u);
  EXPECT_EQ(parse_cidr("0.0.0.0/0").netmask(), 0u);
}

TEST(Netcalc, ParseCidrRejectsJunk) {
  for (const char* bad : {"", "192.168.1.0", "192.168.1.0/", "192.168.1.0/abc", "192.168.1.0/24/1", "x/24",
                          "192.168.1.0/33", "192.168.1.0/-2", "192.168.1.0 /24"}) {
    EXPECT_THROW(parse_cidr(bad), Error) << bad;
  }
}

TEST(Netcalc, FilterInfrastructure) {
  const std::vector<HostRecord> hosts = {
      {Ipv4::parse("192.168.1.1"), HostRole::default_gateway, true},
      {Ipv4::parse("192.168.1.2"), HostRole::dhcp_server, true},
      {Ipv4::parse("192.168.1.4"), HostRole::attacker_self, true},
      {Ipv4::parse("192.168.1.5"), HostRole::candidate_target, true},
      {Ipv4::parse("192.168.1.9"), HostRole::candidate_target, true},
      {Ipv4::parse("192.168.1.10"), HostRole::candidate_target, true},
  };
  const std::vector<Ipv4> excl = {Ipv4::parse("192.168.1.9")};
  auto out = filter_infrastructure(hosts, excl);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].ip.to_string(), "192.168.1.5");
  EXPECT_EQ(out[1].ip.to_string(), "192.168.1.10");
  for (const auto& h : out) EXPECT_EQ(h.role, HostRole::candidate_target);
}

TEST(Netcalc, GatewayGuessIsLowestHost) {
  EXPECT_EQ(default_gateway_guess(parse_cidr("192.168.1.0/24")).to_string(), "192.168.1.1");
  EXPECT_EQ(default_gateway_guess(parse_cidr("10.20.30.64/26")).to_string(), "10.20.30.65");
}

TEST(Netcalc, RoleNames) {
  EXPECT_STREQ(to_string(HostRole::default_gateway), "default_gateway");
  EXPECT_STREQ(to_string(HostRole::attacker_self), "attacker_self");
}
