#include <gtest/gtest.h>
#include <yaml-cpp/yaml.h>

#include "pentestxx/common/error.hpp"
#include "pentestxx/labsim/fixture.hpp"
#include "pentestxx/labsim/sim_backend.hpp"
#include "pentestxx/payloads/payloads.hpp"
#include "pentestxx/toolio/builders.hpp"
#include "pentestxx/toolio/parsers.hpp"

using namespace pentestxx;
using namespace pentestxx::labsim;

namespace {

std::string error_of(const std::string& doc) {
  try {
    load_fixture(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
    return e.what();
  }
  return "";
}

const char* kMinimal = R"(name: t
subnet: 10.0.0.0/24
attacker_ip: 10.0.0.4
infrastructure:
  gateway_ip: 10.0.0.1
hosts:
  - ip: 10.0.0.9
    hostname: box
    services:
      - { port: 22, service: ssh }
)";

std::shared_ptr<const LabFixture> shared(const std::string& name) {
  return std::make_shared<const LabFixture>(builtin_fixture(name));
}

}  // namespace

TEST(Fixtures, BuiltinsLoad) {
  auto names = builtin_fixture_names();
  EXPECT_EQ(names, (std::vector<std::string>{"lab", "vm1", "vm2"}));
  for (const auto& n : names) {
    auto fx = builtin_fixture(n);
    EXPECT_EQ(fx.name, n);
    EXPECT_EQ(fx.subnet.to_string(), "192.168.1.0/24");
    EXPECT_EQ(fx.attacker_ip.to_string(), "192.168.1.4");
    EXPECT_EQ(fx.infrastructure.gateway_ip.to_string(), "192.168.1.1");
  }
  EXPECT_THROW(builtin_fixture("vm3"), Error);
}

TEST(Fixtures, Vm1AndVm2Shape) {
  auto vm1 = builtin_fixture("vm1");
  ASSERT_EQ(vm1.hosts.size(), 1u);
  EXPECT_EQ(vm1.hosts[0].ip.to_string(), "192.168.1.7");
  std::vector<int> ports;
  for (const auto& [p, s] : vm1.hosts[0].services) ports.push_back(p);
  EXPECT_EQ(ports, (std::vector<int>{21, 22, 80}));
  EXPECT_TRUE(vm1.hosts[0].behaviors.ftp_anonymous);

  auto vm2 = builtin_fixture("vm2");
  ASSERT_EQ(vm2.hosts.size(), 1u);
  EXPECT_EQ(vm2.hosts[0].ip.to_string(), "192.168.1.10");
  EXPECT_TRUE(vm2.hosts[0].services.contains(2049));
  EXPECT_TRUE(vm2.hosts[0].services.contains(8080));
  ASSERT_EQ(vm2.hosts[0].behaviors.nfs_exports.size(), 1u);
  EXPECT_EQ(vm2.hosts[0].behaviors.nfs_exports[0].path, "/srv/nfs");
  auto zips = vm2.hosts[0].zip_passwords();
  ASSERT_EQ(zips.size(), 1u);
  EXPECT_EQ(zips.begin()->second, "java101");
}

// The combined lab is the two single-target fixtures side by side.
TEST(Fixtures, LabHostsMatchSingleTargetFixtures) {
  auto lab = YAML::Load(builtin_fixture_document("lab"));
  auto vm1 = YAML::Load(builtin_fixture_document("vm1"));
  auto vm2 = YAML::Load(builtin_fixture_document("vm2"));
  ASSERT_EQ(lab["hosts"].size(), 2u);
  EXPECT_EQ(YAML::Dump(lab["hosts"][0]), YAML::Dump(vm1["hosts"][0]));
  EXPECT_EQ(YAML::Dump(lab["hosts"][1]), YAML::Dump(vm2["hosts"][0]));
  for (const char* key : {"subnet", "attacker_ip"}) {
    EXPECT_EQ(lab[key].as<std::string>(), vm1[key].as<std::string>());
    EXPECT_EQ(lab[key].as<std::string>(), vm2[key].as<std::string>());
  }
}

TEST(Fixtures, AliveAddressesIncludeInfrastructure) {
  auto fx = builtin_fixture("lab");
  std::vector<std::string> alive;
  for (auto ip : fx.alive_addresses()) alive.push_back(ip.to_string());
  EXPECT_EQ(alive, (std::vector<std::string>{"192.168.1.1", "192.168.1.3", "192.168.1.4", "192.168.1.7", "192.168.1.10"}));
}

TEST(Fixtures, MinimalDocument) {
  auto fx = load_fixture(kMinimal);
  ASSERT_EQ(fx.hosts.size(), 1u);
  EXPECT_EQ(fx.hosts[0].services.at(22).protocol, "tcp");
  EXPECT_FALSE(fx.infrastructure.dhcp_ip.has_value());
}

TEST(Fixtures, ValidationErrorsNameTheLine) {
  std::string doc = kMinimal;
  EXPECT_NE(error_of("name: [unclosed").find("line "), std::string::npos);
  EXPECT_NE(error_of("- just a list").find("mapping"), std::string::npos);

  auto bad_port = doc;
  bad_port.replace(bad_port.find("port: 22"), 8, "port: 99999");
  auto msg = error_of(bad_port);
  EXPECT_TRUE(msg.starts_with("line 10:")) << msg;

  auto outside = doc;
  outside.replace(outside.find("10.0.0.9"), 8, "10.9.9.9");
  EXPECT_NE(error_of(outside).find("not a host address"), std::string::npos);

  auto missing = doc;
  missing.replace(missing.find("attacker_ip: 10.0.0.4\n"), 22, "");
  EXPECT_NE(error_of(missing).find("attacker_ip"), std::string::npos);

  auto slash31 = doc;
  slash31.replace(slash31.find("/24"), 3, "/31");
  EXPECT_FALSE(error_of(slash31).empty());

  auto dup = doc + "  - ip: 10.0.0.9\n    hostname: twin\n";
  EXPECT_NE(error_of(dup).find("duplicate"), std::string::npos);

  auto ftp = doc + "    behaviors:\n      ftp_anonymous: true\n";
  EXPECT_NE(error_of(ftp).find("port 21"), std::string::npos);
}

TEST(FileTree, ListsAndWalks) {
  FileTree t;
  t.add({"/srv/nfs/save.zip", false, "PK", std::nullopt});
  t.add({"/srv/nfs/sub/a.txt", false, "a", std::nullopt});
  t.add({"/srv/empty", true, "", std::nullopt});
  EXPECT_TRUE(t.is_directory("/srv/nfs"));
  EXPECT_TRUE(t.is_directory("/srv/empty"));
  EXPECT_FALSE(t.is_directory("/srv/nfs/save.zip"));
  EXPECT_EQ(t.list("/srv/nfs"), (std::vector<std::string>{"save.zip", "sub/"}));
  auto all = t.walk("/srv");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0]->path, "/srv/nfs/save.zip");
  EXPECT_EQ(t.file("/nope"), nullptr);
}

TEST(SimBackend, ScansParseLikeRealOutput) {
  auto backend = make_sim_backend(shared("lab"));
  EXPECT_EQ(backend->name(), "sim");
  auto ping = toolio::parse_ping_scan(backend->run(toolio::build_ping_scan(netcalc::parse_cidr("192.168.1.0/24"))));
  EXPECT_TRUE(ping.diagnostics.empty());
  EXPECT_EQ(ping.items.size(), 5u);

  auto full = toolio::parse_full_scan(backend->run(toolio::build_full_scan("192.168.1.10")));
  EXPECT_TRUE(full.diagnostics.empty());
  std::vector<int> ports;
  for (const auto& p : full.items) ports.push_back(p.port);
  EXPECT_NE(std::find(ports.begin(), ports.end(), 2049), ports.end());

  auto down = backend->run(toolio::build_full_scan("192.168.1.99"));
  EXPECT_TRUE(toolio::full_scan_host_down(down));
}

TEST(SimBackend, AnonymousFtp) {
  auto backend = make_sim_backend(shared("vm1"));
  auto ip = Ipv4::parse("192.168.1.7");
  auto list = backend->run(toolio::build_ftp_list(ip, "anonymous", "anonymous"));
  EXPECT_EQ(toolio::parse_name_list(list.stdout_text), std::vector<std::string>{"note.txt"});
  auto fetch = backend->run(toolio::build_ftp_fetch(ip, "note.txt", "anonymous", "anonymous"));
  EXPECT_NE(fetch.stdout_text.find("cd73502828457d15655bbd7a63fb0bc8"), std::string::npos);
  auto wrong = backend->run(toolio::build_ftp_list(ip, "root", "guess"));
  EXPECT_NE(wrong.exit_status, 0);
}

TEST(SimBackend, UnmodeledAndListenerErrors) {
  auto backend = make_sim_backend(shared("vm1"));
  try {
    backend->run(toolio::make_command("telnet", {"192.168.1.7"}, false));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unmodeled);
  }
  auto l = backend->listen(6655);
  EXPECT_EQ(l->port(), 6655);
  try {
    backend->listen(6655);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::port_in_use);
  }
  try {
    payloads::await_connection(*l, std::chrono::milliseconds(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::timeout);
  }
}

TEST(SimBackend, InstancesDoNotShareState) {
  auto fx = shared("vm1");
  auto a = make_sim_backend(fx);
  auto b = make_sim_backend(fx);
  auto la = a->listen(6655);
  EXPECT_NO_THROW(b->listen(6655));
}

TEST(SimBackend, HintsComeFromTheFixture) {
  auto hints = make_sim_backend(shared("vm2"))->network_hints();
  ASSERT_TRUE(hints.subnet && hints.attacker_ip && hints.gateway_ip && hints.dhcp_ip);
  EXPECT_EQ(hints.subnet->to_string(), "192.168.1.0/24");
  EXPECT_EQ(hints.dhcp_ip->to_string(), "192.168.1.3");
}

TEST(Fixtures, ResolveAcceptsPaths) {
  EXPECT_EQ(resolve_fixture("vm2").name, "vm2");
  EXPECT_THROW(resolve_fixture("/nonexistent/fixture.yaml"), Error);
}
