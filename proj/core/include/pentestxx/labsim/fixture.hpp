#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pentestxx/common/ipv4.hpp"
#include "pentestxx/netcalc/netcalc.hpp"

// Declarative description of a simulated lab network. The document format is
// YAML; see docs/fixture-format.md.

namespace pentestxx::labsim {

struct SimService {
  int port = 0;
  std::string protocol = "tcp";
  std::string service;
  std::string version;
};

struct ArchiveMember {
  std::string name;
  std::string content;  // resolved from `from` at load time when given
  std::string from;
};

struct SimArchive {
  std::string password;  // empty: not encrypted
  std::vector<ArchiveMember> members;
};

struct SimFile {
  std::string path;
  bool directory = false;
  std::string content;
  std::optional<SimArchive> archive;
};

enum class Mechanism { ssh_password, ssh_key, http_form };

const char* to_string(Mechanism m);

struct SimCredential {
  std::string user;
  std::string secret;       // password, or key passphrase for ssh_key
  Mechanism mechanism = Mechanism::ssh_password;
  std::string target;       // http_form: login path
  std::string key;          // ssh_key: path of the private key in the tree
};

struct WebLogin {
  std::string path;  // URL path of the login form and its POST target
  std::string user_field;
  std::string password_field;
  std::string success_page;  // URL path served after a good login
};

struct WebUpload {
  std::string form_page;  // needs an authenticated session
  std::string action;
  std::string field;
  std::string store_dir;  // URL directory where uploads land
  bool executes_php = true;
};

struct WebLfi {
  std::string path;           // e.g. /dev/index.php
  std::string param;          // query prefix before the traversal value
  std::string register_path;  // path?query that creates an account
  bool requires_auth = true;
  int min_depth = 1;
};

struct WebSite {
  int port = 80;
  std::string root;  // filesystem directory served at "/"
  std::optional<WebLogin> login;
  std::optional<WebUpload> upload;
  std::optional<WebLfi> lfi;
};

struct NfsExport {
  std::string path;
  std::string clients = "*";
};

struct SimBehaviors {
  bool ftp_anonymous = false;
  std::string ftp_root = "/srv/ftp";
  std::vector<WebSite> web;
  std::vector<NfsExport> nfs_exports;
};

/// Virtual file tree; directories are explicit entries or implied by paths.
class FileTree {
 public:
  void add(SimFile file);
  const SimFile* file(std::string_view path) const;
  bool exists(std::string_view path) const;
  bool is_directory(std::string_view path) const;
  /// Immediate children; directories carry a trailing '/'. Sorted.
  std::vector<std::string> list(std::string_view dir) const;
  /// Regular files under dir, recursively, sorted by path.
  std::vector<const SimFile*> walk(std::string_view dir) const;
  const std::map<std::string, SimFile>& entries() const { return entries_; }

 private:
  std::map<std::string, SimFile> entries_;
};

struct SimHost {
  Ipv4 ip;
  std::string hostname;
  std::string mac;
  std::map<int, SimService> services;
  FileTree files;
  std::vector<SimCredential> credentials;
  SimBehaviors behaviors;

  const WebSite* web_site(int port) const;
  /// Archive path -> password, for encrypted archives.
  std::map<std::string, std::string> zip_passwords() const;
};

struct Infrastructure {
  Ipv4 gateway_ip;
  std::optional<Ipv4> dhcp_ip;
};

struct LabFixture {
  std::string name;
  netcalc::SubnetSpec subnet{Ipv4{0}, 0};
  Ipv4 attacker_ip;
  Infrastructure infrastructure;
  std::vector<SimHost> hosts;

  const SimHost* host(Ipv4 ip) const;
  /// Every address that answers a ping scan, ascending.
  std::vector<Ipv4> alive_addresses() const;
};

/// Parses and validates a fixture document. Throws Error(parse_error) with a
/// "line N:" prefix on any schema violation.
LabFixture load_fixture(std::string_view document);
LabFixture load_fixture_file(const std::string& path);

/// Names of the fixtures compiled into the library: lab, vm1, vm2.
std::vector<std::string> builtin_fixture_names();
std::string builtin_fixture_document(std::string_view name);
LabFixture builtin_fixture(std::string_view name);

/// Resolves a --fixture argument: builtin name or path to a YAML file.
LabFixture resolve_fixture(std::string_view name_or_path);

}  // namespace pentestxx::labsim
