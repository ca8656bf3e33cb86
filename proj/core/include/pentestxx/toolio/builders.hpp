#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pentestxx/common/ipv4.hpp"
#include "pentestxx/netcalc/netcalc.hpp"
#include "pentestxx/toolio/command.hpp"

// Command builders for every external program the engine drives. Builders are
// pure; they validate inputs and never touch the network.

namespace pentestxx::toolio {

inline constexpr int kHydraTasks = 4;

// -- nmap ---------------------------------------------------------------------
CommandSpec build_ping_scan(const netcalc::SubnetSpec& subnet);
CommandSpec build_full_scan(std::string_view ip);

// -- gobuster -----------------------------------------------------------------
CommandSpec build_dir_scan(std::string_view url, const std::filesystem::path& wordlist);

// -- cracking -----------------------------------------------------------------

/// Lowercases and checks an MD5-shaped digest (exactly 32 hex characters).
/// Other hash shapes are rejected.
std::string normalize_md5(std::string_view hash);

CommandSpec build_hash_crack(std::string_view hash, const std::filesystem::path& wordlist);

/// zip2john writes the extracted hash to stdout; the caller stores it in
/// hash_file before running the john stage.
struct ZipCrackPipeline {
  std::filesystem::path hash_file;
  std::vector<CommandSpec> stages;  // [extract, crack]
};

ZipCrackPipeline build_zip_crack_pipeline(const std::filesystem::path& zip,
                                          const std::filesystem::path& wordlist);

struct HydraOptions {
  int tasks = kHydraTasks;
  bool stop_on_first = true;
  bool verbose = true;
};

CommandSpec build_hydra(std::string_view user, const std::filesystem::path& wordlist, Ipv4 ip,
                        int port = 22, const HydraOptions& options = {});

// -- nfs ----------------------------------------------------------------------
CommandSpec build_export_list(Ipv4 ip);
/// Local mount point for an export, e.g. /srv/nfs -> <root>/nfs_mount__srv_nfs
std::filesystem::path nfs_mount_point(const std::filesystem::path& mount_root, std::string_view export_path);
CommandSpec build_mkdir(const std::filesystem::path& dir);
CommandSpec build_nfs_mount(Ipv4 ip, std::string_view export_path, const std::filesystem::path& mount_point);
CommandSpec build_list_files(const std::filesystem::path& dir);
CommandSpec build_copy(const std::filesystem::path& from, const std::filesystem::path& to);
CommandSpec build_unzip(const std::filesystem::path& zip, std::string_view password,
                        const std::filesystem::path& dest);

// -- ftp / http via curl ------------------------------------------------------
CommandSpec build_ftp_list(Ipv4 ip, std::string_view user, std::string_view password);
CommandSpec build_ftp_fetch(Ipv4 ip, std::string_view remote_path, std::string_view user,
                            std::string_view password);

struct HttpOptions {
  std::optional<std::filesystem::path> cookie_jar;  // read and write
  int max_seconds = 10;
};

CommandSpec build_http_get(std::string_view url, const HttpOptions& options = {}, bool gate_required = false);
CommandSpec build_http_post_form(std::string_view url, std::string_view form_data, const HttpOptions& options,
                                 bool gate_required = true);
CommandSpec build_http_upload(std::string_view url, std::string_view field, const std::filesystem::path& file,
                              const HttpOptions& options);

// -- ssh ----------------------------------------------------------------------
CommandSpec build_ssh_key_login(const std::filesystem::path& key, std::string_view user, Ipv4 ip, int port,
                                std::string_view passphrase);
CommandSpec build_ssh_password_login(std::string_view user, std::string_view password, Ipv4 ip, int port);

/// Joins path segments of a URL ("http://h" + "/a/" + "b" -> "http://h/a/b").
std::string join_url(std::string_view base, std::string_view path);

/// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string url_encode(std::string_view text);

/// True when url starts with http:// or https://.
bool is_http_url(std::string_view url);

}  // namespace pentestxx::toolio
