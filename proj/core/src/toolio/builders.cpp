#include "pentestxx/toolio/builders.hpp"

#include <algorithm>
#include <cctype>

#include "pentestxx/common/error.hpp"

namespace pentestxx::toolio {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> curl_prefix(const HttpOptions& options) {
  std::vector<std::string> args{"-s", "-m", std::to_string(options.max_seconds)};
  if (options.cookie_jar) {
    args.insert(args.end(), {"-c", options.cookie_jar->string(), "-b", options.cookie_jar->string()});
  }
  return args;
}

void require_port(int port) {
  if (port < 1 || port > 65535) throw Error(ErrorCode::invalid_argument, "port out of range: " + std::to_string(port));
}

std::string ssh_destination(std::string_view user, Ipv4 ip) {
  return std::string(user) + "@" + ip.to_string();
}

}  // namespace

CommandSpec build_ping_scan(const netcalc::SubnetSpec& subnet) {
  return make_command("nmap", {"-sn", "-T4", subnet.to_string()}, false);
}

CommandSpec build_full_scan(std::string_view ip) {
  return make_command("nmap", {"-p-", "-A", "-T4", Ipv4::parse(ip).to_string()}, false);
}

bool is_http_url(std::string_view url) {
  return (url.starts_with("http://") && url.size() > 7) || (url.starts_with("https://") && url.size() > 8);
}

CommandSpec build_dir_scan(std::string_view url, const fs::path& wordlist) {
  if (!is_http_url(url)) throw Error(ErrorCode::invalid_argument, "directory scan needs an http(s) URL, got '" + std::string(url) + "'");
  return make_command("gobuster", {"dir", "-u", std::string(url), "-w", wordlist.string()}, false);
}

std::string normalize_md5(std::string_view hash) {
  std::string out;
  out.reserve(hash.size());
  for (char c : hash) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  const bool hex = std::all_of(out.begin(), out.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
  if (out.size() != 32 || !hex) {
    throw Error(ErrorCode::invalid_argument,
                "unsupported hash shape (need 32 hex chars for MD5): '" + std::string(hash) + "'");
  }
  return out;
}

CommandSpec build_hash_crack(std::string_view hash, const fs::path& wordlist) {
  return make_command("hashcat", {"-m", "0", "-a", "0", normalize_md5(hash), wordlist.string()}, true);
}

ZipCrackPipeline build_zip_crack_pipeline(const fs::path& zip, const fs::path& wordlist) {
  std::error_code ec;
  if (!fs::is_regular_file(zip, ec)) throw Error(ErrorCode::not_found, "archive not found: " + zip.string());
  ZipCrackPipeline p;
  p.hash_file = zip;
  p.hash_file += ".hash";
  p.stages.push_back(make_command("zip2john", {zip.string()}, false));
  p.stages.push_back(make_command("john", {"--wordlist=" + wordlist.string(), p.hash_file.string()}, true));
  return p;
}

CommandSpec build_hydra(std::string_view user, const fs::path& wordlist, Ipv4 ip, int port,
                        const HydraOptions& options) {
  require_port(port);
  std::string target = "ssh://" + ip.to_string();
  if (port != 22) target += ":" + std::to_string(port);
  std::vector<std::string> args{"-l", std::string(user), "-P", wordlist.string(), target,
                                "-t", std::to_string(options.tasks)};
  if (options.stop_on_first) args.emplace_back("-f");
  if (options.verbose) args.emplace_back("-V");
  return make_command("hydra", std::move(args), true);
}

CommandSpec build_export_list(Ipv4 ip) { return make_command("showmount", {"-e", ip.to_string()}, false); }

fs::path nfs_mount_point(const fs::path& mount_root, std::string_view export_path) {
  std::string name = "nfs_mount_";
  for (char c : export_path) name.push_back(c == '/' ? '_' : c);
  return mount_root / name;
}

CommandSpec build_mkdir(const fs::path& dir) { return make_command("mkdir", {"-p", dir.string()}, false); }

CommandSpec build_nfs_mount(Ipv4 ip, std::string_view export_path, const fs::path& mount_point) {
  return make_command("mount", {"-t", "nfs", "-o", "ro,nolock", ip.to_string() + ":" + std::string(export_path),
                                mount_point.string()},
                      false);
}

CommandSpec build_list_files(const fs::path& dir) {
  return make_command("find", {dir.string(), "-type", "f"}, false);
}

CommandSpec build_copy(const fs::path& from, const fs::path& to) {
  return make_command("cp", {from.string(), to.string()}, false);
}

CommandSpec build_unzip(const fs::path& zip, std::string_view password, const fs::path& dest) {
  std::vector<std::string> args;
  if (!password.empty()) args.insert(args.end(), {"-P", std::string(password)});
  args.insert(args.end(), {"-o", zip.string(), "-d", dest.string()});
  return make_command("unzip", std::move(args), false);
}

CommandSpec build_ftp_list(Ipv4 ip, std::string_view user, std::string_view password) {
  return make_command("curl", {"-s", "-l", "--user", std::string(user) + ":" + std::string(password),
                               "ftp://" + ip.to_string() + "/"},
                      false);
}

CommandSpec build_ftp_fetch(Ipv4 ip, std::string_view remote_path, std::string_view user,
                            std::string_view password) {
  std::string path(remote_path);
  if (!path.starts_with('/')) path.insert(path.begin(), '/');
  return make_command("curl", {"-s", "--user", std::string(user) + ":" + std::string(password),
                               "ftp://" + ip.to_string() + path},
                      false);
}

CommandSpec build_http_get(std::string_view url, const HttpOptions& options, bool gate_required) {
  if (!is_http_url(url)) throw Error(ErrorCode::invalid_argument, "not an http(s) URL: '" + std::string(url) + "'");
  auto args = curl_prefix(options);
  args.emplace_back(url);
  return make_command("curl", std::move(args), gate_required);
}

CommandSpec build_http_post_form(std::string_view url, std::string_view form_data, const HttpOptions& options,
                                 bool gate_required) {
  if (!is_http_url(url)) throw Error(ErrorCode::invalid_argument, "not an http(s) URL: '" + std::string(url) + "'");
  auto args = curl_prefix(options);
  args.insert(args.end(), {"-d", std::string(form_data), std::string(url)});
  return make_command("curl", std::move(args), gate_required);
}

CommandSpec build_http_upload(std::string_view url, std::string_view field, const fs::path& file,
                              const HttpOptions& options) {
  if (!is_http_url(url)) throw Error(ErrorCode::invalid_argument, "not an http(s) URL: '" + std::string(url) + "'");
  auto args = curl_prefix(options);
  args.insert(args.end(), {"-F", std::string(field) + "=@" + file.string(), std::string(url)});
  return make_command("curl", std::move(args), true);
}

CommandSpec build_ssh_key_login(const fs::path& key, std::string_view user, Ipv4 ip, int port,
                                std::string_view passphrase) {
  require_port(port);
  std::vector<std::string> args;
  std::string program = "ssh";
  if (!passphrase.empty()) {
    program = "sshpass";
    args = {"-P", "passphrase", "-p", std::string(passphrase), "ssh"};
  }
  args.insert(args.end(), {"-i", key.string()});
  if (port != 22) args.insert(args.end(), {"-p", std::to_string(port)});
  if (passphrase.empty()) args.insert(args.end(), {"-o", "BatchMode=yes"});
  args.insert(args.end(), {"-o", "StrictHostKeyChecking=no", ssh_destination(user, ip), "id"});
  return make_command(program, std::move(args), true);
}

CommandSpec build_ssh_password_login(std::string_view user, std::string_view password, Ipv4 ip, int port) {
  require_port(port);
  std::vector<std::string> args{"-p", std::string(password), "ssh"};
  if (port != 22) args.insert(args.end(), {"-p", std::to_string(port)});
  args.insert(args.end(), {"-o", "StrictHostKeyChecking=no", "-o", "PubkeyAuthentication=no",
                           ssh_destination(user, ip), "id"});
  return make_command("sshpass", std::move(args), true);
}

std::string join_url(std::string_view base, std::string_view path) {
  std::string out(base);
  while (out.ends_with('/')) out.pop_back();
  if (!path.starts_with('/')) out.push_back('/');
  out += path;
  return out;
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

}  // namespace pentestxx::toolio
