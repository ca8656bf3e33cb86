#include "pentestxx/labsim/sim_backend.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "pentestxx/common/error.hpp"
#include "pentestxx/common/md5.hpp"
#include "pentestxx/common/strings.hpp"
#include "pentestxx/payloads/payloads.hpp"
#include "pentestxx/toolio/wordlist.hpp"

namespace pentestxx::labsim {

namespace fs = std::filesystem;
using toolio::CommandSpec;
using toolio::ToolOutput;

namespace {

constexpr std::string_view kNmapBanner = "Starting Nmap 7.94SVN ( https://nmap.org ) at 2024-11-20 10:00 UTC\n";

ToolOutput out(int status, std::string stdout_text, std::string stderr_text = {}) {
  return ToolOutput{status, std::move(stdout_text), std::move(stderr_text), 0.0};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view content) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream o(p, std::ios::binary | std::ios::trunc);
  if (!o) throw Error(ErrorCode::io_error, "cannot write " + p.string());
  o << content;
}

std::string hex_encode(std::string_view s) {
  std::string h;
  for (unsigned char c : s) h += fmt::format("{:02x}", c);
  return h;
}

std::optional<std::string> hex_decode(std::string_view h) {
  if (h.size() % 2) return std::nullopt;
  std::string s;
  for (std::size_t i = 0; i < h.size(); i += 2) {
    unsigned v = 0;
    for (char c : h.substr(i, 2)) {
      v <<= 4;
      if (c >= '0' && c <= '9') v |= c - '0';
      else if (c >= 'a' && c <= 'f') v |= c - 'a' + 10;
      else return std::nullopt;
    }
    s.push_back(static_cast<char>(v));
  }
  return s;
}

std::string url_decode(std::string_view s) {
  std::string o;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      if (auto d = hex_decode(lower(s.substr(i + 1, 2)))) {
        o += *d;
        i += 2;
        continue;
      }
    }
    o.push_back(s[i] == '+' ? ' ' : s[i]);
  }
  return o;
}

struct Url {
  std::string scheme;
  Ipv4 ip;
  int port = 0;
  std::string path = "/";
  std::string query;
};

std::optional<Url> parse_url(std::string_view text) {
  Url u;
  auto sep = text.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  u.scheme = std::string(text.substr(0, sep));
  auto rest = text.substr(sep + 3);
  auto slash = rest.find('/');
  auto authority = rest.substr(0, slash);
  if (slash != std::string_view::npos) u.path = std::string(rest.substr(slash));
  if (auto q = u.path.find('?'); q != std::string::npos) {
    u.query = u.path.substr(q + 1);
    u.path.resize(q);
  }
  u.port = u.scheme == "https" ? 443 : u.scheme == "ftp" ? 21 : u.scheme == "ssh" ? 22 : 80;
  if (auto colon = authority.find(':'); colon != std::string_view::npos) {
    try {
      u.port = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (const std::exception&) {
      return std::nullopt;
    }
    authority = authority.substr(0, colon);
  }
  auto ip = Ipv4::try_parse(authority);
  if (!ip) return std::nullopt;
  u.ip = *ip;
  return u;
}

std::map<std::string, std::string> parse_form(std::string_view data) {
  std::map<std::string, std::string> fields;
  for (auto pair : split(data, '&')) {
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) continue;
    fields[url_decode(pair.substr(0, eq))] = url_decode(pair.substr(eq + 1));
  }
  return fields;
}

std::string basename_of(std::string_view p) {
  auto s = p.rfind('/');
  return std::string(s == std::string_view::npos ? p : p.substr(s + 1));
}

// Splits sshpass/ssh argv into its parts.
struct SshCall {
  std::string password;    // sshpass -p
  bool passphrase_prompt = false;
  std::string key;
  int port = 22;
  std::string user;
  std::optional<Ipv4> ip;
};

std::optional<SshCall> parse_ssh(const CommandSpec& cmd) {
  SshCall call;
  const auto& a = cmd.args;
  std::size_t i = 0;
  if (cmd.program == "sshpass") {
    for (; i < a.size() && a[i] != "ssh"; ++i) {
      if (a[i] == "-P" && i + 1 < a.size()) {
        call.passphrase_prompt = true;
        ++i;
      } else if (a[i] == "-p" && i + 1 < a.size()) {
        call.password = a[++i];
      }
    }
    if (i == a.size()) return std::nullopt;
    ++i;
  }
  for (; i < a.size(); ++i) {
    if (a[i] == "-i" && i + 1 < a.size()) {
      call.key = a[++i];
    } else if (a[i] == "-p" && i + 1 < a.size()) {
      call.port = std::atoi(a[++i].c_str());
    } else if (a[i] == "-o" && i + 1 < a.size()) {
      ++i;
    } else if (auto at = a[i].find('@'); at != std::string::npos && !call.ip) {
      call.user = a[i].substr(0, at);
      call.ip = Ipv4::try_parse(a[i].substr(at + 1));
      if (!call.ip) return std::nullopt;
    }
  }
  if (!call.ip) return std::nullopt;
  return call;
}

std::string autoindex(std::string_view url_path, const std::vector<std::string>& names) {
  std::string body = fmt::format(
      "<!DOCTYPE HTML PUBLIC \"-//W3C//DTD HTML 3.2 Final//EN\">\n<html>\n <head>\n  <title>Index of {0}</title>\n"
      " </head>\n <body>\n<h1>Index of {0}</h1>\n<ul><li><a href=\"../\">Parent Directory</a></li>\n",
      url_path);
  for (const auto& n : names) body += fmt::format("<li><a href=\"{0}\">{0}</a></li>\n", n);
  body += "</ul>\n</body></html>\n";
  return body;
}

std::string not_found_page(std::string_view url_path, const Url& u) {
  return fmt::format(
      "<!DOCTYPE HTML PUBLIC \"-//IETF//DTD HTML 2.0//EN\">\n<html><head>\n<title>404 Not Found</title>\n"
      "</head><body>\n<h1>Not Found</h1>\n<p>The requested URL {} was not found on this server.</p>\n<hr>\n"
      "<address>Apache/2.4.38 (Debian) Server at {} Port {}</address>\n</body></html>\n",
      url_path, u.ip.to_string(), u.port);
}

struct ListenerState {
  int port = 0;
  bool open = true;
  std::optional<Ipv4> remote;
  std::string banner;
};

struct SharedState {
  std::mutex mu;
  std::map<int, std::shared_ptr<ListenerState>> listeners;
};

class SimListener : public toolio::Listener {
 public:
  SimListener(std::shared_ptr<SharedState> shared, std::shared_ptr<ListenerState> st)
      : shared_(std::move(shared)), st_(std::move(st)) {}

  ~SimListener() override {
    std::lock_guard lock(shared_->mu);
    st_->open = false;
    auto it = shared_->listeners.find(st_->port);
    if (it != shared_->listeners.end() && it->second == st_) shared_->listeners.erase(it);
  }

  int port() const override { return st_->port; }

  toolio::ShellSessionHandle await_connection(std::chrono::milliseconds timeout) override {
    std::lock_guard lock(shared_->mu);
    // The simulated payload runs synchronously inside the trigger request, so
    // a connection either already happened or never will.
    if (!st_->remote) {
      throw Error(ErrorCode::timeout, fmt::format("no connection on port {} within {} ms", st_->port, timeout.count()));
    }
    return {*st_->remote, st_->port, st_->banner, nullptr};
  }

 private:
  std::shared_ptr<SharedState> shared_;
  std::shared_ptr<ListenerState> st_;
};

class SimBackend : public toolio::ToolBackend {
 public:
  explicit SimBackend(std::shared_ptr<const LabFixture> fx) : fx_(std::move(fx)), shared_(std::make_shared<SharedState>()) {}

  std::string_view name() const override { return "sim"; }

  ToolOutput run(const CommandSpec& cmd) override {
    std::lock_guard lock(shared_->mu);
    const auto& p = cmd.program;
    if (p == "nmap") return nmap(cmd);
    if (p == "curl") return curl(cmd);
    if (p == "gobuster") return gobuster(cmd);
    if (p == "hashcat") return hashcat(cmd);
    if (p == "zip2john") return zip2john(cmd);
    if (p == "john") return john(cmd);
    if (p == "unzip") return unzip(cmd);
    if (p == "showmount") return showmount(cmd);
    if (p == "mount") return mount(cmd);
    if (p == "mkdir") return mkdir(cmd);
    if (p == "find") return find(cmd);
    if (p == "cp") return copy(cmd);
    if (p == "ssh" || p == "sshpass") return ssh(cmd);
    if (p == "hydra") return hydra(cmd);
    unmodeled(cmd);
  }

  std::unique_ptr<toolio::Listener> listen(int port) override {
    std::lock_guard lock(shared_->mu);
    if (port < 1 || port > 65535) throw Error(ErrorCode::invalid_argument, "port out of range: " + std::to_string(port));
    if (shared_->listeners.contains(port)) {
      throw Error(ErrorCode::port_in_use, fmt::format("port {} is already listening", port));
    }
    auto st = std::make_shared<ListenerState>();
    st->port = port;
    shared_->listeners[port] = st;
    return std::make_unique<SimListener>(shared_, st);
  }

  toolio::NetworkHints network_hints() const override {
    return {fx_->subnet, fx_->attacker_ip, fx_->infrastructure.gateway_ip, fx_->infrastructure.dhcp_ip};
  }

 private:
  [[noreturn]] static void unmodeled(const CommandSpec& cmd) {
    throw Error(ErrorCode::unmodeled, "simulated lab has no behavior for: " + cmd.display_line());
  }

  const SimHost* host(Ipv4 ip) const { return fx_->host(ip); }

  // -- nmap -------------------------------------------------------------------
  ToolOutput nmap(const CommandSpec& cmd) {
    const auto& a = cmd.args;
    if (a.size() == 3 && a[0] == "-sn") {
      auto subnet = netcalc::parse_cidr(a[2]);
      std::string s(kNmapBanner);
      int up = 0;
      for (auto ip : fx_->alive_addresses()) {
        if (!subnet.contains(ip)) continue;
        ++up;
        s += "Nmap scan report for " + ip.to_string() + "\n";
        if (ip == fx_->attacker_ip) {
          s += "Host is up.\n";
          continue;
        }
        s += fmt::format("Host is up (0.000{}s latency).\n", 200 + (ip.value() & 0xff));
        if (auto h = host(ip)) {
          s += "MAC Address: " + h->mac + " (Oracle VirtualBox virtual NIC)\n";
        } else {
          s += fmt::format("MAC Address: 52:54:00:12:35:{:02X} (QEMU virtual NIC)\n", ip.value() & 0xff);
        }
      }
      s += fmt::format("Nmap done: {} IP addresses ({} hosts up) scanned in 2.05 seconds\n",
                       netcalc::host_count(subnet) + 2, up);
      return out(0, s);
    }
    if (a.size() == 4 && a[0] == "-p-") {
      auto ip = Ipv4::parse(a[3]);
      const auto* h = host(ip);
      std::string s(kNmapBanner);
      if (!h) {
        s += "Note: Host seems down. If it is really up, but blocking our ping probes, try -Pn\n"
             "Nmap done: 1 IP address (0 hosts up) scanned in 3.04 seconds\n";
        return out(0, s);
      }
      s += "Nmap scan report for " + ip.to_string() + "\n";
      s += "Host is up (0.00042s latency).\n";
      s += fmt::format("Not shown: {} closed tcp ports (reset)\n", 65535 - h->services.size());
      std::size_t pw = 4, sw = 7;
      for (const auto& [port, svc] : h->services) {
        pw = std::max(pw, std::to_string(port).size() + svc.protocol.size() + 1);
        sw = std::max(sw, svc.service.size());
      }
      s += fmt::format("{:<{}} STATE {:<{}} VERSION\n", "PORT", pw, "SERVICE", sw);
      for (const auto& [port, svc] : h->services) {
        auto id = std::to_string(port) + "/" + svc.protocol;
        s += fmt::format("{:<{}} open  {:<{}} {}\n", id, pw, svc.service, sw, svc.version);
        s += script_lines(*h, port);
      }
      s += "MAC Address: " + h->mac + " (Oracle VirtualBox virtual NIC)\n";
      s += "Service Info: OS: Linux; CPE: cpe:/o:linux:linux_kernel\n\n";
      s += "Service detection performed. Please report any incorrect results at https://nmap.org/submit/ .\n";
      s += "Nmap done: 1 IP address (1 host up) scanned in 14.20 seconds\n";
      return out(0, s);
    }
    unmodeled(cmd);
  }

  static std::string script_lines(const SimHost& h, int port) {
    std::string s;
    if (port == 21 && h.behaviors.ftp_anonymous) {
      s += "| ftp-anon: Anonymous FTP login allowed (FTP code 230)\n";
      auto files = h.files.walk(h.behaviors.ftp_root);
      for (std::size_t i = 0; i < files.size(); ++i) {
        s += fmt::format("{}-rw-r--r--    1 0        0        {:>8} May 30  2021 {}\n",
                         i + 1 == files.size() ? "|_" : "| ", files[i]->content.size(), basename_of(files[i]->path));
      }
    }
    if (const auto* site = h.web_site(port)) {
      std::string title = "Site doesn't have a title (text/html).";
      if (const auto* idx = h.files.file(site->root + "/index.html")) {
        auto b = idx->content.find("<title>");
        auto e = idx->content.find("</title>");
        if (b != std::string::npos && e != std::string::npos) title = idx->content.substr(b + 7, e - b - 7);
      }
      s += "|_http-title: " + title + "\n";
      s += "|_http-server-header: Apache/2.4.38 (Debian)\n";
    }
    if (port == 2049 && !h.behaviors.nfs_exports.empty()) {
      s += "| rpcinfo:\n|   program version    port/proto  service\n"
           "|   100003  3           2049/tcp   nfs\n|_  100005  1,2,3      45879/tcp  mountd\n";
    }
    return s;
  }

  // -- curl -------------------------------------------------------------------
  struct CurlCall {
    bool list_only = false;
    std::string user;
    std::string jar;
    std::optional<std::string> post;
    std::optional<std::pair<std::string, std::string>> upload;  // field, local file
    std::string url;
  };

  static CurlCall parse_curl(const CommandSpec& cmd) {
    CurlCall c;
    const auto& a = cmd.args;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& t = a[i];
      auto next = [&]() -> std::string {
        if (i + 1 >= a.size()) unmodeled(cmd);
        return a[++i];
      };
      if (t == "-s") continue;
      if (t == "-l") c.list_only = true;
      else if (t == "-m") next();
      else if (t == "-c" || t == "-b") c.jar = next();
      else if (t == "--user") c.user = next();
      else if (t == "-d") c.post = next();
      else if (t == "-F") {
        auto f = next();
        auto eq = f.find("=@");
        if (eq == std::string::npos) unmodeled(cmd);
        c.upload = std::make_pair(f.substr(0, eq), f.substr(eq + 2));
      } else if (t.starts_with("-")) {
        unmodeled(cmd);
      } else {
        c.url = t;
      }
    }
    return c;
  }

  ToolOutput curl(const CommandSpec& cmd) {
    auto call = parse_curl(cmd);
    auto url = parse_url(call.url);
    if (!url) return out(3, "", "curl: (3) URL using bad/illegal format or missing URL\n");
    const auto* h = host(url->ip);
    if (url->scheme == "ftp") return ftp(call, *url, h);
    if (url->scheme != "http" && url->scheme != "https") unmodeled(cmd);
    const WebSite* site = h ? h->web_site(url->port) : nullptr;
    if (!site) {
      return out(7, "", fmt::format("curl: (7) Failed to connect to {} port {}: Connection refused\n",
                                    url->ip.to_string(), url->port));
    }
    if (call.upload) return http_upload(call, *url, *h, *site);
    if (call.post) return http_post(call, *url, *h, *site);
    return http_get(call, *url, *h, *site);
  }

  ToolOutput ftp(const CurlCall& call, const Url& url, const SimHost* h) {
    if (!h || !h->services.contains(url.port)) {
      return out(7, "", fmt::format("curl: (7) Failed to connect to {} port {}: Connection refused\n",
                                    url.ip.to_string(), url.port));
    }
    auto colon = call.user.find(':');
    auto user = call.user.substr(0, colon);
    if (!h->behaviors.ftp_anonymous || (user != "anonymous" && user != "ftp")) {
      return out(67, "", "curl: (67) Access denied: 530\n");
    }
    auto path = h->behaviors.ftp_root + (url.path == "/" ? "" : url.path);
    if (call.list_only || url.path.ends_with('/')) {
      if (!h->files.is_directory(path)) return out(9, "", "curl: (9) Server denied you to change to the given directory\n");
      std::string s;
      for (auto& n : h->files.list(path)) s += (n.ends_with('/') ? n.substr(0, n.size() - 1) : n) + "\n";
      return out(0, s);
    }
    const auto* f = h->files.file(path);
    if (!f || f->directory) return out(78, "", "curl: (78) The file does not exist\n");
    return out(0, f->content);
  }

  std::string site_key(const Url& u) const { return u.ip.to_string() + ":" + std::to_string(u.port); }

  bool authenticated(const CurlCall& call, const Url& u) const {
    if (call.jar.empty()) return false;
    auto it = sessions_.find(call.jar);
    return it != sessions_.end() && it->second.contains(site_key(u));
  }

  void authenticate(const CurlCall& call, const Url& u) {
    if (!call.jar.empty()) sessions_[call.jar].insert(site_key(u));
  }

  std::string page(const SimHost& h, const WebSite& site, std::string_view url_path) const {
    const auto* f = h.files.file(site.root + std::string(url_path));
    return f ? f->content : std::string{};
  }

  ToolOutput http_post(const CurlCall& call, const Url& url, const SimHost& h, const WebSite& site) {
    std::string target = url.path + (url.query.empty() ? "" : "?" + url.query);
    if (site.lfi && !site.lfi->register_path.empty() && target == site.lfi->register_path) {
      authenticate(call, url);
      return out(0, "<html><body><p>Your account has been created. You are now logged in.</p></body></html>\n");
    }
    if (site.login && url.path == site.login->path) {
      auto form = parse_form(*call.post);
      const auto& user = form[site.login->user_field];
      const auto& pass = form[site.login->password_field];
      for (const auto& c : h.credentials) {
        if (c.mechanism == Mechanism::http_form && c.target == site.login->path && c.user == user && c.secret == pass) {
          authenticate(call, url);
          return out(0, page(h, site, site.login->success_page));
        }
      }
      return out(0, page(h, site, site.login->path) + "<p>Invalid Reg no or Password</p>\n");
    }
    return out(0, not_found_page(url.path, url));
  }

  ToolOutput http_upload(const CurlCall& call, const Url& url, const SimHost& h, const WebSite& site) {
    const auto& [field, local] = *call.upload;
    std::error_code ec;
    if (!fs::is_regular_file(local, ec)) {
      return out(26, "", "curl: (26) Failed to open/read local data from file/application\n");
    }
    if (!site.upload || url.path != site.upload->action) return out(0, not_found_page(url.path, url));
    if (!authenticated(call, url)) return out(0, page(h, site, site.login ? site.login->path : "/index.html"));
    if (field != site.upload->field) return out(0, page(h, site, site.upload->form_page));
    auto name = basename_of(local);
    auto stored = site.upload->store_dir + "/" + name;
    uploads_[site_key(url) + stored] = read_file(local);
    return out(0, page(h, site, site.upload->form_page) + "<p>Student Record updated Successfully !!</p>\n<img src=\"" +
                      stored + "\" width=\"200\" height=\"200\">\n");
  }

  ToolOutput http_get(const CurlCall& call, const Url& url, const SimHost& h, const WebSite& site) {
    if (site.lfi && url.path == site.lfi->path && url.query.starts_with(site.lfi->param)) {
      return lfi(call, url, h, site);
    }
    if (auto it = uploads_.find(site_key(url) + url.path); it != uploads_.end()) {
      if (url.path.ends_with(".php") && site.upload && site.upload->executes_php) return execute_php(it->second, h);
      return out(0, it->second);
    }
    if (site.login && !authenticated(call, url)) {
      bool gated = url.path == site.login->success_page || (site.upload && url.path == site.upload->form_page);
      if (gated) return out(0, page(h, site, site.login->path));
    }
    auto fs_path = site.root + (url.path == "/" ? "" : url.path);
    if (fs_path.size() > 1 && fs_path.ends_with('/')) fs_path.pop_back();
    if (h.files.is_directory(fs_path)) {
      for (const char* idx : {"/index.html", "/index.php"}) {
        if (const auto* f = h.files.file(fs_path + idx)) return out(0, f->content);
      }
      auto names = h.files.list(fs_path);
      // Uploaded files show up in their directory listing.
      auto prefix = site_key(url) + (url.path.ends_with('/') ? url.path : url.path + "/");
      for (const auto& [k, v] : uploads_) {
        if (k.starts_with(prefix) && k.find('/', prefix.size()) == std::string::npos) names.push_back(k.substr(prefix.size()));
      }
      std::sort(names.begin(), names.end());
      return out(0, autoindex(url.path, names));
    }
    if (const auto* f = h.files.file(fs_path)) return out(0, f->content);
    return out(0, not_found_page(url.path, url));
  }

  ToolOutput lfi(const CurlCall& call, const Url& url, const SimHost& h, const WebSite& site) {
    const auto& cfg = *site.lfi;
    if (cfg.requires_auth && !authenticated(call, url)) {
      return out(0, "<html><body><p>Access denied. Please register or log in first.</p></body></html>\n");
    }
    auto value = url_decode(std::string_view(url.query).substr(cfg.param.size()));
    int depth = 0;
    std::string_view rest = value;
    while (rest.starts_with("../")) {
      ++depth;
      rest.remove_prefix(3);
    }
    const SimFile* f = depth >= cfg.min_depth ? h.files.file("/" + std::string(rest)) : nullptr;
    if (!f || f->directory) return out(0, "<html><body><p>No results found.</p></body></html>\n");
    return out(0, "<html><body><pre>" + f->content + "</pre></body></html>\n");
  }

  ToolOutput execute_php(const std::string& body, const SimHost& h) {
    auto endpoint = payloads::parse_reverse_shell(body);
    if (!endpoint || endpoint->ip != fx_->attacker_ip) return out(0, "");
    auto it = shared_->listeners.find(endpoint->port);
    if (it == shared_->listeners.end() || !it->second->open) return out(0, "");
    it->second->remote = h.ip;
    it->second->banner = fmt::format(
        "Connection received on {} 48512\nbash: cannot set terminal process group (512): Inappropriate ioctl for device\n"
        "bash: no job control in this shell\nwww-data@{}:/var/www/html/uploads$ ",
        h.ip.to_string(), h.hostname.empty() ? "target" : h.hostname);
    // The shell holds the request open until curl's own timeout.
    return out(28, "", "curl: (28) Operation timed out\n");
  }

  // -- gobuster ---------------------------------------------------------------
  ToolOutput gobuster(const CommandSpec& cmd) {
    const auto& a = cmd.args;
    if (a.size() != 5 || a[0] != "dir" || a[1] != "-u" || a[3] != "-w") unmodeled(cmd);
    auto url = parse_url(a[2]);
    if (!url) return out(1, "", "Error: error on parsing arguments: url is invalid\n");
    std::error_code ec;
    if (!fs::is_regular_file(a[4], ec)) {
      return out(1, "", "Error: error on parsing arguments: wordlist file \"" + a[4] + "\" does not exist\n");
    }
    const auto* h = host(url->ip);
    const WebSite* site = h ? h->web_site(url->port) : nullptr;
    if (!site) {
      return out(1, "", fmt::format("Error: error on running gobuster: unable to connect to {}/: dial tcp {}:{}: connect: connection refused\n",
                                    a[2], url->ip.to_string(), url->port));
    }
    auto words = toolio::read_wordlist(a[4]);
    const std::string rule(63, '=');
    std::string s = rule + "\nGobuster v3.6\nby OJ Reeves (@TheColonial) & Christian Mehlmauer (@firefart)\n" + rule + "\n";
    s += fmt::format("[+] Url:                     {}\n[+] Method:                  GET\n[+] Threads:                 10\n"
                     "[+] Wordlist:                {}\n[+] Negative Status codes:   404\n"
                     "[+] User Agent:              gobuster/3.6\n[+] Timeout:                 10s\n",
                     a[2], a[4]);
    s += rule + "\nStarting gobuster in directory enumeration mode\n" + rule + "\n";
    std::string base = site->root;
    if (url->path != "/") base += url->path;
    while (base.size() > 1 && base.ends_with('/')) base.pop_back();
    std::string shown_base = a[2];
    while (shown_base.ends_with('/')) shown_base.pop_back();
    for (const auto& w : words) {
      auto p = base + "/" + w;
      if (w.starts_with(".ht") || w == "server-status") {
        s += fmt::format("/{:<20} (Status: 403) [Size: 277]\n", w);
      } else if (h->files.is_directory(p)) {
        s += fmt::format("/{:<20} (Status: 301) [Size: {}] [--> {}/{}/]\n", w, 300 + shown_base.size() + w.size(), shown_base, w);
      } else if (const auto* f = h->files.file(p)) {
        s += fmt::format("/{:<20} (Status: 200) [Size: {}]\n", w, f->content.size());
      }
    }
    s += fmt::format("\rProgress: {0} / {0} (100.00%)\n", words.size());
    s += rule + "\nFinished\n" + rule + "\n";
    return out(0, s);
  }

  // -- cracking ---------------------------------------------------------------
  ToolOutput hashcat(const CommandSpec& cmd) {
    const auto& a = cmd.args;
    if (a.size() != 6 || a[0] != "-m" || a[1] != "0" || a[2] != "-a" || a[3] != "0") unmodeled(cmd);
    const auto& hash = a[4];
    std::vector<std::string> words;
    try {
      words = toolio::read_wordlist(a[5]);
    } catch (const Error&) {
      return out(255, "", "ERROR: " + a[5] + ": No such file or directory\n");
    }
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < words.size() && !hit; ++i) {
      if (md5_hex(words[i]) == lower(hash)) hit = i;
    }
    auto tried = hit ? *hit + 1 : words.size();
    std::string s = "hashcat (v6.2.6) starting\n\n";
    s += fmt::format("Dictionary cache built:\n* Filename..: {}\n* Passwords.: {}\n* Keyspace..: {}\n\n", a[5],
                     words.size(), words.size());
    if (hit) s += hash + ":" + words[*hit] + "\n\n";
    s += fmt::format(
        "Session..........: hashcat\nStatus...........: {}\nHash.Mode........: 0 (MD5)\nHash.Target......: {}\n"
        "Recovered........: {}/1 ({}.00%) Digests\nProgress.........: {}/{} ({:.2f}%)\n\n",
        hit ? "Cracked" : "Exhausted", hash, hit ? 1 : 0, hit ? 100 : 0, tried, words.size(),
        words.empty() ? 100.0 : 100.0 * static_cast<double>(tried) / static_cast<double>(words.size()));
    s += "Stopped: Wed Nov 20 10:00:03 2024\n";
    return out(hit ? 0 : 1, s);
  }

  // Stand-in archive documents written by cp: marker, host, remote path.
  struct ArchiveRef {
    const SimHost* host = nullptr;
    const SimFile* file = nullptr;
  };

  std::optional<ArchiveRef> read_archive(const fs::path& local) const {
    std::string doc;
    try {
      doc = read_file(local);
    } catch (const Error&) {
      return std::nullopt;
    }
    auto lines = split_lines(doc);
    if (lines.size() < 3 || lines[0] != kArchiveMarker) return std::nullopt;
    return archive_ref(std::string(lines[1]), std::string(lines[2]));
  }

  std::optional<ArchiveRef> archive_ref(const std::string& ip, const std::string& path) const {
    auto addr = Ipv4::try_parse(ip);
    const auto* h = addr ? host(*addr) : nullptr;
    const auto* f = h ? h->files.file(path) : nullptr;
    if (!f || !f->archive) return std::nullopt;
    return ArchiveRef{h, f};
  }

  ToolOutput zip2john(const CommandSpec& cmd) {
    if (cmd.args.size() != 1) unmodeled(cmd);
    const auto& zip = cmd.args[0];
    auto ref = read_archive(zip);
    if (!ref) return out(1, "", zip + " is not a zip file\n");
    auto name = basename_of(zip);
    if (ref->file->archive->password.empty()) return out(0, "", name + " is not encrypted!\n");
    auto blob = hex_encode(ref->host->ip.to_string() + "|" + ref->file->path);
    return out(0, fmt::format("{0}:$pkzip$sim*{1}*$/pkzip$::{0}:{2}:{0}\n", name, blob,
                              join([&] {
                                std::vector<std::string> m;
                                for (const auto& mem : ref->file->archive->members) m.push_back(mem.name);
                                return m;
                              }(), ", ")),
               "ver 2.0 efh 5455 efh 7875 " + name + " PKZIP Encr: TS_chk, cmplen=1911, decmplen=2590, crc=D1A9A1A2\n");
  }

  ToolOutput john(const CommandSpec& cmd) {
    const auto& a = cmd.args;
    if (a.size() != 2 || !a[0].starts_with("--wordlist=")) unmodeled(cmd);
    std::string doc;
    try {
      doc = read_file(a[1]);
    } catch (const Error&) {
      return out(1, "", "stat: " + a[1] + ": No such file or directory\n");
    }
    auto b = doc.find("$pkzip$sim*");
    auto e = doc.find("*$/pkzip$");
    if (b == std::string::npos || e == std::string::npos || e < b) return out(0, "", "No password hashes loaded (see FAQ)\n");
    auto name = doc.substr(0, doc.find(':'));
    auto decoded = hex_decode(std::string_view(doc).substr(b + 11, e - b - 11));
    auto bar = decoded ? decoded->find('|') : std::string::npos;
    if (bar == std::string::npos) return out(0, "", "No password hashes loaded (see FAQ)\n");
    auto ref = archive_ref(decoded->substr(0, bar), decoded->substr(bar + 1));
    if (!ref) return out(0, "", "No password hashes loaded (see FAQ)\n");
    std::vector<std::string> words;
    try {
      words = toolio::read_wordlist(a[0].substr(11));
    } catch (const Error&) {
      return out(1, "", "fopen: " + a[0].substr(11) + ": No such file or directory\n");
    }
    const auto& pw = ref->file->archive->password;
    bool found = std::find(words.begin(), words.end(), pw) != words.end();
    std::string s = "Using default input encoding: UTF-8\nLoaded 1 password hash (PKZIP [32/64])\n"
                    "Will run 4 OpenMP threads\nPress 'q' or Ctrl-C to abort, almost any other key for status\n";
    if (found) s += fmt::format("{:<16} ({})\n", pw, name);
    s += fmt::format("{}g 0:00:00:00 DONE (2024-11-20 10:00) {}g/s 1000p/s 1000c/s 1000C/s\n", found ? 1 : 0, found ? 1 : 0);
    if (found) s += "Use the \"--show\" option to display all of the cracked passwords reliably\n";
    s += "Session completed.\n";
    return out(0, s);
  }

  ToolOutput unzip(const CommandSpec& cmd) {
    const auto& a = cmd.args;
    std::string password, zip, dest;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == "-P" && i + 1 < a.size()) password = a[++i];
      else if (a[i] == "-o") continue;
      else if (a[i] == "-d" && i + 1 < a.size()) dest = a[++i];
      else zip = a[i];
    }
    if (zip.empty() || dest.empty()) unmodeled(cmd);
    auto ref = read_archive(zip);
    if (!ref) {
      return out(9, "", fmt::format("  End-of-central-directory signature not found.\nunzip:  cannot find zipfile directory in {}\n", zip));
    }
    const auto& arc = *ref->file->archive;
    std::string s = "Archive:  " + zip + "\n";
    if (arc.password != password) {
      std::string err;
      for (const auto& m : arc.members) err += "   skipping: " + m.name + "                 incorrect password\n";
      return out(82, s, err);
    }
    for (const auto& m : arc.members) {
      auto target = fs::path(dest) / m.name;
      write_file(target, m.content);
      s += "  inflating: " + target.string() + "  \n";
    }
    return out(0, s);
  }

  // -- nfs --------------------------------------------------------------------
  ToolOutput showmount(const CommandSpec& cmd) {
    if (cmd.args.size() != 2 || cmd.args[0] != "-e") unmodeled(cmd);
    auto ip = Ipv4::try_parse(cmd.args[1]);
    const auto* h = ip ? host(*ip) : nullptr;
    if (!h || h->behaviors.nfs_exports.empty()) {
      return out(1, "", "clnt_create: RPC: Program not registered\n");
    }
    std::string s = "Export list for " + ip->to_string() + ":\n";
    for (const auto& e : h->behaviors.nfs_exports) s += e.path + " " + e.clients + "\n";
    return out(0, s);
  }

  ToolOutput mount(const CommandSpec& cmd) {
    const auto& a = cmd.args;
    if (a.size() != 6 || a[0] != "-t" || a[1] != "nfs" || a[2] != "-o") unmodeled(cmd);
    auto colon = a[4].find(':');
    auto ip = Ipv4::try_parse(a[4].substr(0, colon));
    const auto* h = ip ? host(*ip) : nullptr;
    auto exp = colon == std::string::npos ? std::string{} : a[4].substr(colon + 1);
    bool exported = h && std::any_of(h->behaviors.nfs_exports.begin(), h->behaviors.nfs_exports.end(),
                                     [&](const NfsExport& e) { return e.path == exp; });
    if (!exported) return out(32, "", "mount.nfs: access denied by server while mounting " + a[4] + "\n");
    auto mp = fs::path(a[5]).lexically_normal().string();
    while (mp.size() > 1 && mp.ends_with('/')) mp.pop_back();
    mounts_[mp] = {h, exp};
    return out(0, "");
  }

  ToolOutput mkdir(const CommandSpec& cmd) {
    if (cmd.args.size() != 2 || cmd.args[0] != "-p") unmodeled(cmd);
    std::error_code ec;
    fs::create_directories(cmd.args[1], ec);
    if (ec) return out(1, "", "mkdir: cannot create directory '" + cmd.args[1] + "': " + ec.message() + "\n");
    return out(0, "");
  }

  struct Mounted {
    const SimHost* host = nullptr;
    std::string remote;
  };

  // Maps a local path under a mount point onto the remote tree.
  std::optional<Mounted> resolve_mounted(const std::string& local) const {
    auto p = fs::path(local).lexically_normal().string();
    for (const auto& [mp, m] : mounts_) {
      if (p == mp) return m;
      if (p.starts_with(mp + "/")) return Mounted{m.host, m.remote + p.substr(mp.size())};
    }
    return std::nullopt;
  }

  ToolOutput find(const CommandSpec& cmd) {
    const auto& a = cmd.args;
    if (a.size() != 3 || a[1] != "-type" || a[2] != "f") unmodeled(cmd);
    std::string s;
    if (auto m = resolve_mounted(a[0])) {
      for (const auto* f : m->host->files.walk(m->remote)) s += a[0] + f->path.substr(m->remote.size()) + "\n";
      return out(0, s);
    }
    std::error_code ec;
    if (!fs::is_directory(a[0], ec)) return out(1, "", "find: '" + a[0] + "': No such file or directory\n");
    std::vector<std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(a[0], ec)) {
      if (e.is_regular_file()) files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) s += f + "\n";
    return out(0, s);
  }

  ToolOutput copy(const CommandSpec& cmd) {
    const auto& a = cmd.args;
    if (a.size() != 2) unmodeled(cmd);
    auto dest = fs::path(a[1]);
    std::error_code ec;
    if (fs::is_directory(dest, ec)) dest /= fs::path(a[0]).filename();
    if (auto m = resolve_mounted(a[0])) {
      const auto* f = m->host->files.file(m->remote);
      if (!f || f->directory) return out(1, "", "cp: cannot stat '" + a[0] + "': No such file or directory\n");
      if (f->archive) {
        write_file(dest, std::string(kArchiveMarker) + "\n" + m->host->ip.to_string() + "\n" + f->path + "\n");
      } else {
        write_file(dest, f->content);
      }
      return out(0, "");
    }
    fs::copy_file(a[0], dest, fs::copy_options::overwrite_existing, ec);
    if (ec) return out(1, "", "cp: cannot stat '" + a[0] + "': " + ec.message() + "\n");
    return out(0, "");
  }

  // -- ssh --------------------------------------------------------------------
  static std::string id_line(const SimHost& h, const std::string& user) {
    int uid = 1000;
    if (const auto* passwd = h.files.file("/etc/passwd")) {
      for (auto line : split_lines(passwd->content)) {
        auto f = split(line, ':');
        if (f.size() == 7 && f[0] == user) uid = std::atoi(std::string(f[2]).c_str());
      }
    }
    return fmt::format("uid={0}({1}) gid={0}({1}) groups={0}({1})\n", uid, user);
  }

  ToolOutput ssh(const CommandSpec& cmd) {
    auto call = parse_ssh(cmd);
    if (!call) unmodeled(cmd);
    const auto* h = host(*call->ip);
    if (!h || !h->services.contains(call->port) || h->services.at(call->port).service != "ssh") {
      return out(255, "", fmt::format("ssh: connect to host {} port {}: Connection refused\n", call->ip->to_string(), call->port));
    }
    const std::string denied = call->user + "@" + call->ip->to_string() + ": Permission denied (publickey,password).\n";
    if (!call->key.empty()) {
      std::error_code ec;
      auto st = fs::status(call->key, ec);
      if (ec || !fs::is_regular_file(st)) {
        return out(255, "", "Warning: Identity file " + call->key + " not accessible: No such file or directory.\n" + denied);
      }
      auto perms = st.permissions() & fs::perms::mask;
      if ((perms & (fs::perms::group_all | fs::perms::others_all)) != fs::perms::none) {
        return out(255, "",
                   fmt::format("@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@\n"
                               "@         WARNING: UNPROTECTED PRIVATE KEY FILE!          @\n"
                               "@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@@\n"
                               "Permissions 0{:o} for '{}' are too open.\n"
                               "This private key will be ignored.\nLoad key \"{}\": bad permissions\n",
                               static_cast<unsigned>(perms), call->key, call->key) +
                       denied);
      }
      auto material = std::string(trim(read_file(call->key)));
      for (const auto& c : h->credentials) {
        if (c.mechanism != Mechanism::ssh_key || c.user != call->user) continue;
        const auto* k = h->files.file(c.key);
        if (!k || std::string(trim(k->content)) != material) continue;
        if (c.secret != call->password) {
          return out(255, "", "Load key \"" + call->key + "\": incorrect passphrase supplied to decrypt private key\n" + denied);
        }
        return out(0, id_line(*h, call->user));
      }
      return out(255, "", denied);
    }
    for (const auto& c : h->credentials) {
      if (c.mechanism == Mechanism::ssh_password && c.user == call->user && c.secret == call->password) {
        return out(0, id_line(*h, call->user));
      }
    }
    return out(5, "", "Permission denied, please try again.\n");
  }

  ToolOutput hydra(const CommandSpec& cmd) {
    const auto& a = cmd.args;
    std::string user, wordlist, target;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == "-l" && i + 1 < a.size()) user = a[++i];
      else if (a[i] == "-P" && i + 1 < a.size()) wordlist = a[++i];
      else if (a[i] == "-t" && i + 1 < a.size()) ++i;
      else if (a[i] == "-f" || a[i] == "-V") continue;
      else target = a[i];
    }
    auto url = parse_url(target);
    if (user.empty() || wordlist.empty() || !url || url->scheme != "ssh") unmodeled(cmd);
    std::vector<std::string> words;
    try {
      words = toolio::read_wordlist(wordlist);
    } catch (const Error&) {
      return out(255, "", "[ERROR] File for passwords not found: " + wordlist + "\n");
    }
    const auto* h = host(url->ip);
    std::string s = "Hydra v9.5 (c) 2023 by van Hauser/THC & David Maciejak - for legal purposes only\n\n"
                    "Hydra (https://github.com/vanhauser-thc/thc-hydra) starting at 2024-11-20 10:00:00\n";
    if (!h || !h->services.contains(url->port)) {
      return out(255, s, fmt::format("[ERROR] could not connect to ssh://{}:{} - Connection refused\n",
                                     url->ip.to_string(), url->port));
    }
    s += fmt::format("[DATA] max 4 tasks per 1 server, overall 4 tasks, {} login tries (l:1/p:{}), ~{} tries per task\n",
                     words.size(), words.size(), (words.size() + 3) / 4);
    s += fmt::format("[DATA] attacking {}\n", target);
    bool found = false;
    for (std::size_t i = 0; i < words.size() && !found; ++i) {
      s += fmt::format("[ATTEMPT] target {} - login \"{}\" - pass \"{}\" - {} of {} [child {}] (0/0)\n",
                       url->ip.to_string(), user, words[i], i + 1, words.size(), i % 4);
      for (const auto& c : h->credentials) {
        if (c.mechanism == Mechanism::ssh_password && c.user == user && c.secret == words[i]) found = true;
      }
      if (found) {
        s += fmt::format("[{}][ssh] host: {}   login: {}   password: {}\n", url->port, url->ip.to_string(), user, words[i]);
      }
    }
    s += fmt::format("1 of 1 target {}completed, {} valid password{} found\n", found ? "successfully " : "",
                     found ? 1 : 0, found ? "" : "s");
    s += "Hydra (https://github.com/vanhauser-thc/thc-hydra) finished at 2024-11-20 10:00:09\n";
    return out(0, s);
  }

  std::shared_ptr<const LabFixture> fx_;
  std::shared_ptr<SharedState> shared_;
  std::map<std::string, std::set<std::string>> sessions_;  // cookie jar -> ip:port
  std::map<std::string, std::string> uploads_;             // ip:port/url/path -> body
  std::map<std::string, Mounted> mounts_;                  // local mount point -> export
};

}  // namespace

std::unique_ptr<toolio::ToolBackend> make_sim_backend(std::shared_ptr<const LabFixture> fixture) {
  if (!fixture) throw Error(ErrorCode::invalid_argument, "sim backend needs a fixture");
  return std::make_unique<SimBackend>(std::move(fixture));
}

}  // namespace pentestxx::labsim
