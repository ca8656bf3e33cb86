#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>

#include "pentestxx/common/error.hpp"
#include "pentestxx/common/strings.hpp"
#include "pentestxx/netcalc/netcalc.hpp"
#include "pentestxx/toolio/backend.hpp"

extern char** environ;

namespace pentestxx::toolio {

namespace {

struct Fd {
  int fd = -1;
  Fd() = default;
  explicit Fd(int f) : fd(f) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd(std::exchange(o.fd, -1)) {}
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

class LiveListener final : public Listener {
 public:
  explicit LiveListener(int port) : port_(port) {
    sock_.fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (sock_.fd < 0) throw Error(ErrorCode::io_error, std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(sock_.fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(sock_.fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      if (errno == EADDRINUSE) throw Error(ErrorCode::port_in_use, "port " + std::to_string(port) + " already in use");
      throw Error(ErrorCode::io_error, std::string("bind: ") + std::strerror(errno));
    }
    if (::listen(sock_.fd, 1) != 0) throw Error(ErrorCode::io_error, std::string("listen: ") + std::strerror(errno));
  }

  int port() const override { return port_; }

  ShellSessionHandle await_connection(std::chrono::milliseconds timeout) override {
    pollfd p{sock_.fd, POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc == 0) throw Error(ErrorCode::timeout, "no connection on port " + std::to_string(port_));
    if (rc < 0) throw Error(ErrorCode::io_error, std::string("poll: ") + std::strerror(errno));
    sockaddr_in peer{};
    socklen_t len = sizeof peer;
    int fd = ::accept4(sock_.fd, reinterpret_cast<sockaddr*>(&peer), &len, SOCK_CLOEXEC);
    if (fd < 0) throw Error(ErrorCode::io_error, std::string("accept: ") + std::strerror(errno));
    ShellSessionHandle h;
    h.remote = Ipv4{ntohl(peer.sin_addr.s_addr)};
    h.local_port = port_;
    h.connection = std::make_shared<Fd>(fd);
    // Best-effort banner: whatever the shell prints in the first moment.
    pollfd q{fd, POLLIN, 0};
    if (::poll(&q, 1, 500) > 0) {
      std::array<char, 512> buf{};
      auto n = ::read(fd, buf.data(), buf.size());
      if (n > 0) h.banner.assign(buf.data(), static_cast<std::size_t>(n));
    }
    return h;
  }

 private:
  int port_;
  Fd sock_;
};

class LiveBackend final : public ToolBackend {
 public:
  explicit LiveBackend(LiveBackendOptions options) : options_(options) {}

  std::string_view name() const override { return "live"; }

  ToolOutput run(const CommandSpec& cmd) override {
    if (!find_program(cmd.program)) {
      throw Error(ErrorCode::program_missing, "program not found on PATH: " + cmd.program);
    }
    int out_pipe[2];
    int err_pipe[2];
    if (::pipe2(out_pipe, O_CLOEXEC) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0) {
      throw Error(ErrorCode::io_error, std::string("pipe: ") + std::strerror(errno));
    }
    Fd out_r(out_pipe[0]), out_w(out_pipe[1]), err_r(err_pipe[0]), err_w(err_pipe[1]);

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_adddup2(&actions, out_w.fd, 1);
    posix_spawn_file_actions_adddup2(&actions, err_w.fd, 2);

    std::vector<std::string> storage{cmd.program};
    storage.insert(storage.end(), cmd.args.begin(), cmd.args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    argv.push_back(nullptr);

    const auto start = std::chrono::steady_clock::now();
    pid_t pid = 0;
    int rc = ::posix_spawnp(&pid, cmd.program.c_str(), &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) {
      if (rc == ENOENT) throw Error(ErrorCode::program_missing, "program not found: " + cmd.program);
      throw Error(ErrorCode::io_error, "spawn " + cmd.program + ": " + std::strerror(rc));
    }
    out_w.reset();
    err_w.reset();

    ToolOutput result;
    std::array<pollfd, 2> fds{{{out_r.fd, POLLIN, 0}, {err_r.fd, POLLIN, 0}}};
    std::array<std::string*, 2> sinks{&result.stdout_text, &result.stderr_text};
    const auto deadline = start + options_.command_timeout;
    int open_streams = 2;
    bool timed_out = false;
    while (open_streams > 0) {
      auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (remaining.count() <= 0) {
        timed_out = true;
        break;
      }
      int n = ::poll(fds.data(), fds.size(), static_cast<int>(std::min<long long>(remaining.count(), 1000)));
      if (n < 0 && errno != EINTR) break;
      for (std::size_t i = 0; i < fds.size(); ++i) {
        if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        std::array<char, 8192> buf{};
        auto got = ::read(fds[i].fd, buf.data(), buf.size());
        if (got > 0) {
          sinks[i]->append(buf.data(), static_cast<std::size_t>(got));
        } else {
          fds[i].fd = -1;
          --open_streams;
        }
      }
    }
    if (timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    result.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (timed_out) throw Error(ErrorCode::timeout, cmd.program + " exceeded its time limit");
    result.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return result;
  }

  std::unique_ptr<Listener> listen(int port) override { return std::make_unique<LiveListener>(port); }

  NetworkHints network_hints() const override {
    NetworkHints hints;
    auto ifaces = netcalc::detect_interfaces();
    if (!ifaces.empty()) {
      hints.subnet = ifaces.front().subnet;
      hints.attacker_ip = ifaces.front().address;
      hints.gateway_ip = netcalc::default_gateway_guess(ifaces.front().subnet);
    }
    return hints;
  }

 private:
  LiveBackendOptions options_;
};

}  // namespace

std::optional<std::string> find_program(std::string_view program) {
  namespace fs = std::filesystem;
  if (program.find('/') != std::string_view::npos) {
    if (::access(std::string(program).c_str(), X_OK) == 0) return std::string(program);
    return std::nullopt;
  }
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  for (auto dir : split(path, ':')) {
    if (dir.empty()) continue;
    auto candidate = fs::path(dir) / program;
    if (::access(candidate.c_str(), X_OK) == 0 && !fs::is_directory(candidate)) return candidate.string();
  }
  return std::nullopt;
}

ToolOutput execute(const CommandSpec& cmd, ToolBackend& backend, const CommandObserver& before) {
  if (before) before(cmd);
  return backend.run(cmd);
}

std::unique_ptr<ToolBackend> make_live_backend(LiveBackendOptions options) {
  return std::make_unique<LiveBackend>(options);
}

}  // namespace pentestxx::toolio
