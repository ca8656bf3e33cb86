#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pentestxx/engine/session.hpp"
#include "pentestxx/engine/vectors.hpp"
#include "pentestxx/toolio/html.hpp"

namespace pentestxx::engine {

/// Everything the vectors have learned that can open a door elsewhere.
/// Session-global: material found on one service is offered to all others.
class CredentialStore {
 public:
  bool add_username(const std::string& name);
  /// Accounts with a login shell from a passwd file; root sorts last.
  bool add_system_user(const std::string& name, bool is_root);
  bool add_password(const std::string& secret);
  bool add_pair(const std::string& user, const std::string& secret);
  bool add_key(const std::filesystem::path& key);

  /// System accounts (non-root, then root), then application usernames.
  std::vector<std::string> login_candidates() const;
  const std::vector<std::string>& passwords() const { return passwords_; }
  const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
  const std::vector<std::filesystem::path>& keys() const { return keys_; }
  const std::vector<std::string>& usernames() const { return usernames_; }

  /// Bumped whenever anything new is added.
  int version() const { return version_; }

 private:
  std::vector<std::string> usernames_;
  std::vector<std::string> system_users_;
  std::vector<std::string> root_users_;
  std::vector<std::string> passwords_;
  std::vector<std::pair<std::string, std::string>> pairs_;
  std::vector<std::filesystem::path> keys_;
  int version_ = 0;
};

class Orchestrator {
 public:
  explicit Orchestrator(Session& s);
  void run();

 private:
  struct Gate {
    std::string id;
    Decision decision;
    bool granted() const { return decision.granted; }
    std::size_t choice() const;
  };

  // plumbing
  Event emit(std::string kind, nlohmann::json payload);
  void set_phase(Phase p);
  void check_cancelled() const;
  Gate gate(std::string kind, std::string description, std::string preview, std::vector<std::string> options = {});
  std::optional<toolio::ToolOutput> run_command(const toolio::CommandSpec& cmd, const std::string& description = {});
  void add_finding(FindingKind kind, nlohmann::json value);
  void table(const std::string& title, const std::string& text);
  void note(const std::string& text);
  std::string rel(const std::filesystem::path& p) const;
  std::filesystem::path loot_dir(const std::string& sub) const;

  // phases
  bool recon();
  std::vector<toolio::PortFinding> scan_enum();
  void gaining_access(const std::vector<toolio::PortFinding>& ports);
  void reporting();

  // vectors
  void run_vector(const VectorPlan& plan);
  void ftp_vector(int port);
  void web_vector(int port, const std::string& base);
  void http8080_vector(int port);
  void nfs_vector(int port);
  void ssh_vector(int port);
  void hydra_fallback(int port);

  // shared steps
  void analyze_artifact(const std::string& name, const std::string& content, const std::string& source);
  void record_artifact(const std::string& name, const std::filesystem::path& local, const std::string& content,
                       const std::string& source, const std::string& remote);
  std::optional<std::pair<std::filesystem::path, long long>> choose_wordlist(const std::string& purpose);
  void crack_hash(const std::string& hash, const std::string& source);
  void crack_archive(const std::filesystem::path& zip);
  bool try_web_login(const std::string& page_url, const toolio::HtmlForm& form, const std::string& base, int port,
                     const std::vector<std::string>& dir_urls);
  void exploit_upload(const std::string& page_url, const toolio::HtmlForm& form, const std::filesystem::path& jar,
                      const std::vector<std::string>& dir_urls);
  bool ssh_key_strategy(int port);
  bool ssh_password_strategy(int port);
  void record_shell(nlohmann::json value);

  Session& s_;
  std::filesystem::path ws_;
  Phase phase_ = Phase::recon;
  std::uint64_t last_step_ = 0;
  std::optional<Ipv4> attacker_;
  Ipv4 target_;
  bool shell_ = false;
  CredentialStore creds_;
  std::set<std::string> tried_;     // ssh/web attempts already made
  std::set<std::string> finding_keys_;
  int ssh_seen_version_ = -1;
  std::vector<report::RawOutput> raw_;
  std::vector<std::string> notes_;
  std::string scope_text_;
};

}  // namespace pentestxx::engine
