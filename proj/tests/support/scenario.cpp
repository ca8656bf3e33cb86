#include "support/scenario.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pentestxx/common/error.hpp"

namespace pentestxx::testing {

namespace fs = std::filesystem;
using namespace std::chrono;

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::path(PENTESTXX_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden(const std::string& name) { return read_file(fs::path(PENTESTXX_GOLDEN_DIR) / name); }

system_clock::time_point fixed_epoch() { return system_clock::time_point{seconds{1732093200}}; }

engine::Clock stepping_clock(system_clock::time_point start) {
  auto ticks = std::make_shared<std::atomic<long long>>(0);
  return [start, ticks] { return start + milliseconds(ticks->fetch_add(1)); };
}

ScenarioResult run_scenario(const ScenarioOptions& opts) {
  if (opts.workspace.empty()) throw std::invalid_argument("scenario needs a workspace");
  engine::EngineConfig cfg;
  cfg.backend = engine::BackendKind::sim;
  cfg.fixture = opts.fixture;
  cfg.auto_approve = opts.auto_approve;
  cfg.workspace = opts.workspace;
  if (opts.target) cfg.target = Ipv4::parse(*opts.target);

  const auto t0 = steady_clock::now();
  auto session = engine::make_session(cfg, opts.fixed_clock ? stepping_clock(fixed_epoch()) : engine::Clock{});
  session->start();

  if (!opts.auto_approve) {
    std::uint64_t cursor = 1;
    const auto deadline = steady_clock::now() + seconds(60);
    for (;;) {
      auto batch = session->events().wait_since(cursor, milliseconds(100));
      for (const auto& e : batch) {
        cursor = e.seq + 1;
        if (e.kind != "approval_requested") continue;
        auto id = e.payload.value("approval_id", "");
        auto req = session->approvals().find(id);
        if (!req) continue;
        std::optional<engine::Decision> d;
        if (opts.policy) d = opts.policy(*req);
        if (!d) d = engine::Decision{true, {{"choice", 0}}, engine::DecisionSource::synthetic};
        session->approvals().submit(id, *d);
      }
      if (batch.empty() && session->events().closed() && cursor > session->events().last_seq()) break;
      if (steady_clock::now() > deadline) {
        session->cancel();
        break;
      }
    }
  }
  session->join();

  ScenarioResult r;
  r.seconds = duration<double>(steady_clock::now() - t0).count();
  auto snap = session->snapshot();
  r.status = snap.status;
  r.findings = snap.findings;
  r.events = session->events().all();
  r.report = session->report();
  r.workspace = session->workspace();
  return r;
}

std::vector<std::string> kinds(const std::vector<engine::Event>& events) {
  std::vector<std::string> out;
  for (const auto& e : events) out.push_back(e.kind);
  return out;
}

std::size_t find_finding(const std::vector<engine::Finding>& findings, std::size_t from,
                         const std::function<bool(const engine::Finding&)>& pred) {
  for (std::size_t i = from; i < findings.size(); ++i) {
    if (pred(findings[i])) return i;
  }
  return std::string::npos;
}

nlohmann::json normalized_report(const nlohmann::json& report) {
  // Dates leak into prose too, so scrub them from the serialized text.
  std::string text = report.dump();
  auto scrub = [&text](const std::string& needle) {
    if (needle.empty()) return;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos)) {
      text.replace(pos, needle.size(), "<date>");
    }
  };
  if (report.contains("metadata")) {
    scrub(report["metadata"].value("period", ""));
    scrub(report["metadata"].value("date", ""));
  }
  return nlohmann::json::parse(text);
}

}  // namespace pentestxx::testing
