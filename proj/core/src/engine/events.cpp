#include "pentestxx/engine/events.hpp"

#include <ctime>
#include <sstream>

#include <fmt/format.h>

#include "pentestxx/common/error.hpp"
#include "pentestxx/common/strings.hpp"

namespace pentestxx::engine {

namespace {
constexpr const char* kPhaseNames[] = {"recon", "scan_enum", "gaining_access", "reporting", "done"};
}

const char* to_string(Phase p) { return kPhaseNames[static_cast<int>(p)]; }

std::optional<Phase> phase_from_string(std::string_view s) {
  for (int i = 0; i < 5; ++i) {
    if (s == kPhaseNames[i]) return static_cast<Phase>(i);
  }
  return std::nullopt;
}

nlohmann::json to_json(const Event& e) {
  return {{"seq", e.seq}, {"timestamp", e.timestamp}, {"phase", to_string(e.phase)}, {"kind", e.kind},
          {"payload", e.payload}};
}

Event event_from_json(const nlohmann::json& j) {
  try {
    Event e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.timestamp = j.at("timestamp").get<std::string>();
    auto phase = phase_from_string(j.at("phase").get<std::string>());
    if (!phase) throw Error(ErrorCode::parse_error, "unknown phase '" + j.at("phase").get<std::string>() + "'");
    e.phase = *phase;
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.at("payload");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::parse_error, std::string("malformed event: ") + ex.what());
  }
}

std::string to_ndjson_line(const Event& e) { return to_json(e).dump(); }

std::vector<Event> parse_event_log(std::string_view ndjson) {
  std::vector<Event> events;
  int n = 0;
  for (auto line : split_lines(ndjson)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      events.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::parse_error, fmt::format("line {}: {}", n, ex.what()));
    } catch (const Error& ex) {
      throw Error(ErrorCode::parse_error, fmt::format("line {}: {}", n, ex.what()));
    }
  }
  return events;
}

std::vector<Event> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_event_log(ss.str());
}

std::string format_timestamp(std::chrono::system_clock::time_point tp) {
  using namespace std::chrono;
  auto ms = duration_cast<milliseconds>(tp.time_since_epoch()).count();
  std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                     tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms % 1000));
}

EventLog::EventLog(Clock clock) : clock_(clock ? std::move(clock) : [] { return std::chrono::system_clock::now(); }) {}

void EventLog::persist_to(const std::filesystem::path& path) {
  std::lock_guard lock(mu_);
  sink_.open(path, std::ios::binary | std::ios::trunc);
  if (!sink_) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  for (const auto& e : events_) sink_ << to_ndjson_line(e) << '\n';
  sink_.flush();
}

Event EventLog::append(Phase phase, std::string kind, nlohmann::json payload) {
  std::unique_lock lock(mu_);
  if (closed_) throw Error(ErrorCode::conflict, "event log is closed");
  auto now = std::max(clock_(), last_time_);
  last_time_ = now;
  Event e{events_.size() + 1, format_timestamp(now), phase, std::move(kind), std::move(payload)};
  events_.push_back(std::move(e));
  if (sink_.is_open()) {
    sink_ << to_ndjson_line(events_.back()) << '\n';
    sink_.flush();
  }
  Event copy = events_.back();
  lock.unlock();
  cv_.notify_all();
  return copy;
}

std::vector<Event> EventLog::since(std::uint64_t from) const {
  std::lock_guard lock(mu_);
  if (from == 0) from = 1;
  if (from > events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(from - 1), events_.end()};
}

std::uint64_t EventLog::last_seq() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

std::vector<Event> EventLog::wait_since(std::uint64_t from, std::chrono::milliseconds timeout) const {
  if (from == 0) from = 1;
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || events_.size() >= from; });
  if (from > events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(from - 1), events_.end()};
}

void EventLog::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
    if (sink_.is_open()) sink_.flush();
  }
  cv_.notify_all();
}

bool EventLog::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

}  // namespace pentestxx::engine
