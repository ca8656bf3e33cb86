#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pentestxx::engine {

enum class Phase { recon, scan_enum, gaining_access, reporting, done };

const char* to_string(Phase p);
std::optional<Phase> phase_from_string(std::string_view s);

struct Event {
  std::uint64_t seq = 0;  // 1-based, gapless
  std::string timestamp;  // RFC 3339, UTC, millisecond precision
  Phase phase = Phase::recon;
  std::string kind;
  nlohmann::json payload = nlohmann::json::object();

  friend bool operator==(const Event&, const Event&) = default;
};

nlohmann::json to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);
/// One NDJSON record, no trailing newline.
std::string to_ndjson_line(const Event& e);

/// Reads a persisted events.ndjson. Throws Error(parse_error) naming the line.
std::vector<Event> read_event_log(const std::filesystem::path& path);
std::vector<Event> parse_event_log(std::string_view ndjson);

using Clock = std::function<std::chrono::system_clock::time_point()>;

std::string format_timestamp(std::chrono::system_clock::time_point tp);

/// Append-only, thread-safe event log. Appends are serialized, timestamps
/// never go backwards, and readers can block for records past a cursor.
class EventLog {
 public:
  explicit EventLog(Clock clock = {});

  /// Also writes every record to path as NDJSON, flushed per append.
  void persist_to(const std::filesystem::path& path);

  Event append(Phase phase, std::string kind, nlohmann::json payload);

  /// Records with seq >= from, in order.
  std::vector<Event> since(std::uint64_t from) const;
  std::vector<Event> all() const { return since(1); }
  std::uint64_t last_seq() const;

  /// Waits until a record with seq >= from exists, the log is closed, or the
  /// timeout passes. Returns what is available.
  std::vector<Event> wait_since(std::uint64_t from, std::chrono::milliseconds timeout) const;

  /// No more appends; wakes all waiters.
  void close();
  bool closed() const;

 private:
  Clock clock_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::vector<Event> events_;
  std::chrono::system_clock::time_point last_time_{};
  std::ofstream sink_;
  bool closed_ = false;
};

}  // namespace pentestxx::engine
