#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "proact/config.hpp"
#include "proact/pipeline.hpp"

namespace proact {

/// Append-only event file.
///
///   header:  "PROACTEV" (8 bytes) | version u32 LE (= 1)
///   record:  length u32 LE | crc32(payload) u32 LE | payload
///
/// The payload is the UTF-8 JSON {"seq","type","at","data"}. The first record
/// is always a "configured" event carrying the platform configuration.
class EventLog {
 public:
  static constexpr std::uint32_t kVersion = 1;

  /// Opens `path` for appending, writing the header and a "configured" record
  /// when the file is new or empty. An empty path keeps the log in memory.
  EventLog(const std::string& path, const PlatformConfig& config);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  /// Assigns the next sequence number and writes the record.
  void append(Event& event);

  std::uint64_t lastSeq() const { return lastSeq_; }
  const PlatformConfig& config() const { return config_; }
  const std::string& path() const { return path_; }
  /// Events after the "configured" record, in order.
  const std::vector<Event>& events() const { return events_; }

 private:
  std::string path_;
  std::FILE* file_ = nullptr;
  PlatformConfig config_;
  std::uint64_t lastSeq_ = 0;
  std::vector<Event> events_;
};

struct LogContents {
  PlatformConfig config;
  bool configured = false;    // false for an empty log
  std::vector<Event> events;  // without the "configured" record
};

/// Parses a log image. Throws CorruptLog on a bad header, a truncated or
/// checksum-failing record, or non-increasing sequence numbers.
LogContents parseLog(std::string_view bytes);
LogContents readLog(const std::string& path);

std::string encodeRecord(const Event& e);
std::string logHeader();

/// Rebuilds the platform from a log file; an empty or missing log yields the
/// bootstrap state with `fallback` as configuration.
Platform replay(const std::string& path, const PlatformConfig& fallback = {});
Platform replay(const LogContents& log);

}  // namespace proact
