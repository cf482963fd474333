#include "proact/store.hpp"

#include <zlib.h>

#include <cstring>
#include <filesystem>

#include "proact/csv.hpp"

namespace proact {

namespace {

constexpr char kMagic[8] = {'P', 'R', 'O', 'A', 'C', 'T', 'E', 'V'};

void putU32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint32_t getU32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + k])) << (8 * k);
  return v;
}

std::uint32_t crc(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

Event configuredEvent(const PlatformConfig& config) {
  Event e;
  e.type = "configured";
  e.data = toJson(config);
  return e;
}

}  // namespace

std::string logHeader() {
  std::string h(kMagic, sizeof kMagic);
  putU32(h, EventLog::kVersion);
  return h;
}

std::string encodeRecord(const Event& e) {
  const std::string payload = toJson(e).dump();
  std::string out;
  putU32(out, static_cast<std::uint32_t>(payload.size()));
  putU32(out, crc(payload));
  out += payload;
  return out;
}

LogContents parseLog(std::string_view bytes) {
  LogContents out;
  if (bytes.empty()) return out;
  const std::string header = logHeader();
  if (bytes.size() < header.size() || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::CorruptLog, "not an event log (bad magic)");
  }
  if (getU32(bytes, sizeof kMagic) != EventLog::kVersion) {
    throw Error(ErrorCode::CorruptLog, "unsupported event log version");
  }
  std::size_t pos = header.size();
  std::uint64_t lastSeq = 0;
  bool configured = false;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 8) throw Error(ErrorCode::CorruptLog, "truncated record header at byte " + std::to_string(pos));
    const std::uint32_t len = getU32(bytes, pos);
    const std::uint32_t sum = getU32(bytes, pos + 4);
    pos += 8;
    if (bytes.size() - pos < len) throw Error(ErrorCode::CorruptLog, "truncated record at byte " + std::to_string(pos));
    const std::string_view payload = bytes.substr(pos, len);
    pos += len;
    if (crc(payload) != sum) throw Error(ErrorCode::CorruptLog, "checksum mismatch in record " + std::to_string(lastSeq + 1));
    Event e;
    try {
      e = eventFromJson(nlohmann::json::parse(payload));
    } catch (const std::exception& ex) {
      throw Error(ErrorCode::CorruptLog, std::string("unreadable record: ") + ex.what());
    }
    if (e.seq != lastSeq + 1) throw Error(ErrorCode::CorruptLog, "sequence gap at record " + std::to_string(e.seq));
    lastSeq = e.seq;
    if (!configured) {
      if (e.type != "configured") throw Error(ErrorCode::CorruptLog, "log does not start with its configuration");
      try {
        out.config = configFromJson(e.data);
      } catch (const Error& err) {
        throw Error(ErrorCode::CorruptLog, std::string("bad stored configuration: ") + err.what());
      }
      configured = true;
      out.configured = true;
      continue;
    }
    out.events.push_back(std::move(e));
  }
  return out;
}

LogContents readLog(const std::string& path) {
  if (!std::filesystem::exists(path)) return {};
  return parseLog(csv::readFile(path));
}

Platform replay(const LogContents& log) {
  Platform p(log.config);
  for (const Event& e : log.events) p.apply(e);
  return p;
}

Platform replay(const std::string& path, const PlatformConfig& fallback) {
  const LogContents log = readLog(path);
  if (!log.configured) return Platform(fallback);
  return replay(log);
}

EventLog::EventLog(const std::string& path, const PlatformConfig& config) : path_(path), config_(config) {
  bool fresh = true;
  if (!path_.empty() && std::filesystem::exists(path_) && std::filesystem::file_size(path_) > 0) {
    LogContents existing = readLog(path_);
    if (existing.configured) {
      config_ = existing.config;
      events_ = std::move(existing.events);
      lastSeq_ = events_.empty() ? 1 : events_.back().seq;
      fresh = false;
    }
  }
  if (!path_.empty()) {
    file_ = std::fopen(path_.c_str(), fresh ? "wb" : "ab");
    if (!file_) throw Error(ErrorCode::Io, "cannot open event log " + path_);
  }
  if (fresh) {
    if (file_) {
      const std::string h = logHeader();
      std::fwrite(h.data(), 1, h.size(), file_);
    }
    Event e = configuredEvent(config_);
    e.seq = ++lastSeq_;
    if (file_) {
      const std::string rec = encodeRecord(e);
      std::fwrite(rec.data(), 1, rec.size(), file_);
      std::fflush(file_);
    }
  }
}

EventLog::~EventLog() {
  if (file_) std::fclose(file_);
}

void EventLog::append(Event& event) {
  event.seq = lastSeq_ + 1;
  if (file_) {
    const std::string rec = encodeRecord(event);
    if (std::fwrite(rec.data(), 1, rec.size(), file_) != rec.size() || std::fflush(file_) != 0) {
      throw Error(ErrorCode::Io, "cannot append to event log " + path_);
    }
  }
  lastSeq_ = event.seq;
  events_.push_back(event);
}

}  // namespace proact
