#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace proact {

enum class SentimentLabel : std::uint8_t { Negative = 0, Neutral = 1, Positive = 2 };

inline constexpr std::array<SentimentLabel, 3> kAllLabels = {
    SentimentLabel::Negative, SentimentLabel::Neutral, SentimentLabel::Positive};

inline constexpr std::size_t labelIndex(SentimentLabel l) { return static_cast<std::size_t>(l); }

std::string_view toString(SentimentLabel label);
std::optional<SentimentLabel> parseLabel(std::string_view text);

enum class ErrorCode {
  InvalidArgument,
  EmptyCorpus,
  MissingClass,
  EmptyText,
  BadThresholds,
  BadWeights,
  TooShort,
  SessionClosed,
  LabelMatchesPrediction,
  AlreadyResolved,
  AdjudicationIncomplete,
  AdjudicationPending,
  NoSeedErrorsAvailable,
  NothingToJudge,
  DuplicateJudgment,
  UnknownAssignment,
  QuorumNotMet,
  NotFound,
  IdempotencyConflict,
  DuplicateCategory,
  CorruptLog,
  ModelMissing,
  Io,
  Parse,
};

/// Stable machine-readable name, e.g. "TOO_SHORT".
std::string_view codeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Like parseLabel but throws Error(Parse) on unknown text.
SentimentLabel requireLabel(std::string_view text);

using SampleId = std::uint64_t;  // trials, imported samples and gold questions share one id space
using SessionId = std::uint64_t;
using CategoryId = std::uint64_t;
using WorkerId = std::string;

/// Milliseconds since an arbitrary epoch (wall clock when serving, virtual in simulation).
using Millis = std::int64_t;

/// Money in integer micro-dollars so ledger sums stay exact.
struct Money {
  std::int64_t micros = 0;

  static Money fromDollars(double dollars);
  double dollars() const { return static_cast<double>(micros) / 1e6; }

  friend Money operator+(Money a, Money b) { return {a.micros + b.micros}; }
  Money& operator+=(Money o) {
    micros += o.micros;
    return *this;
  }
  friend Money operator*(std::int64_t n, Money m) { return {n * m.micros}; }
  friend auto operator<=>(const Money&, const Money&) = default;
};

/// 64-bit FNV-1a; used for state fingerprints and seed derivation.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// splitmix64 finalizer for deriving independent child seeds.
std::uint64_t mixSeed(std::uint64_t a, std::uint64_t b);

}  // namespace proact
