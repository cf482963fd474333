#include "proact/common.hpp"

#include <cmath>

namespace proact {

std::string_view toString(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Negative:
      return "negative";
    case SentimentLabel::Neutral:
      return "neutral";
    case SentimentLabel::Positive:
      return "positive";
  }
  return "neutral";
}

std::optional<SentimentLabel> parseLabel(std::string_view text) {
  if (text == "negative") return SentimentLabel::Negative;
  if (text == "neutral") return SentimentLabel::Neutral;
  if (text == "positive") return SentimentLabel::Positive;
  return std::nullopt;
}

SentimentLabel requireLabel(std::string_view text) {
  if (auto l = parseLabel(text)) return *l;
  throw Error(ErrorCode::Parse, "unknown sentiment label '" + std::string(text) + "'");
}

std::string_view codeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::EmptyCorpus: return "EMPTY_CORPUS";
    case ErrorCode::MissingClass: return "MISSING_CLASS";
    case ErrorCode::EmptyText: return "EMPTY_TEXT";
    case ErrorCode::BadThresholds: return "BAD_THRESHOLDS";
    case ErrorCode::BadWeights: return "BAD_WEIGHTS";
    case ErrorCode::TooShort: return "TOO_SHORT";
    case ErrorCode::SessionClosed: return "SESSION_CLOSED";
    case ErrorCode::LabelMatchesPrediction: return "LABEL_MATCHES_PREDICTION";
    case ErrorCode::AlreadyResolved: return "ALREADY_RESOLVED";
    case ErrorCode::AdjudicationIncomplete: return "ADJUDICATION_INCOMPLETE";
    case ErrorCode::AdjudicationPending: return "ADJUDICATION_PENDING";
    case ErrorCode::NoSeedErrorsAvailable: return "NO_SEED_ERRORS_AVAILABLE";
    case ErrorCode::NothingToJudge: return "NOTHING_TO_JUDGE";
    case ErrorCode::DuplicateJudgment: return "DUPLICATE_JUDGMENT";
    case ErrorCode::UnknownAssignment: return "UNKNOWN_ASSIGNMENT";
    case ErrorCode::QuorumNotMet: return "QUORUM_NOT_MET";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::IdempotencyConflict: return "IDEMPOTENCY_CONFLICT";
    case ErrorCode::DuplicateCategory: return "DUPLICATE_CATEGORY";
    case ErrorCode::CorruptLog: return "CORRUPT_LOG";
    case ErrorCode::ModelMissing: return "MODEL_MISSING";
    case ErrorCode::Io: return "IO_ERROR";
    case ErrorCode::Parse: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

Money Money::fromDollars(double dollars) {
  return Money{static_cast<std::int64_t>(std::llround(dollars * 1e6))};
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace proact
