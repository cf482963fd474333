#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "proact/classifier.hpp"
#include "proact/common.hpp"
#include "proact/explainer.hpp"

namespace proact {

/// The 2x2 prompt design: explanation shown (LIME) x starting point (SP).
struct PromptCondition {
  bool showExplanation = false;
  bool startingPoint = false;

  friend auto operator<=>(const PromptCondition&, const PromptCondition&) = default;
};

/// "lime+sp", "lime", "sp" or "plain".
std::string conditionName(PromptCondition c);
std::optional<PromptCondition> parseCondition(std::string_view name);

struct Category {
  CategoryId id = 0;
  std::string name;
  std::string description;
  std::string createdBy;
  bool active = true;
};

inline constexpr const char* kNoMajorityName = "No majority";

enum class ClaimState : std::uint8_t { Pending, ClaimedWin, Continued, GivenUp };

std::string_view toString(ClaimState claim);
std::optional<ClaimState> parseClaimState(std::string_view text);

struct Session {
  SessionId id = 0;
  WorkerId worker;
  CategoryId target = 0;
  PromptCondition condition;
  Millis startedAt = 0;
  std::optional<SampleId> startingSample;
  std::string startingText;
  std::vector<SampleId> trials;
  bool closed = false;
};

struct Trial {
  SampleId id = 0;
  SessionId session = 0;
  WorkerId worker;
  std::string text;
  Millis submittedAt = 0;
  Prediction prediction;
  std::optional<Explanation> explanation;
  ClaimState claim = ClaimState::Pending;
  std::optional<SentimentLabel> asserted;
  Millis claimedAt = 0;
};

/// A misclassified benchmark sentence imported by the operator.
struct SeedSample {
  SampleId id = 0;
  std::string text;
  SentimentLabel humanLabel = SentimentLabel::Neutral;
  Prediction prediction;
  std::optional<CategoryId> category;
};

struct LedgerEntry {
  WorkerId worker;
  SampleId trial = 0;
  Money base;
  Money failBonus;
  Money categoryBonus;

  Money total() const { return base + failBonus + categoryBonus; }
  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

}  // namespace proact
