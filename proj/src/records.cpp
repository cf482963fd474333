#include "proact/records.hpp"

namespace proact {

std::string conditionName(PromptCondition c) {
  if (c.showExplanation && c.startingPoint) return "lime+sp";
  if (c.showExplanation) return "lime";
  if (c.startingPoint) return "sp";
  return "plain";
}

std::optional<PromptCondition> parseCondition(std::string_view name) {
  if (name == "lime+sp") return PromptCondition{true, true};
  if (name == "lime") return PromptCondition{true, false};
  if (name == "sp") return PromptCondition{false, true};
  if (name == "plain") return PromptCondition{false, false};
  return std::nullopt;
}

std::string_view toString(ClaimState claim) {
  switch (claim) {
    case ClaimState::Pending: return "pending";
    case ClaimState::ClaimedWin: return "claimed-win";
    case ClaimState::Continued: return "continued";
    case ClaimState::GivenUp: return "given-up";
  }
  return "pending";
}

std::optional<ClaimState> parseClaimState(std::string_view text) {
  for (ClaimState c : {ClaimState::Pending, ClaimState::ClaimedWin, ClaimState::Continued, ClaimState::GivenUp}) {
    if (toString(c) == text) return c;
  }
  return std::nullopt;
}

}  // namespace proact
