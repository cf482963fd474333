#pragma once

#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "proact/analytics.hpp"
#include "proact/classifier.hpp"
#include "proact/config.hpp"
#include "proact/records.hpp"

namespace proact {

enum class EditStrategy : std::uint8_t { FromScratch, PerturbStartingPoint, ExplanationGuided };

std::string_view toString(EditStrategy s);
std::optional<EditStrategy> parseEditStrategy(std::string_view text);

/// Lognormal per-trial crafting time, parameterized by its mean in seconds.
struct TrialTimeModel {
  double meanSeconds = 60.0;
  double sigma = 0.7;
};

struct SimWorkerProfile {
  WorkerId workerId;
  double skill = 0.5;      // chance a trial is aimed at (and, if found, is) a model failure
  double diligence = 0.95; // chance a judgment matches the oracle answer
  TrialTimeModel trialTime;
  /// Unset: derived from the session condition (explanation-guided under the
  /// explanation prompt, starting-point perturbation under SP, else from scratch).
  std::optional<EditStrategy> editStrategy;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::size_t workerCount = 20;
  std::size_t trialsPerWorker = 8;
  std::size_t trialBudget = 1000;
  std::vector<PromptCondition> conditions{{true, true}, {false, false}};
  std::vector<std::string> categories{"Subtle Sentiment Cues", "Mixed-sentiment", "Questions", "Others"};
  std::size_t seedErrorsPerCategory = 3;
  std::size_t goldQuestions = 20;
  Millis startMillis = 1'700'000'000'000;
  std::size_t candidateAttempts = 20;

  SimWorkerProfile crafter;    // template for every crafter
  SimWorkerProfile validator;  // template for every honest validator
  std::size_t validatorCount = 8;
  std::vector<SimWorkerProfile> adversaries;  // validators that come first in each round
  /// Per-worker profile fields, laid over the crafter or validator template.
  std::map<WorkerId, nlohmann::json> overrides;

  PlatformConfig platform;
};

/// Keys: seed, workers, trials_per_worker, trial_budget, conditions,
/// categories, seed_errors_per_category, gold_questions, start_ms,
/// candidate_attempts, crafter, validator, validators, adversaries, overrides,
/// platform. Profiles use id, skill, diligence, edit_strategy and
/// trial_time{mean_seconds, sigma}. Unknown keys throw Parse.
ScenarioConfig scenarioFromJson(const nlohmann::json& j);
nlohmann::json toJson(const ScenarioConfig& c);
ScenarioConfig loadScenario(const std::string& path);

struct SimulationReport {
  std::size_t sessions = 0;
  std::size_t trials = 0;
  std::size_t winsClaimed = 0;
  bool budgetExhausted = false;
  std::size_t validationRounds = 0;
  std::size_t judgments = 0;
  std::vector<WorkerId> rejectedValidators;
  std::size_t adjudicated = 0;
  std::size_t unresolved = 0;  // claimed wins that never reached quorum
  std::uint64_t stateHash = 0;
  std::uint64_t eventCount = 0;
  AnalysisSummary summary;
  std::string exportCsv;
};

nlohmann::json toJson(const SimulationReport& r);

/// Runs a whole crafting round followed by validation to quorum against an
/// in-process service. Events go to `logPath` (in memory when empty), which
/// must not already hold events. Deterministic in (config, model).
SimulationReport runScenario(std::shared_ptr<const Classifier> model, const ScenarioConfig& config,
                             const std::string& logPath = {});

/// A run assembled from per-condition counters: 262 trials / 75 validated /
/// 66 workers with both prompts, 293 / 108 / 46 with neither.
RunData replayStudyBookkeeping();

}  // namespace proact
