#pragma once

#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "proact/adjudication.hpp"
#include "proact/explainer.hpp"
#include "proact/records.hpp"

namespace proact {

struct SeverityWeights {
  double human = 0.5;
  double ai = 0.5;
};

struct SeverityThresholds {
  double low = 0.6;
  double high = 0.8;
};

enum class SeverityBucket : std::uint8_t { Low, Middle, High };

std::string_view toString(SeverityBucket bucket);

struct SeverityScore {
  SampleId sampleId = 0;
  double confHuman = 0.0;
  double confAI = 0.0;
  double severity = 0.0;
  SeverityBucket bucket = SeverityBucket::Low;
};

/// S = W1*confHuman + W2*confAI, bucketed as S < low, S < high, else high.
/// Throws BadWeights, BadThresholds, or InvalidArgument for inputs outside [0,1].
SeverityScore severity(double confHuman, double confAI, const SeverityWeights& weights = {},
                       const SeverityThresholds& thresholds = {});

/// Validated-failing samples in `category` over all validated-failing samples;
/// 0 when there are none.
double robustness(CategoryId category, const std::vector<AdjudicationResult>& results);

inline constexpr Millis kTrialTimeCapMillis = 300'000;

struct TrialTiming {
  Millis sessionStart = 0;
  std::vector<Millis> trialTimes;  // submission times, ascending
};

/// Per-trial seconds: gap to the previous event (session start for the first
/// trial), capped at 300 s.
std::vector<double> trialSeconds(const TrialTiming& timing);

struct WorkerStats {
  WorkerId worker;
  std::size_t nTotal = 0;
  std::size_t nValid = 0;
  double avgTimePerTrial = 0.0;  // seconds
  double successRate = 0.0;
};

/// nullopt for a worker without trials.
std::optional<WorkerStats> workerStats(const WorkerId& worker, const std::vector<TrialTiming>& sessions,
                                       std::size_t nValid);

struct ConditionCounts {
  std::size_t nTotal = 0;
  std::size_t nValid = 0;
  std::size_t workers = 0;
};

struct RunSummary {
  std::size_t nTotalTrials = 0;
  std::size_t nValidated = 0;
  std::size_t workerCount = 0;
  std::map<PromptCondition, ConditionCounts> byCondition;
  std::vector<WorkerStats> workers;

  double validatedFraction() const;
  /// Mean of per-worker success rates, which is not validatedFraction().
  double meanSuccessRate() const;
};

struct CategorySummary {
  CategoryId id = 0;
  std::string name;
  std::size_t low = 0;
  std::size_t middle = 0;
  std::size_t high = 0;
  double robustness = 0.0;

  std::size_t total() const { return low + middle + high; }
};

struct CloudEntry {
  std::string word;
  std::size_t frequency = 0;
  SentimentLabel dominantClass = SentimentLabel::Neutral;
};

struct TokenView {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
  Attribution attribution;
  ColorBucket bucket = ColorBucket::Neutral;
  bool sentimentWord = false;
};

struct TableRow {
  SampleId id = 0;
  std::string text;
  Prediction prediction;
  SentimentLabel groundTruth = SentimentLabel::Neutral;
  CategoryId category = 0;
  std::string categoryName;
  SeverityScore severity;
  std::vector<TokenView> tokens;
  std::vector<std::string> sentimentWords;  // lowercase, unique, in text order
};

struct TableFilter {
  std::optional<CategoryId> category;
  std::optional<std::string> word;
  std::optional<std::string> search;  // case-insensitive substring
};

bool matches(const TableRow& row, const TableFilter& filter);
std::vector<TableRow> filterRows(const std::vector<TableRow>& rows, const TableFilter& filter);

/// Everything analytics needs from a run.
struct RunData {
  std::vector<Category> categories;
  std::vector<Session> sessions;
  std::vector<Trial> trials;
  std::map<SampleId, AdjudicationResult> results;
};

struct AnalyticsConfig {
  SeverityWeights weights;
  SeverityThresholds thresholds;
  double cloudThreshold = 0.05;
  BucketThresholds buckets;
};

using ExplanationProvider = std::function<Explanation(const Trial&)>;

struct AnalysisSummary {
  RunSummary run;
  std::vector<CategorySummary> categories;
  std::vector<CloudEntry> cloud;
  std::vector<TableRow> rows;
  std::size_t pendingClaims = 0;
};

RunSummary runSummary(const RunData& run);

/// Throws AdjudicationPending when a claimed trial is not yet adjudicated,
/// unless `allowPending` is set, in which case such trials are skipped. An
/// empty `explanations` leaves table rows without token views.
AnalysisSummary summarize(const RunData& run, const AnalyticsConfig& config, const ExplanationProvider& explanations,
                          bool allowPending = false);

nlohmann::json toJson(const RunSummary& run);
nlohmann::json toJson(const AnalysisSummary& summary);
nlohmann::json toJson(const TableRow& row);

inline constexpr const char* kExportHeader = "Text,Human_Label,AI_Label,Category";

/// Adjudicated trials (nonsense excluded) as CSV with kExportHeader, in id
/// order. Human_Label is empty when no sentiment majority was reached.
std::string exportCsv(const RunData& run);

}  // namespace proact
