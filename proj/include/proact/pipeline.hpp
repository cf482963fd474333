#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "proact/adjudication.hpp"
#include "proact/analytics.hpp"
#include "proact/classifier.hpp"
#include "proact/config.hpp"
#include "proact/records.hpp"

namespace proact {

/// One state change. Every random draw and model output is captured in
/// `data`, so applying the same events always rebuilds the same state.
struct Event {
  std::uint64_t seq = 0;
  std::string type;
  Millis at = 0;
  nlohmann::json data;
};

nlohmann::json toJson(const Event& e);
Event eventFromJson(const nlohmann::json& j);

/// The bonus owed for one resolved trial. Throws AdjudicationIncomplete when
/// the trial is a claimed win without a result, or still pending.
LedgerEntry settleBonuses(const Trial& trial, const Session& session, const std::optional<AdjudicationResult>& result,
                          const PaymentRates& rates);

struct StoredResponse {
  std::string fingerprint;
  int status = 200;
  std::string body;
};

nlohmann::json toJson(const Session& s);
nlohmann::json toJson(const Trial& t, const BucketThresholds& buckets);
nlohmann::json toJson(const Category& c);
nlohmann::json toJson(const SeedSample& s);
nlohmann::json toJson(const LedgerEntry& e);

/// Sessions, trials, the validation board and the payout ledger.
///
/// Mutations are split in two: a const `prepare*` call validates the request
/// and returns the event (throwing the domain error if it is not allowed),
/// then `apply` performs it. A store logs the event in between.
class Platform {
 public:
  explicit Platform(PlatformConfig config = {});

  const PlatformConfig& config() const { return config_; }

  Event prepareCreateCategory(const std::string& name, const std::string& description, const std::string& createdBy,
                              Millis at) const;
  Event prepareImportSeed(const std::string& text, SentimentLabel humanLabel, const Prediction& prediction,
                          std::optional<CategoryId> category, Millis at) const;
  Event prepareAddGold(const std::string& text, bool expectedSensible, std::optional<SentimentLabel> expectedSentiment,
                       Millis at) const;
  Event prepareOpenSession(const WorkerId& worker, CategoryId target, PromptCondition condition, Millis at) const;
  Event prepareSubmitTrial(SessionId session, const std::string& text, const Classifier& model, Millis at) const;
  Event prepareClaim(SampleId trial, ClaimState claim, std::optional<SentimentLabel> asserted, Millis at) const;
  Event prepareAssignTasks(const WorkerId& worker, Millis at) const;
  Event prepareJudgment(Judgment judgment, Millis at) const;
  Event prepareStoreResponse(const std::string& key, const StoredResponse& response, Millis at) const;

  /// Applies an event and returns its effect. Inconsistent events (replayed
  /// out of order, unknown ids) throw CorruptLog.
  nlohmann::json apply(const Event& event);

  const std::map<CategoryId, Category>& categories() const { return categories_; }
  std::optional<CategoryId> findCategory(std::string_view name) const;
  CategoryId noMajorityCategory() const { return noMajority_; }
  const Session& session(SessionId id) const;
  const Trial& trial(SampleId id) const;
  const std::map<SessionId, Session>& sessions() const { return sessions_; }
  const std::map<SampleId, Trial>& trials() const { return trials_; }
  const std::map<SampleId, SeedSample>& seeds() const { return seeds_; }
  const ValidationBoard& board() const { return board_; }
  const std::map<SampleId, LedgerEntry>& ledger() const { return ledger_; }
  const StoredResponse* storedResponse(const std::string& key) const;
  std::uint64_t eventCount() const { return eventCount_; }

  /// Validated errors that may seed a starting-point session, in id order.
  std::vector<std::string> startingPool(CategoryId target) const;
  LedgerEntry settle(SampleId trial) const;
  Money ledgerTotal() const;

  RunData runData() const;
  nlohmann::json snapshot() const;
  /// FNV-1a of the canonical snapshot dump.
  std::uint64_t stateHash() const;

 private:
  struct PoolItem {
    SampleId id;
    std::string text;
  };
  std::vector<PoolItem> pool(CategoryId target) const;
  const Category& activeCategory(CategoryId id) const;
  void expectId(std::uint64_t expected, std::uint64_t got, const char* what) const;
  nlohmann::json applyJudgment(const Event& e);

  PlatformConfig config_;
  CategoryId noMajority_ = 0;
  std::map<CategoryId, Category> categories_;
  std::map<SessionId, Session> sessions_;
  std::map<SampleId, Trial> trials_;
  std::map<SampleId, SeedSample> seeds_;
  ValidationBoard board_;
  std::map<SampleId, LedgerEntry> ledger_;
  std::map<std::string, StoredResponse> responses_;

  CategoryId nextCategory_ = 1;
  SessionId nextSession_ = 1;
  SampleId nextSample_ = 1;
  std::uint64_t nextJudgment_ = 1;
  std::uint64_t assignments_ = 0;
  std::uint64_t eventCount_ = 0;
};

}  // namespace proact
