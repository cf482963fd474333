#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "proact/common.hpp"
#include "proact/random.hpp"

namespace proact {

struct Judgment {
  std::uint64_t judgmentId = 0;
  SampleId sampleId = 0;
  WorkerId workerId;
  bool isEnglishAndSensible = true;
  std::optional<SentimentLabel> sentiment;  // present iff sensible
  std::optional<CategoryId> category;       // present iff sensible
  bool isGold = false;                      // set by the board, never by clients
  Millis submittedAt = 0;
};

enum class AdjudicationStatus : std::uint8_t {
  RejectedNonsense,
  ValidatedFailing,
  ValidatedNotFailing,
  NoMajoritySentiment,
};

std::string_view toString(AdjudicationStatus status);

struct AdjudicationResult {
  SampleId sampleId = 0;
  AdjudicationStatus status = AdjudicationStatus::NoMajoritySentiment;
  std::optional<SentimentLabel> groundTruth;
  double confHuman = 0.0;
  CategoryId category = 0;
  std::size_t judgmentCount = 0;

  friend bool operator==(const AdjudicationResult&, const AdjudicationResult&) = default;
};

/// Majority-vote adjudication over accepted judgments:
///  1. a strict majority of all judgments saying "not sensible" rejects the sample;
///  2. otherwise the sentiment with a strict plurality among sentiment votes is
///     the ground truth (a tie for first yields NoMajoritySentiment);
///  3. confHuman = plurality count / sentiment votes;
///  4. the sample fails the model iff ground truth differs from the prediction;
///  5. the category is the strict plurality of category votes, else `noMajority`.
/// Throws QuorumNotMet when fewer than `quorum` judgments are given.
AdjudicationResult adjudicate(SampleId sample, std::span<const Judgment> accepted, SentimentLabel prediction,
                              CategoryId noMajority, std::size_t quorum);

struct GoldQuestion {
  SampleId sampleId = 0;
  std::string text;
  bool expectedSensible = true;
  std::optional<SentimentLabel> expectedSentiment;

  bool isCorrect(const Judgment& j) const;
};

struct ValidationConfig {
  std::size_t quorum = 5;
  double goldRate = 0.1;
  std::size_t goldMinAnswers = 5;
  double goldAccuracyThreshold = 0.7;
  std::size_t batchSize = 10;
};

struct TaskItem {
  SampleId sampleId = 0;
  bool gold = false;
};

struct Assignment {
  WorkerId workerId;
  std::vector<TaskItem> items;
  Millis at = 0;
};

enum class JudgmentStatus : std::uint8_t { Accepted, Rejected };

struct WorkerQuality {
  std::size_t goldAnswered = 0;
  std::size_t goldCorrect = 0;
  bool rejected = false;

  double accuracy() const {
    return goldAnswered == 0 ? 1.0 : static_cast<double>(goldCorrect) / static_cast<double>(goldAnswered);
  }
};

struct RecordOutcome {
  JudgmentStatus status = JudgmentStatus::Accepted;
  bool workerRejectedNow = false;
  std::vector<AdjudicationResult> adjudicated;  // samples that reached quorum
  std::vector<SampleId> reopened;               // adjudications retracted by a rejection cascade
};

/// Validation queue with quorum closing and gold-question quality control.
/// Planning is separated from applying so an event log can record the random
/// choices and replay them exactly.
nlohmann::json toJson(const Judgment& j);
/// Reads the client-supplied fields; isGold is ignored.
Judgment judgmentFromJson(const nlohmann::json& j);
nlohmann::json toJson(const AdjudicationResult& r);
nlohmann::json toJson(const Assignment& a);
Assignment assignmentFromJson(const nlohmann::json& j);

class ValidationBoard {
 public:
  explicit ValidationBoard(ValidationConfig config = {}, CategoryId noMajority = 0)
      : config_(config), noMajority_(noMajority) {}

  const ValidationConfig& config() const { return config_; }
  void setNoMajorityCategory(CategoryId id) { noMajority_ = id; }

  void enqueue(SampleId sample, const WorkerId& author, SentimentLabel prediction);
  void addGold(GoldQuestion gold);

  /// Picks up to batchSize samples the worker may judge, interleaving gold
  /// questions at goldRate. Throws NothingToJudge.
  Assignment plan(const WorkerId& worker, Rng& rng, Millis at) const;
  void apply(const Assignment& assignment);

  /// Throws DuplicateJudgment, UnknownAssignment or InvalidArgument without
  /// modifying the board.
  void check(const Judgment& judgment) const;
  RecordOutcome record(Judgment judgment);

  bool isGold(SampleId id) const { return gold_.count(id) != 0; }
  bool isQueued(SampleId id) const { return samples_.count(id) != 0; }
  std::optional<AdjudicationResult> result(SampleId id) const;
  std::size_t acceptedCount(SampleId id) const;
  const WorkerQuality& quality(const WorkerId& worker) const;

  const std::map<SampleId, AdjudicationResult>& results() const { return results_; }
  const std::map<SampleId, GoldQuestion>& goldQuestions() const { return gold_; }
  std::vector<Judgment> judgmentsFor(SampleId id) const;
  std::size_t pendingAssignments() const { return pending_.size(); }
  std::size_t openSamples() const;

  /// Canonical dump of the full board state, for fingerprints.
  nlohmann::json snapshot() const;

 private:
  struct SampleEntry {
    WorkerId author;
    SentimentLabel prediction = SentimentLabel::Neutral;
    std::vector<Judgment> accepted;
    std::vector<Judgment> rejected;
    bool closed = false;
  };

  std::size_t pendingFor(SampleId id) const;
  std::vector<SampleId> reopenAfterRejection(const WorkerId& worker);

  ValidationConfig config_;
  CategoryId noMajority_;
  std::map<SampleId, SampleEntry> samples_;
  std::map<SampleId, GoldQuestion> gold_;
  std::map<SampleId, AdjudicationResult> results_;
  std::map<WorkerId, WorkerQuality> quality_;
  std::set<std::pair<WorkerId, SampleId>> pending_;  // assigned, not yet judged
  std::map<SampleId, std::size_t> pendingCount_;
  std::set<std::pair<WorkerId, SampleId>> judged_;   // any judgment, gold included
};

}  // namespace proact
