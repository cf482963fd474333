#include "proact/adjudication.hpp"

#include <algorithm>
#include <array>

namespace proact {

std::string_view toString(AdjudicationStatus status) {
  switch (status) {
    case AdjudicationStatus::RejectedNonsense: return "rejected-nonsense";
    case AdjudicationStatus::ValidatedFailing: return "validated-failing";
    case AdjudicationStatus::ValidatedNotFailing: return "validated-not-failing";
    case AdjudicationStatus::NoMajoritySentiment: return "no-majority-sentiment";
  }
  return "no-majority-sentiment";
}

AdjudicationResult adjudicate(SampleId sample, std::span<const Judgment> accepted, SentimentLabel prediction,
                              CategoryId noMajority, std::size_t quorum) {
  if (accepted.size() < quorum || accepted.empty()) {
    throw Error(ErrorCode::QuorumNotMet, "sample " + std::to_string(sample) + " has " +
                                             std::to_string(accepted.size()) + " of " + std::to_string(quorum) +
                                             " judgments");
  }
  AdjudicationResult r;
  r.sampleId = sample;
  r.judgmentCount = accepted.size();
  r.category = noMajority;

  const auto nonsense = static_cast<std::size_t>(
      std::count_if(accepted.begin(), accepted.end(), [](const Judgment& j) { return !j.isEnglishAndSensible; }));
  if (2 * nonsense > accepted.size()) {
    r.status = AdjudicationStatus::RejectedNonsense;
    r.confHuman = static_cast<double>(nonsense) / static_cast<double>(accepted.size());
    return r;
  }

  std::array<std::size_t, 3> votes{};
  std::map<CategoryId, std::size_t> categoryVotes;
  for (const Judgment& j : accepted) {
    if (!j.isEnglishAndSensible) continue;
    if (j.sentiment) ++votes[labelIndex(*j.sentiment)];
    if (j.category) ++categoryVotes[*j.category];
  }
  const std::size_t sentimentVotes = votes[0] + votes[1] + votes[2];
  const std::size_t top = *std::max_element(votes.begin(), votes.end());
  const auto leaders = std::count(votes.begin(), votes.end(), top);
  r.confHuman = sentimentVotes == 0 ? 0.0 : static_cast<double>(top) / static_cast<double>(sentimentVotes);
  if (sentimentVotes == 0 || leaders > 1) {
    r.status = AdjudicationStatus::NoMajoritySentiment;
  } else {
    const auto truth = static_cast<SentimentLabel>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    r.groundTruth = truth;
    r.status = truth != prediction ? AdjudicationStatus::ValidatedFailing : AdjudicationStatus::ValidatedNotFailing;
  }

  std::size_t best = 0;
  std::size_t bestCount = 0;
  for (const auto& [cat, n] : categoryVotes) {
    if (n > best) {
      best = n;
      bestCount = 1;
      r.category = cat;
    } else if (n == best) {
      ++bestCount;
    }
  }
  if (bestCount != 1) r.category = noMajority;
  return r;
}

bool GoldQuestion::isCorrect(const Judgment& j) const {
  if (j.isEnglishAndSensible != expectedSensible) return false;
  if (!expectedSensible) return true;
  return !expectedSentiment || j.sentiment == expectedSentiment;
}

void ValidationBoard::enqueue(SampleId sample, const WorkerId& author, SentimentLabel prediction) {
  if (samples_.count(sample) || gold_.count(sample)) {
    throw Error(ErrorCode::InvalidArgument, "sample " + std::to_string(sample) + " already queued");
  }
  SampleEntry e;
  e.author = author;
  e.prediction = prediction;
  samples_.emplace(sample, std::move(e));
}

void ValidationBoard::addGold(GoldQuestion gold) {
  if (samples_.count(gold.sampleId) || gold_.count(gold.sampleId)) {
    throw Error(ErrorCode::InvalidArgument, "gold id " + std::to_string(gold.sampleId) + " already used");
  }
  if (!gold.expectedSensible) gold.expectedSentiment.reset();
  const SampleId id = gold.sampleId;
  gold_.emplace(id, std::move(gold));
}

std::size_t ValidationBoard::pendingFor(SampleId id) const {
  const auto it = pendingCount_.find(id);
  return it == pendingCount_.end() ? 0 : it->second;
}

Assignment ValidationBoard::plan(const WorkerId& worker, Rng& rng, Millis at) const {
  if (quality(worker).rejected) {
    throw Error(ErrorCode::NothingToJudge, "worker " + worker + " failed quality control");
  }
  std::vector<SampleId> candidates;
  for (const auto& [id, entry] : samples_) {
    if (entry.closed || entry.author == worker) continue;
    if (judged_.count({worker, id}) || pending_.count({worker, id})) continue;
    if (entry.accepted.size() + pendingFor(id) >= config_.quorum) continue;
    candidates.push_back(id);
  }
  if (candidates.empty()) throw Error(ErrorCode::NothingToJudge, "no samples left for worker " + worker);

  std::vector<SampleId> golds;
  for (const auto& [id, g] : gold_) {
    if (!judged_.count({worker, id}) && !pending_.count({worker, id})) golds.push_back(id);
  }

  Assignment a;
  a.workerId = worker;
  a.at = at;
  std::size_t next = 0;
  while (a.items.size() < config_.batchSize) {
    const bool wantGold = rng.bernoulli(config_.goldRate);
    if (wantGold && !golds.empty()) {
      const auto k = static_cast<std::size_t>(rng.below(golds.size()));
      a.items.push_back({golds[k], true});
      golds.erase(golds.begin() + static_cast<std::ptrdiff_t>(k));
    } else if (next < candidates.size()) {
      a.items.push_back({candidates[next++], false});
    } else {
      break;
    }
  }
  return a;
}

void ValidationBoard::apply(const Assignment& assignment) {
  for (const TaskItem& item : assignment.items) {
    if (pending_.insert({assignment.workerId, item.sampleId}).second) ++pendingCount_[item.sampleId];
  }
}

void ValidationBoard::check(const Judgment& j) const {
  if (judged_.count({j.workerId, j.sampleId})) {
    throw Error(ErrorCode::DuplicateJudgment,
                "worker " + j.workerId + " already judged sample " + std::to_string(j.sampleId));
  }
  if (!pending_.count({j.workerId, j.sampleId})) {
    throw Error(ErrorCode::UnknownAssignment,
                "sample " + std::to_string(j.sampleId) + " is not assigned to worker " + j.workerId);
  }
  if (j.isEnglishAndSensible != j.sentiment.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "sentiment is required exactly when the sentence is sensible");
  }
  if (j.isEnglishAndSensible != j.category.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "category is required exactly when the sentence is sensible");
  }
}

RecordOutcome ValidationBoard::record(Judgment j) {
  check(j);
  RecordOutcome out;
  const auto key = std::make_pair(j.workerId, j.sampleId);
  pending_.erase(key);
  if (auto it = pendingCount_.find(j.sampleId); it != pendingCount_.end() && --it->second == 0) {
    pendingCount_.erase(it);
  }
  judged_.insert(key);

  WorkerQuality& q = quality_[j.workerId];
  if (auto g = gold_.find(j.sampleId); g != gold_.end()) {
    j.isGold = true;
    ++q.goldAnswered;
    if (g->second.isCorrect(j)) ++q.goldCorrect;
    out.status = q.rejected ? JudgmentStatus::Rejected : JudgmentStatus::Accepted;
    if (!q.rejected && q.goldAnswered >= config_.goldMinAnswers && q.accuracy() < config_.goldAccuracyThreshold) {
      q.rejected = true;
      out.workerRejectedNow = true;
      out.reopened = reopenAfterRejection(j.workerId);
    }
    return out;
  }

  j.isGold = false;
  SampleEntry& entry = samples_.at(j.sampleId);
  if (q.rejected) {
    out.status = JudgmentStatus::Rejected;
    entry.rejected.push_back(std::move(j));
    return out;
  }
  const SampleId id = j.sampleId;
  entry.accepted.push_back(std::move(j));
  if (!entry.closed && entry.accepted.size() >= config_.quorum) {
    entry.closed = true;
    auto r = adjudicate(id, entry.accepted, entry.prediction, noMajority_, config_.quorum);
    results_[id] = r;
    out.adjudicated.push_back(std::move(r));
  }
  return out;
}

std::vector<SampleId> ValidationBoard::reopenAfterRejection(const WorkerId& worker) {
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->first == worker) {
      if (auto c = pendingCount_.find(it->second); c != pendingCount_.end() && --c->second == 0) {
        pendingCount_.erase(c);
      }
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
  std::vector<SampleId> reopened;
  for (auto& [id, entry] : samples_) {
    const auto firstRejected = std::stable_partition(entry.accepted.begin(), entry.accepted.end(),
                                                     [&](const Judgment& j) { return j.workerId != worker; });
    if (firstRejected == entry.accepted.end()) continue;
    entry.rejected.insert(entry.rejected.end(), firstRejected, entry.accepted.end());
    entry.accepted.erase(firstRejected, entry.accepted.end());
    if (entry.closed && entry.accepted.size() < config_.quorum) {
      entry.closed = false;
      results_.erase(id);
      reopened.push_back(id);
    }
  }
  return reopened;
}

std::optional<AdjudicationResult> ValidationBoard::result(SampleId id) const {
  const auto it = results_.find(id);
  if (it == results_.end()) return std::nullopt;
  return it->second;
}

std::size_t ValidationBoard::acceptedCount(SampleId id) const {
  const auto it = samples_.find(id);
  return it == samples_.end() ? 0 : it->second.accepted.size();
}

const WorkerQuality& ValidationBoard::quality(const WorkerId& worker) const {
  static const WorkerQuality kFresh;
  const auto it = quality_.find(worker);
  return it == quality_.end() ? kFresh : it->second;
}

std::vector<Judgment> ValidationBoard::judgmentsFor(SampleId id) const {
  const auto it = samples_.find(id);
  if (it == samples_.end()) return {};
  std::vector<Judgment> all = it->second.accepted;
  all.insert(all.end(), it->second.rejected.begin(), it->second.rejected.end());
  return all;
}

std::size_t ValidationBoard::openSamples() const {
  return static_cast<std::size_t>(
      std::count_if(samples_.begin(), samples_.end(), [](const auto& kv) { return !kv.second.closed; }));
}

nlohmann::json toJson(const Judgment& j) {
  nlohmann::json out = {{"judgment_id", j.judgmentId},   {"sample_id", j.sampleId},
                        {"worker", j.workerId},          {"sensible", j.isEnglishAndSensible},
                        {"gold", j.isGold},              {"submitted_at", j.submittedAt},
                        {"sentiment", nullptr},          {"category", nullptr}};
  if (j.sentiment) out["sentiment"] = toString(*j.sentiment);
  if (j.category) out["category"] = *j.category;
  return out;
}

Judgment judgmentFromJson(const nlohmann::json& j) {
  Judgment out;
  try {
    out.sampleId = j.at("sample_id").get<SampleId>();
    out.workerId = j.at("worker").get<std::string>();
    out.isEnglishAndSensible = j.at("sensible").get<bool>();
    if (j.contains("judgment_id")) out.judgmentId = j["judgment_id"].get<std::uint64_t>();
    if (j.contains("submitted_at")) out.submittedAt = j["submitted_at"].get<Millis>();
    if (j.contains("sentiment") && !j["sentiment"].is_null()) {
      out.sentiment = requireLabel(j["sentiment"].get<std::string>());
    }
    if (j.contains("category") && !j["category"].is_null()) out.category = j["category"].get<CategoryId>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad judgment: ") + e.what());
  }
  return out;
}

nlohmann::json toJson(const AdjudicationResult& r) {
  return {{"sample_id", r.sampleId},
          {"status", toString(r.status)},
          {"ground_truth", r.groundTruth ? nlohmann::json(toString(*r.groundTruth)) : nlohmann::json(nullptr)},
          {"conf_human", r.confHuman},
          {"category_id", r.category},
          {"judgment_count", r.judgmentCount}};
}

nlohmann::json toJson(const Assignment& a) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : a.items) items.push_back({{"sample_id", it.sampleId}, {"gold", it.gold}});
  return {{"worker", a.workerId}, {"items", std::move(items)}, {"at", a.at}};
}

Assignment assignmentFromJson(const nlohmann::json& j) {
  Assignment a;
  a.workerId = j.at("worker").get<std::string>();
  a.at = j.at("at").get<Millis>();
  for (const auto& it : j.at("items")) a.items.push_back({it.at("sample_id").get<SampleId>(), it.at("gold").get<bool>()});
  return a;
}

nlohmann::json ValidationBoard::snapshot() const {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& [id, e] : samples_) {
    nlohmann::json accepted = nlohmann::json::array();
    nlohmann::json rejected = nlohmann::json::array();
    for (const auto& j : e.accepted) accepted.push_back(toJson(j));
    for (const auto& j : e.rejected) rejected.push_back(toJson(j));
    samples.push_back({{"id", id},
                       {"author", e.author},
                       {"prediction", toString(e.prediction)},
                       {"closed", e.closed},
                       {"accepted", std::move(accepted)},
                       {"rejected", std::move(rejected)}});
  }
  nlohmann::json gold = nlohmann::json::array();
  for (const auto& [id, g] : gold_) {
    gold.push_back({{"id", id},
                    {"text", g.text},
                    {"sensible", g.expectedSensible},
                    {"sentiment", g.expectedSentiment ? nlohmann::json(toString(*g.expectedSentiment))
                                                      : nlohmann::json(nullptr)}});
  }
  nlohmann::json results = nlohmann::json::array();
  for (const auto& [id, r] : results_) results.push_back(toJson(r));
  nlohmann::json quality = nlohmann::json::array();
  for (const auto& [w, q] : quality_) {
    quality.push_back({{"worker", w}, {"answered", q.goldAnswered}, {"correct", q.goldCorrect}, {"rejected", q.rejected}});
  }
  nlohmann::json pending = nlohmann::json::array();
  for (const auto& [w, id] : pending_) pending.push_back({w, id});
  nlohmann::json judged = nlohmann::json::array();
  for (const auto& [w, id] : judged_) judged.push_back({w, id});
  return {{"samples", std::move(samples)}, {"gold", std::move(gold)},       {"results", std::move(results)},
          {"quality", std::move(quality)}, {"pending", std::move(pending)}, {"judged", std::move(judged)}};
}

}  // namespace proact
