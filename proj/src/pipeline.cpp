#include "proact/pipeline.hpp"

#include <algorithm>

#include "proact/explainer.hpp"
#include "proact/random.hpp"

namespace proact {

using nlohmann::json;

namespace {

const char* const kBootstrapCategories[][2] = {
    {"Subtle Sentiment Cues", "Sentiment carried by words or phrasing the model does not pick up."},
    {"Mixed-sentiment", "Both positive and negative sentiment in one sentence."},
    {"Questions", "Questions that express no sentiment of their own."},
    {"Others", "Failures that fit no other category."},
    {kNoMajorityName, "Judges could not agree on a category."},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

json optionalLabel(const std::optional<SentimentLabel>& l) { return l ? json(toString(*l)) : json(nullptr); }

std::optional<SentimentLabel> readOptionalLabel(const json& j) {
  if (j.is_null()) return std::nullopt;
  return requireLabel(j.get<std::string>());
}

Event makeEvent(std::string type, Millis at, json data) {
  Event e;
  e.type = std::move(type);
  e.at = at;
  e.data = std::move(data);
  return e;
}

}  // namespace

json toJson(const Event& e) { return {{"seq", e.seq}, {"type", e.type}, {"at", e.at}, {"data", e.data}}; }

Event eventFromJson(const json& j) {
  Event e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.type = j.at("type").get<std::string>();
  e.at = j.at("at").get<Millis>();
  e.data = j.at("data");
  return e;
}

LedgerEntry settleBonuses(const Trial& trial, const Session& session, const std::optional<AdjudicationResult>& result,
                          const PaymentRates& rates) {
  LedgerEntry e;
  e.worker = trial.worker;
  e.trial = trial.id;
  if (trial.claim == ClaimState::Pending) {
    throw Error(ErrorCode::AdjudicationIncomplete, "trial " + std::to_string(trial.id) + " has not been resolved");
  }
  e.base = rates.base;
  if (trial.claim != ClaimState::ClaimedWin) return e;
  if (!result) {
    throw Error(ErrorCode::AdjudicationIncomplete, "trial " + std::to_string(trial.id) + " awaits adjudication");
  }
  if (result->status == AdjudicationStatus::ValidatedFailing) {
    e.failBonus = rates.failBonus;
    if (result->category == session.target) e.categoryBonus = rates.categoryBonus;
  }
  return e;
}

json toJson(const Session& s) {
  return {{"id", s.id},
          {"worker", s.worker},
          {"target_category", s.target},
          {"condition", {{"lime", s.condition.showExplanation}, {"sp", s.condition.startingPoint}}},
          {"started_at", s.startedAt},
          {"starting_sample", s.startingSample ? json(*s.startingSample) : json(nullptr)},
          {"starting_text", s.startingText},
          {"trials", s.trials},
          {"closed", s.closed}};
}

json toJson(const Trial& t, const BucketThresholds& buckets) {
  return {{"id", t.id},
          {"session", t.session},
          {"worker", t.worker},
          {"text", t.text},
          {"submitted_at", t.submittedAt},
          {"prediction", predictionToJson(t.prediction)},
          {"explanation", t.explanation ? explanationToJson(*t.explanation, buckets) : json(nullptr)},
          {"claim", toString(t.claim)},
          {"asserted", optionalLabel(t.asserted)},
          {"claimed_at", t.claimedAt}};
}

json toJson(const Category& c) {
  return {{"id", c.id}, {"name", c.name}, {"description", c.description}, {"created_by", c.createdBy},
          {"active", c.active}};
}

json toJson(const SeedSample& s) {
  return {{"id", s.id},
          {"text", s.text},
          {"human_label", toString(s.humanLabel)},
          {"prediction", predictionToJson(s.prediction)},
          {"category", s.category ? json(*s.category) : json(nullptr)}};
}

json toJson(const LedgerEntry& e) {
  return {{"worker", e.worker},
          {"trial", e.trial},
          {"base", e.base.micros},
          {"fail_bonus", e.failBonus.micros},
          {"category_bonus", e.categoryBonus.micros},
          {"total_dollars", e.total().dollars()}};
}

Platform::Platform(PlatformConfig config) : config_(std::move(config)), board_(config_.validation) {
  for (const auto& [name, description] : kBootstrapCategories) {
    Category c;
    c.id = nextCategory_++;
    c.name = name;
    c.description = description;
    c.createdBy = "system";
    categories_.emplace(c.id, c);
  }
  noMajority_ = *findCategory(kNoMajorityName);
  board_.setNoMajorityCategory(noMajority_);
}

std::optional<CategoryId> Platform::findCategory(std::string_view name) const {
  for (const auto& [id, c] : categories_) {
    if (c.name == name) return id;
  }
  return std::nullopt;
}

const Category& Platform::activeCategory(CategoryId id) const {
  const auto it = categories_.find(id);
  if (it == categories_.end() || !it->second.active) {
    throw Error(ErrorCode::NotFound, "category " + std::to_string(id) + " does not exist");
  }
  return it->second;
}

const Session& Platform::session(SessionId id) const {
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "session " + std::to_string(id) + " does not exist");
  return it->second;
}

const Trial& Platform::trial(SampleId id) const {
  const auto it = trials_.find(id);
  if (it == trials_.end()) throw Error(ErrorCode::NotFound, "trial " + std::to_string(id) + " does not exist");
  return it->second;
}

const StoredResponse* Platform::storedResponse(const std::string& key) const {
  const auto it = responses_.find(key);
  return it == responses_.end() ? nullptr : &it->second;
}

std::vector<Platform::PoolItem> Platform::pool(CategoryId target) const {
  std::vector<PoolItem> out;
  for (const auto& [id, s] : seeds_) {
    if (s.category == target) out.push_back({id, s.text});
  }
  for (const auto& [id, r] : board_.results()) {
    if (r.status != AdjudicationStatus::ValidatedFailing || r.category != target) continue;
    if (auto t = trials_.find(id); t != trials_.end()) out.push_back({id, t->second.text});
  }
  std::sort(out.begin(), out.end(), [](const PoolItem& a, const PoolItem& b) { return a.id < b.id; });
  return out;
}

std::vector<std::string> Platform::startingPool(CategoryId target) const {
  std::vector<std::string> out;
  for (auto& p : pool(target)) out.push_back(std::move(p.text));
  return out;
}

Event Platform::prepareCreateCategory(const std::string& name, const std::string& description,
                                      const std::string& createdBy, Millis at) const {
  const std::string n = trim(name);
  if (n.empty()) throw Error(ErrorCode::InvalidArgument, "category name must not be empty");
  if (findCategory(n)) throw Error(ErrorCode::DuplicateCategory, "category '" + n + "' already exists");
  return makeEvent("category_created", at,
                   {{"id", nextCategory_}, {"name", n}, {"description", description}, {"created_by", createdBy}});
}

Event Platform::prepareImportSeed(const std::string& text, SentimentLabel humanLabel, const Prediction& prediction,
                                  std::optional<CategoryId> category, Millis at) const {
  if (tokenize(text).wordCount() == 0) throw Error(ErrorCode::EmptyText, "seed sample has no words");
  if (category) activeCategory(*category);
  return makeEvent("seed_imported", at,
                   {{"id", nextSample_},
                    {"text", text},
                    {"label", toString(humanLabel)},
                    {"prediction", predictionToJson(prediction)},
                    {"category", category ? json(*category) : json(nullptr)}});
}

Event Platform::prepareAddGold(const std::string& text, bool expectedSensible,
                               std::optional<SentimentLabel> expectedSentiment, Millis at) const {
  if (trim(text).empty()) throw Error(ErrorCode::EmptyText, "gold question has no text");
  if (expectedSensible && !expectedSentiment) {
    throw Error(ErrorCode::InvalidArgument, "a sensible gold question needs an expected sentiment");
  }
  return makeEvent("gold_added", at,
                   {{"id", nextSample_},
                    {"text", text},
                    {"sensible", expectedSensible},
                    {"sentiment", expectedSensible ? optionalLabel(expectedSentiment) : json(nullptr)}});
}

Event Platform::prepareOpenSession(const WorkerId& worker, CategoryId target, PromptCondition condition,
                                   Millis at) const {
  if (trim(worker).empty()) throw Error(ErrorCode::InvalidArgument, "worker id must not be empty");
  const Category& cat = activeCategory(target);
  json data = {{"id", nextSession_},
               {"worker", worker},
               {"target", target},
               {"condition", {{"lime", condition.showExplanation}, {"sp", condition.startingPoint}}},
               {"starting_sample", nullptr},
               {"starting_text", ""}};
  if (condition.startingPoint) {
    const auto items = pool(target);
    if (items.empty()) {
      throw Error(ErrorCode::NoSeedErrorsAvailable, "no validated errors stored for category '" + cat.name + "'");
    }
    Rng rng(mixSeed(config_.seed, 0x5350000000000000ULL + nextSession_));
    const auto& pick = items[static_cast<std::size_t>(rng.below(items.size()))];
    data["starting_sample"] = pick.id;
    data["starting_text"] = pick.text;
  }
  return makeEvent("session_opened", at, std::move(data));
}

Event Platform::prepareSubmitTrial(SessionId sessionId, const std::string& text, const Classifier& model,
                                   Millis at) const {
  const Session& s = session(sessionId);
  if (s.closed) throw Error(ErrorCode::SessionClosed, "session " + std::to_string(sessionId) + " is closed");
  const std::size_t words = tokenize(text).wordCount();
  if (words < config_.minWords) {
    throw Error(ErrorCode::TooShort, "input has " + std::to_string(words) + " words; at least " +
                                         std::to_string(config_.minWords) + " are required");
  }
  // Trials within a session stay strictly time-ordered.
  Millis when = std::max(at, s.startedAt);
  if (!s.trials.empty()) when = std::max(when, trials_.at(s.trials.back()).submittedAt + 1);
  const Prediction p = model.predict(text);
  json explanation = nullptr;
  if (s.condition.showExplanation) explanation = explanationToJson(explain(model, text, config_.explain), config_.buckets);
  return makeEvent("trial_submitted", when,
                   {{"id", nextSample_},
                    {"session", sessionId},
                    {"text", text},
                    {"prediction", predictionToJson(p)},
                    {"explanation", std::move(explanation)}});
}

Event Platform::prepareClaim(SampleId trialId, ClaimState claim, std::optional<SentimentLabel> asserted,
                             Millis at) const {
  const Trial& t = trial(trialId);
  if (t.claim != ClaimState::Pending) {
    throw Error(ErrorCode::AlreadyResolved,
                "trial " + std::to_string(trialId) + " is already " + std::string(toString(t.claim)));
  }
  switch (claim) {
    case ClaimState::Pending:
      throw Error(ErrorCode::InvalidArgument, "claim must be win, continue or give-up");
    case ClaimState::ClaimedWin:
      if (!asserted) throw Error(ErrorCode::InvalidArgument, "a win claim needs the worker's sentiment");
      if (*asserted == t.prediction.label) {
        throw Error(ErrorCode::LabelMatchesPrediction,
                    "the model already predicted " + std::string(toString(*asserted)));
      }
      break;
    case ClaimState::Continued:
    case ClaimState::GivenUp:
      break;
  }
  return makeEvent("trial_claimed", std::max(at, t.submittedAt),
                   {{"id", trialId},
                    {"claim", toString(claim)},
                    {"asserted", claim == ClaimState::ClaimedWin ? json(toString(*asserted)) : json(nullptr)}});
}

Event Platform::prepareAssignTasks(const WorkerId& worker, Millis at) const {
  if (trim(worker).empty()) throw Error(ErrorCode::InvalidArgument, "worker id must not be empty");
  Rng rng(mixSeed(config_.seed, 0x6173736967000000ULL + assignments_));
  const Assignment a = board_.plan(worker, rng, at);
  return makeEvent("tasks_assigned", at, toJson(a));
}

Event Platform::prepareJudgment(Judgment j, Millis at) const {
  board_.check(j);
  if (j.category) activeCategory(*j.category);
  j.judgmentId = nextJudgment_;
  j.submittedAt = at;
  j.isGold = false;
  json data = toJson(j);
  data.erase("gold");
  return makeEvent("judgment_recorded", at, std::move(data));
}

Event Platform::prepareStoreResponse(const std::string& key, const StoredResponse& r, Millis at) const {
  if (responses_.count(key)) throw Error(ErrorCode::IdempotencyConflict, "request key already used");
  return makeEvent("response_stored", at,
                   {{"key", key}, {"fingerprint", r.fingerprint}, {"status", r.status}, {"body", r.body}});
}

void Platform::expectId(std::uint64_t expected, std::uint64_t got, const char* what) const {
  if (expected != got) {
    throw Error(ErrorCode::CorruptLog, std::string(what) + " id " + std::to_string(got) + " out of sequence (expected " +
                                           std::to_string(expected) + ")");
  }
}

json Platform::apply(const Event& e) {
  json effect = json::object();
  try {
    const json& d = e.data;
    if (e.type == "category_created") {
      Category c;
      c.id = d.at("id").get<CategoryId>();
      expectId(nextCategory_, c.id, "category");
      c.name = d.at("name").get<std::string>();
      c.description = d.at("description").get<std::string>();
      c.createdBy = d.at("created_by").get<std::string>();
      if (findCategory(c.name)) throw Error(ErrorCode::CorruptLog, "duplicate category " + c.name);
      categories_.emplace(c.id, c);
      ++nextCategory_;
      effect = toJson(c);
    } else if (e.type == "seed_imported") {
      SeedSample s;
      s.id = d.at("id").get<SampleId>();
      expectId(nextSample_, s.id, "sample");
      s.text = d.at("text").get<std::string>();
      s.humanLabel = requireLabel(d.at("label").get<std::string>());
      s.prediction = predictionFromJson(d.at("prediction"));
      if (!d.at("category").is_null()) s.category = d["category"].get<CategoryId>();
      seeds_.emplace(s.id, s);
      ++nextSample_;
      effect = toJson(s);
    } else if (e.type == "gold_added") {
      GoldQuestion g;
      g.sampleId = d.at("id").get<SampleId>();
      expectId(nextSample_, g.sampleId, "sample");
      g.text = d.at("text").get<std::string>();
      g.expectedSensible = d.at("sensible").get<bool>();
      g.expectedSentiment = readOptionalLabel(d.at("sentiment"));
      board_.addGold(g);
      ++nextSample_;
      effect = {{"id", g.sampleId}};
    } else if (e.type == "session_opened") {
      Session s;
      s.id = d.at("id").get<SessionId>();
      expectId(nextSession_, s.id, "session");
      s.worker = d.at("worker").get<std::string>();
      s.target = d.at("target").get<CategoryId>();
      s.condition = {d.at("condition").at("lime").get<bool>(), d.at("condition").at("sp").get<bool>()};
      s.startedAt = e.at;
      if (!d.at("starting_sample").is_null()) s.startingSample = d["starting_sample"].get<SampleId>();
      s.startingText = d.at("starting_text").get<std::string>();
      sessions_.emplace(s.id, s);
      ++nextSession_;
      effect = toJson(s);
    } else if (e.type == "trial_submitted") {
      Trial t;
      t.id = d.at("id").get<SampleId>();
      expectId(nextSample_, t.id, "sample");
      t.session = d.at("session").get<SessionId>();
      auto sit = sessions_.find(t.session);
      if (sit == sessions_.end()) throw Error(ErrorCode::CorruptLog, "trial for unknown session");
      t.worker = sit->second.worker;
      t.text = d.at("text").get<std::string>();
      t.submittedAt = e.at;
      t.prediction = predictionFromJson(d.at("prediction"));
      if (!d.at("explanation").is_null()) t.explanation = explanationFromJson(d["explanation"]);
      sit->second.trials.push_back(t.id);
      effect = toJson(t, config_.buckets);
      trials_.emplace(t.id, std::move(t));
      ++nextSample_;
    } else if (e.type == "trial_claimed") {
      Trial& t = trials_.at(d.at("id").get<SampleId>());
      t.claim = *parseClaimState(d.at("claim").get<std::string>());
      t.asserted = readOptionalLabel(d.at("asserted"));
      t.claimedAt = e.at;
      Session& s = sessions_.at(t.session);
      if (t.claim == ClaimState::ClaimedWin) {
        board_.enqueue(t.id, t.worker, t.prediction.label);
      } else {
        ledger_[t.id] = settleBonuses(t, s, std::nullopt, config_.payment);
      }
      if (t.claim == ClaimState::GivenUp) s.closed = true;
      effect = toJson(t, config_.buckets);
    } else if (e.type == "tasks_assigned") {
      const Assignment a = assignmentFromJson(d);
      board_.apply(a);
      ++assignments_;
      effect = d;
    } else if (e.type == "judgment_recorded") {
      effect = applyJudgment(e);
    } else if (e.type == "response_stored") {
      StoredResponse r{d.at("fingerprint").get<std::string>(), d.at("status").get<int>(),
                       d.at("body").get<std::string>()};
      responses_[d.at("key").get<std::string>()] = std::move(r);
    } else {
      throw Error(ErrorCode::CorruptLog, "unknown event type '" + e.type + "'");
    }
  } catch (const Error& err) {
    if (err.code() == ErrorCode::CorruptLog) throw;
    throw Error(ErrorCode::CorruptLog, "cannot apply " + e.type + ": " + err.what());
  } catch (const std::exception& err) {
    throw Error(ErrorCode::CorruptLog, "cannot apply " + e.type + ": " + err.what());
  }
  ++eventCount_;
  return effect;
}

json Platform::applyJudgment(const Event& e) {
  Judgment j = judgmentFromJson(e.data);
  expectId(nextJudgment_, j.judgmentId, "judgment");
  j.submittedAt = e.at;
  const RecordOutcome out = board_.record(j);
  ++nextJudgment_;
  for (SampleId id : out.reopened) ledger_.erase(id);
  json adjudicated = json::array();
  for (const auto& r : out.adjudicated) {
    adjudicated.push_back(toJson(r));
    if (auto t = trials_.find(r.sampleId); t != trials_.end()) {
      ledger_[r.sampleId] = settleBonuses(t->second, sessions_.at(t->second.session), r, config_.payment);
    }
  }
  return {{"judgment_id", j.judgmentId},
          {"status", out.status == JudgmentStatus::Accepted ? "accepted" : "rejected"},
          {"worker_rejected", out.workerRejectedNow},
          {"adjudicated", std::move(adjudicated)},
          {"reopened", out.reopened}};
}

LedgerEntry Platform::settle(SampleId trialId) const {
  const Trial& t = trial(trialId);
  return settleBonuses(t, session(t.session), board_.result(trialId), config_.payment);
}

Money Platform::ledgerTotal() const {
  Money total;
  for (const auto& [id, e] : ledger_) total += e.total();
  return total;
}

RunData Platform::runData() const {
  RunData run;
  for (const auto& [id, c] : categories_) run.categories.push_back(c);
  for (const auto& [id, s] : sessions_) run.sessions.push_back(s);
  for (const auto& [id, t] : trials_) {
    run.trials.push_back(t);
    if (auto r = board_.result(id)) run.results.emplace(id, *r);
  }
  return run;
}

json Platform::snapshot() const {
  json categories = json::array();
  for (const auto& [id, c] : categories_) categories.push_back(toJson(c));
  json sessions = json::array();
  for (const auto& [id, s] : sessions_) sessions.push_back(toJson(s));
  json trials = json::array();
  for (const auto& [id, t] : trials_) trials.push_back(toJson(t, config_.buckets));
  json seeds = json::array();
  for (const auto& [id, s] : seeds_) seeds.push_back(toJson(s));
  json ledger = json::array();
  for (const auto& [id, e] : ledger_) ledger.push_back(toJson(e));
  json responses = json::array();
  for (const auto& [k, r] : responses_) {
    responses.push_back({{"key", k}, {"fingerprint", r.fingerprint}, {"status", r.status}, {"body", r.body}});
  }
  return {{"config", toJson(config_)},
          {"categories", std::move(categories)},
          {"sessions", std::move(sessions)},
          {"trials", std::move(trials)},
          {"seeds", std::move(seeds)},
          {"board", board_.snapshot()},
          {"ledger", std::move(ledger)},
          {"responses", std::move(responses)},
          {"counters",
           {{"category", nextCategory_},
            {"session", nextSession_},
            {"sample", nextSample_},
            {"judgment", nextJudgment_},
            {"assignments", assignments_},
            {"events", eventCount_}}}};
}

std::uint64_t Platform::stateHash() const { return fnv1a(snapshot().dump()); }

}  // namespace proact
