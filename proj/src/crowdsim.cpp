#include "proact/crowdsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <set>

#include "proact/explainer.hpp"
#include "proact/random.hpp"
#include "proact/service.hpp"

namespace proact {

using json = nlohmann::json;

std::string_view toString(EditStrategy s) {
  switch (s) {
    case EditStrategy::FromScratch: return "from-scratch";
    case EditStrategy::PerturbStartingPoint: return "perturb-starting-point";
    case EditStrategy::ExplanationGuided: return "explanation-guided";
  }
  return "from-scratch";
}

std::optional<EditStrategy> parseEditStrategy(std::string_view text) {
  for (auto s : {EditStrategy::FromScratch, EditStrategy::PerturbStartingPoint, EditStrategy::ExplanationGuided}) {
    if (toString(s) == text) return s;
  }
  return std::nullopt;
}

// --- scenario config ---------------------------------------------------------

namespace {

void rejectUnknown(const json& j, std::initializer_list<std::string_view> keys, const char* where) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, std::string(where) + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw Error(ErrorCode::Parse, std::string("unknown key '") + k + "' in " + where);
    }
  }
}

void checkProbability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, what + " must be in [0,1]");
}

SimWorkerProfile profileFromJson(const json& j, SimWorkerProfile base, const char* where) {
  rejectUnknown(j, {"id", "skill", "diligence", "edit_strategy", "trial_time"}, where);
  if (j.contains("id")) base.workerId = j["id"].get<std::string>();
  if (j.contains("skill")) base.skill = j["skill"].get<double>();
  if (j.contains("diligence")) base.diligence = j["diligence"].get<double>();
  if (j.contains("edit_strategy")) {
    if (j["edit_strategy"].is_null()) {
      base.editStrategy.reset();
    } else {
      const auto name = j["edit_strategy"].get<std::string>();
      base.editStrategy = parseEditStrategy(name);
      if (!base.editStrategy) throw Error(ErrorCode::Parse, "unknown edit_strategy '" + name + "'");
    }
  }
  if (j.contains("trial_time")) {
    const json& t = j["trial_time"];
    rejectUnknown(t, {"mean_seconds", "sigma"}, "trial_time");
    base.trialTime.meanSeconds = t.value("mean_seconds", base.trialTime.meanSeconds);
    base.trialTime.sigma = t.value("sigma", base.trialTime.sigma);
  }
  checkProbability(base.skill, "skill");
  checkProbability(base.diligence, "diligence");
  if (!(base.trialTime.meanSeconds > 0.0) || !(base.trialTime.sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "trial_time needs mean_seconds > 0 and sigma >= 0");
  }
  return base;
}

json toJson(const SimWorkerProfile& p) {
  json j = {{"skill", p.skill},
            {"diligence", p.diligence},
            {"trial_time", {{"mean_seconds", p.trialTime.meanSeconds}, {"sigma", p.trialTime.sigma}}},
            {"edit_strategy", p.editStrategy ? json(toString(*p.editStrategy)) : json(nullptr)}};
  if (!p.workerId.empty()) j["id"] = p.workerId;
  return j;
}

}  // namespace

ScenarioConfig scenarioFromJson(const json& j) {
  rejectUnknown(j,
                {"seed", "workers", "trials_per_worker", "trial_budget", "conditions", "categories",
                 "seed_errors_per_category", "gold_questions", "start_ms", "candidate_attempts", "crafter",
                 "validator", "validators", "adversaries", "overrides", "platform"},
                "scenario");
  ScenarioConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.workerCount = j.value("workers", c.workerCount);
    c.trialsPerWorker = j.value("trials_per_worker", c.trialsPerWorker);
    c.trialBudget = j.value("trial_budget", c.trialBudget);
    c.seedErrorsPerCategory = j.value("seed_errors_per_category", c.seedErrorsPerCategory);
    c.goldQuestions = j.value("gold_questions", c.goldQuestions);
    c.startMillis = j.value("start_ms", c.startMillis);
    c.candidateAttempts = j.value("candidate_attempts", c.candidateAttempts);
    c.validatorCount = j.value("validators", c.validatorCount);
    if (j.contains("conditions")) {
      c.conditions.clear();
      for (const auto& v : j["conditions"]) {
        const auto name = v.get<std::string>();
        const auto cond = parseCondition(name);
        if (!cond) throw Error(ErrorCode::Parse, "unknown condition '" + name + "'");
        c.conditions.push_back(*cond);
      }
    }
    if (j.contains("categories")) c.categories = j["categories"].get<std::vector<std::string>>();
    if (j.contains("crafter")) c.crafter = profileFromJson(j["crafter"], c.crafter, "crafter");
    if (j.contains("validator")) c.validator = profileFromJson(j["validator"], c.validator, "validator");
    if (j.contains("adversaries")) {
      for (const auto& a : j["adversaries"]) {
        auto p = profileFromJson(a, c.validator, "adversaries");
        if (p.workerId.empty()) throw Error(ErrorCode::Parse, "adversaries need an id");
        c.adversaries.push_back(std::move(p));
      }
    }
    if (j.contains("overrides")) {
      for (const auto& o : j["overrides"]) {
        profileFromJson(o, {}, "overrides");  // validate early
        if (!o.contains("id")) throw Error(ErrorCode::Parse, "overrides need an id");
        c.overrides[o["id"].get<std::string>()] = o;
      }
    }
    if (j.contains("platform")) c.platform = configFromJson(j["platform"]);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("scenario: ") + e.what());
  }
  if (c.conditions.empty()) throw Error(ErrorCode::InvalidArgument, "scenario needs at least one condition");
  if (c.categories.empty()) throw Error(ErrorCode::InvalidArgument, "scenario needs at least one category");
  if (c.candidateAttempts == 0) throw Error(ErrorCode::InvalidArgument, "candidate_attempts must be positive");
  return c;
}

json toJson(const ScenarioConfig& c) {
  json conditions = json::array();
  for (const auto& cond : c.conditions) conditions.push_back(conditionName(cond));
  json adversaries = json::array();
  for (const auto& a : c.adversaries) adversaries.push_back(toJson(a));
  json overrides = json::array();
  for (const auto& [id, o] : c.overrides) overrides.push_back(o);
  return {{"seed", c.seed},
          {"workers", c.workerCount},
          {"trials_per_worker", c.trialsPerWorker},
          {"trial_budget", c.trialBudget},
          {"conditions", conditions},
          {"categories", c.categories},
          {"seed_errors_per_category", c.seedErrorsPerCategory},
          {"gold_questions", c.goldQuestions},
          {"start_ms", c.startMillis},
          {"candidate_attempts", c.candidateAttempts},
          {"crafter", toJson(c.crafter)},
          {"validator", toJson(c.validator)},
          {"validators", c.validatorCount},
          {"adversaries", adversaries},
          {"overrides", overrides},
          {"platform", toJson(c.platform)}};
}

ScenarioConfig loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario " + path);
  try {
    return scenarioFromJson(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

namespace {

std::string hashHex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

json toJson(const SimulationReport& r) {
  return {{"sessions", r.sessions},
          {"trials", r.trials},
          {"wins_claimed", r.winsClaimed},
          {"budget_exhausted", r.budgetExhausted},
          {"validation_rounds", r.validationRounds},
          {"judgments", r.judgments},
          {"rejected_validators", r.rejectedValidators},
          {"adjudicated", r.adjudicated},
          {"unresolved", r.unresolved},
          {"state_hash", hashHex(r.stateHash)},
          {"events", r.eventCount},
          {"summary", toJson(r.summary)}};
}

// --- sentence world ----------------------------------------------------------

namespace {

using L = SentimentLabel;

// Words the stand-in model has seen with a clear polarity, and "blind" words
// of the same polarity it has never seen.
const std::vector<std::string> kPositive = {"amazing", "awesome", "delicious", "excellent", "fantastic", "friendly",
                                            "good", "great", "lovely", "nice", "perfect", "wonderful"};
const std::vector<std::string> kNegative = {"awful", "bad", "boring", "broken", "cold", "dirty",
                                            "disgusting", "horrible", "rude", "slow", "terrible", "worst"};
const std::vector<std::string> kBlindPositive = {"superb", "effective", "splendid", "delightful", "marvelous",
                                                 "stellar", "impressive", "charming", "pleasant", "brilliant"};
const std::vector<std::string> kBlindNegative = {"mediocre", "dreadful", "lousy", "bland", "stale",
                                                 "shabby", "grim", "dull", "tedious", "sloppy"};
const std::vector<std::string> kItems = {"pizza", "burger", "coffee", "hotel", "room",  "service", "staff",
                                         "waiter", "movie", "show",   "book",  "app",   "flight",  "seat",
                                         "food",  "pasta", "tea",    "music", "phone"};
const std::vector<std::string> kDays = {"monday", "tuesday", "sunday", "friday"};

const std::string& pick(const std::vector<std::string>& v, Rng& rng) { return v[rng.below(v.size())]; }

bool contains(const std::vector<std::string>& v, const std::string& w) {
  return std::find(v.begin(), v.end(), w) != v.end();
}

std::string fill(std::string tmpl, const std::map<std::string, std::string>& slots) {
  for (const auto& [k, v] : slots) {
    const std::string key = "{" + k + "}";
    for (auto at = tmpl.find(key); at != std::string::npos; at = tmpl.find(key, at + v.size())) {
      tmpl.replace(at, key.size(), v);
    }
  }
  return tmpl;
}

struct Draft {
  std::string text;
  L oracle = L::Neutral;
};

enum class Kind { Subtle, Mixed, Question, Negation, Plain };

Kind kindFor(const std::string& categoryName) {
  if (categoryName == "Subtle Sentiment Cues") return Kind::Subtle;
  if (categoryName == "Mixed-sentiment") return Kind::Mixed;
  if (categoryName == "Questions") return Kind::Question;
  if (categoryName == "Others") return Kind::Negation;
  return Kind::Plain;
}

// One sentence of the given kind with the answer a careful human would give.
Draft compose(Kind kind, Rng& rng) {
  const bool positive = rng.bernoulli(0.5);
  std::map<std::string, std::string> s = {{"item", pick(kItems, rng)},
                                          {"item2", pick(kItems, rng)},
                                          {"pos", pick(kPositive, rng)},
                                          {"neg", pick(kNegative, rng)},
                                          {"bpos", pick(kBlindPositive, rng)},
                                          {"bneg", pick(kBlindNegative, rng)},
                                          {"day", pick(kDays, rng)}};
  auto one = [&](std::initializer_list<const char*> templates) {
    const std::vector<std::string> t(templates.begin(), templates.end());
    return fill(pick(t, rng), s);
  };
  switch (kind) {
    case Kind::Subtle:
      if (positive) {
        return {one({"the {item} was {bpos} today", "honestly the {item} felt {bpos} to me",
                     "we thought the {item} was {bpos}", "my {item} was rather {bpos} overall"}),
                L::Positive};
      }
      return {one({"the {item} was {bneg} today", "honestly the {item} felt {bneg} to me",
                   "we thought the {item} was {bneg}", "my {item} was rather {bneg} overall"}),
              L::Negative};
    case Kind::Mixed:
      if (positive) {
        return {one({"the {item} was {neg} but the {item2} was {pos}",
                     "{neg} {item} yet the {item2} was really {pos}",
                     "although the {item} was {neg} the {item2} was {pos} and {bpos}"}),
                L::Positive};
      }
      return {one({"the {item} was {pos} but the {item2} was {neg}",
                   "{pos} {item} yet the {item2} was really {neg}",
                   "although the {item} was {pos} the {item2} was {neg} and {bneg}"}),
              L::Negative};
    case Kind::Question:
      return {one({"is the {item} really {pos} here", "was the {item} {neg} or not",
                   "why is the {item} so {pos} today", "do you think the {item} is {neg}",
                   "is the {item} {pos} or {neg}"}),
              L::Neutral};
    case Kind::Negation:
      if (positive) {
        return {one({"the {item} was not {neg} at all", "i would never call the {item} {neg}",
                     "the {item} was far from {neg}"}),
                L::Positive};
      }
      return {one({"the {item} was not {pos} at all", "i would never call the {item} {pos}",
                   "the {item} was far from {pos}"}),
              L::Negative};
    case Kind::Plain:
      break;
  }
  const auto r = rng.below(3);
  if (r == 0) return {one({"the {item} was really {pos}", "such a {pos} {item} we enjoyed it"}), L::Positive};
  if (r == 1) return {one({"what a {neg} {item} it was", "the {item} was really {neg}"}), L::Negative};
  return {one({"we ordered the {item} on {day}", "they serve the {item} daily at noon"}), L::Neutral};
}

// Same-polarity substitutes: a seen sentiment word becomes a blind one.
std::optional<std::string> blindSynonym(const std::string& word, Rng& rng) {
  if (contains(kPositive, word)) return pick(kBlindPositive, rng);
  if (contains(kNegative, word)) return pick(kBlindNegative, rng);
  return std::nullopt;
}

std::string replaceToken(const TokenizedText& t, std::size_t index, const std::string& with) {
  const Token& tok = t.tokens[index];
  return t.original.substr(0, tok.begin) + with + t.original.substr(tok.end);
}

// Swaps a content word for another of the same kind; keeps the human answer.
std::string perturb(const std::string& text, Rng& rng) {
  const TokenizedText t = tokenize(text);
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    const auto& w = t.tokens[i].lower;
    if (contains(kItems, w) || contains(kPositive, w) || contains(kNegative, w)) slots.push_back(i);
  }
  if (slots.empty()) return "honestly " + text;
  const std::size_t i = slots[rng.below(slots.size())];
  const auto& w = t.tokens[i].lower;
  const auto& pool = contains(kItems, w) ? kItems : contains(kPositive, w) ? kPositive : kNegative;
  return replaceToken(t, i, pick(pool, rng));
}

struct Oracle {
  L sentiment = L::Neutral;
  CategoryId category = 0;
};

std::uint64_t keyed(std::uint64_t seed, std::string_view tag, std::uint64_t a = 0, std::uint64_t b = 0) {
  return mixSeed(mixSeed(mixSeed(seed, fnv1a(tag)), a), b);
}

double lognormalSeconds(const TrialTimeModel& m, Rng& rng) {
  const double mu = std::log(m.meanSeconds) - 0.5 * m.sigma * m.sigma;
  return std::exp(mu + m.sigma * rng.normal());
}

class Simulation {
 public:
  Simulation(std::shared_ptr<const Classifier> model, const ScenarioConfig& config, const std::string& logPath)
      : model_(std::move(model)),
        cfg_(config),
        clock_(std::make_shared<Millis>(config.startMillis)),
        svc_(model_, config.platform, logPath, [c = clock_] { return *c; }) {
    if (svc_.read([](const Platform& p) { return p.eventCount(); }) != 0) {
      throw Error(ErrorCode::InvalidArgument, "simulation log " + logPath + " already holds events");
    }
    explain_ = svc_.read([](const Platform& p) { return p.config().explain; });
  }

  SimulationReport run() {
    resolveCategories();
    importSeeds();
    addGold();
    craft();
    validate();
    return report();
  }

 private:
  struct Crafter {
    SimWorkerProfile profile;
    PromptCondition condition;
    CategoryId target = 0;
    Kind kind = Kind::Plain;
    std::optional<Session> session;
    std::size_t done = 0;
    Millis next = 0;
  };

  SimWorkerProfile profileFor(const std::string& id, const SimWorkerProfile& base) const {
    SimWorkerProfile p = base;
    p.workerId = id;
    if (auto it = cfg_.overrides.find(id); it != cfg_.overrides.end()) p = profileFromJson(it->second, p, "overrides");
    return p;
  }

  void resolveCategories() {
    for (const auto& name : cfg_.categories) {
      auto id = svc_.read([&](const Platform& p) { return p.findCategory(name); });
      if (!id) {
        const bool numeric = !name.empty() && name.find_first_not_of("0123456789") == std::string::npos;
        if (numeric && svc_.read([&](const Platform& p) { return p.categories().count(std::stoull(name)) != 0; })) {
          id = std::stoull(name);
        }
      }
      if (!id) throw Error(ErrorCode::NotFound, "scenario category '" + name + "' does not exist");
      const std::string canonical = svc_.read([&](const Platform& p) { return p.categories().at(*id).name; });
      targets_.push_back({*id, kindFor(canonical)});
    }
  }

  // A sentence of `kind` the model gets wrong (or right, when `fail` is false).
  std::optional<Draft> search(Kind kind, bool fail, Rng& rng) const {
    for (std::size_t a = 0; a < cfg_.candidateAttempts * 5; ++a) {
      Draft d = compose(kind, rng);
      if ((model_->predict(d.text).label != d.oracle) == fail) return d;
    }
    return std::nullopt;
  }

  void importSeeds() {
    Rng rng(keyed(cfg_.seed, "seeds"));
    for (const auto& [id, kind] : targets_) {
      for (std::size_t k = 0; k < cfg_.seedErrorsPerCategory; ++k) {
        auto d = search(kind == Kind::Plain ? Kind::Subtle : kind, true, rng);
        if (!d) break;
        tick(1000);
        const auto seed = svc_.importSeed(d->text, d->oracle, id);
        oracle_[seed.id] = {d->oracle, id};
      }
    }
  }

  void addGold() {
    Rng rng(keyed(cfg_.seed, "gold"));
    for (std::size_t k = 0; k < cfg_.goldQuestions; ++k) {
      const Draft d = compose(Kind::Plain, rng);
      tick(1000);
      svc_.addGold(d.text, true, d.oracle);
    }
  }

  void tick(Millis ms) { *clock_ += ms; }

  EditStrategy strategyFor(const Crafter& c) const {
    if (c.profile.editStrategy) return *c.profile.editStrategy;
    if (c.condition.showExplanation) return EditStrategy::ExplanationGuided;
    if (c.condition.startingPoint) return EditStrategy::PerturbStartingPoint;
    return EditStrategy::FromScratch;
  }

  // Edits the token the explanation credits most for the current prediction,
  // swapping a seen sentiment word for an unseen one of the same polarity.
  Draft guide(Draft d, Rng& rng) const {
    for (int edit = 0; edit < 3 && model_->predict(d.text).label == d.oracle; ++edit) {
      const Explanation e = explain(*model_, d.text, explain_);
      const auto& w = e.classWeights[labelIndex(e.prediction.label)];
      std::vector<std::size_t> order(w.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return std::abs(w[a]) > std::abs(w[b]); });
      bool changed = false;
      for (std::size_t i : order) {
        if (auto syn = blindSynonym(e.text.tokens[i].lower, rng)) {
          d.text = replaceToken(e.text, i, *syn);
          changed = true;
          break;
        }
      }
      if (!changed) break;
    }
    return d;
  }

  Draft candidate(const Crafter& c, EditStrategy strategy, Rng& rng) const {
    const Kind kind = c.kind == Kind::Plain ? Kind::Subtle : c.kind;
    const bool haveStart = c.session && c.session->startingSample && !c.session->startingText.empty();
    Draft base;
    if ((strategy == EditStrategy::PerturbStartingPoint || c.condition.startingPoint) && haveStart) {
      base = {perturb(c.session->startingText, rng), startOracle(c)};
    } else {
      base = compose(kind, rng);
    }
    if (strategy == EditStrategy::ExplanationGuided) base = guide(base, rng);
    return base;
  }

  L startOracle(const Crafter& c) const {
    const SampleId id = *c.session->startingSample;
    if (auto it = oracle_.find(id); it != oracle_.end()) return it->second.sentiment;
    return svc_.read([&](const Platform& p) {
      const auto r = p.board().result(id);
      return r && r->groundTruth ? *r->groundTruth : L::Neutral;
    });
  }

  void craft() {
    std::vector<Crafter> crafters;
    for (std::size_t k = 0; k < cfg_.workerCount; ++k) {
      char id[32];
      std::snprintf(id, sizeof id, "crafter%03zu", k + 1);
      Crafter c;
      c.profile = profileFor(id, cfg_.crafter);
      c.condition = cfg_.conditions[k % cfg_.conditions.size()];
      std::tie(c.target, c.kind) = targets_[k % targets_.size()];
      c.next = *clock_ + static_cast<Millis>(k) * 15'000;
      crafters.push_back(std::move(c));
    }
    using Slot = std::pair<Millis, std::size_t>;
    std::priority_queue<Slot, std::vector<Slot>, std::greater<>> queue;
    for (std::size_t k = 0; k < crafters.size(); ++k) queue.push({crafters[k].next, k});

    while (!queue.empty()) {
      const auto [at, k] = queue.top();
      queue.pop();
      Crafter& c = crafters[k];
      *clock_ = std::max(*clock_, at);
      if (!c.session) {
        c.session = svc_.openSession(c.profile.workerId, c.target, c.condition);
        ++report_.sessions;
      } else {
        if (report_.trials >= cfg_.trialBudget) {
          report_.budgetExhausted = true;
          continue;
        }
        trial(c);
        if (c.done == cfg_.trialsPerWorker) continue;
      }
      Rng t(keyed(cfg_.seed, "time", fnv1a(c.profile.workerId), c.done));
      c.next = *clock_ + static_cast<Millis>(std::llround(lognormalSeconds(c.profile.trialTime, t) * 1000.0));
      queue.push({c.next, k});
    }
  }

  void trial(Crafter& c) {
    const std::uint64_t wid = fnv1a(c.profile.workerId);
    // Common random numbers: whether trial i aims at a failure depends only on
    // (seed, worker, i), so raising skill only adds aimed trials.
    const bool aim = Rng(keyed(cfg_.seed, "aim", wid, c.done)).uniform() < c.profile.skill;
    Rng rng(keyed(cfg_.seed, "draft", wid, c.done));
    Draft d;
    bool found = false;
    if (aim) {
      const EditStrategy strategy = strategyFor(c);
      for (std::size_t a = 0; a < cfg_.candidateAttempts && !found; ++a) {
        d = candidate(c, strategy, rng);
        found = model_->predict(d.text).label != d.oracle;
      }
    }
    if (!found) {
      auto plain = search(Kind::Plain, false, rng);
      d = plain ? *plain : compose(Kind::Plain, rng);
    }
    const Trial t = svc_.submitTrial(c.session->id, d.text);
    ++c.done;
    ++report_.trials;
    tick(2000);
    if (t.prediction.label != d.oracle) {
      oracle_[t.id] = {d.oracle, c.target};
      svc_.claim(t.id, ClaimState::ClaimedWin, d.oracle);
      ++report_.winsClaimed;
    } else {
      const bool last = c.done == cfg_.trialsPerWorker;
      svc_.claim(t.id, last ? ClaimState::GivenUp : ClaimState::Continued);
    }
  }

  Oracle oracleFor(SampleId id) const {
    if (auto it = oracle_.find(id); it != oracle_.end()) return it->second;
    return svc_.read([&](const Platform& p) {
      const auto& g = p.board().goldQuestions().at(id);
      return Oracle{g.expectedSentiment.value_or(L::Neutral), 1};
    });
  }

  Judgment judge(const SimWorkerProfile& v, SampleId id) const {
    Rng rng(keyed(cfg_.seed, "judge", fnv1a(v.workerId), id));
    const Oracle o = oracleFor(id);
    Judgment j;
    j.sampleId = id;
    j.workerId = v.workerId;
    j.isEnglishAndSensible = true;
    if (rng.uniform() < v.diligence) {
      j.sentiment = o.sentiment;
      j.category = o.category;
    } else {
      const auto shift = 1 + rng.below(2);
      j.sentiment = static_cast<L>((labelIndex(o.sentiment) + shift) % 3);
      j.category = targets_[rng.below(targets_.size())].first;
    }
    return j;
  }

  void validate() {
    std::vector<SimWorkerProfile> validators = cfg_.adversaries;
    for (std::size_t k = 0; k < cfg_.validatorCount; ++k) {
      char id[32];
      std::snprintf(id, sizeof id, "validator%03zu", k + 1);
      validators.push_back(profileFor(id, cfg_.validator));
    }
    std::set<WorkerId> rejected;
    for (bool progress = true; progress;) {
      progress = false;
      ++report_.validationRounds;
      for (const auto& v : validators) {
        if (rejected.count(v.workerId)) continue;
        tick(5000);
        Assignment a;
        try {
          a = svc_.assignTasks(v.workerId);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NothingToJudge) throw;
          continue;
        }
        for (const TaskItem& item : a.items) {
          tick(12'000);
          const json effect = svc_.recordJudgment(judge(v, item.sampleId));
          ++report_.judgments;
          progress = true;
          if (effect.value("worker_rejected", false)) {
            rejected.insert(v.workerId);
            report_.rejectedValidators.push_back(v.workerId);
            break;  // the rest of the batch was withdrawn
          }
        }
      }
    }
  }

  SimulationReport report() {
    svc_.read([&](const Platform& p) {
      for (const auto& [id, t] : p.trials()) {
        if (t.claim != ClaimState::ClaimedWin) continue;
        if (p.board().result(id)) {
          ++report_.adjudicated;
        } else {
          ++report_.unresolved;
        }
      }
      report_.eventCount = p.eventCount();
      return 0;
    });
    report_.summary = svc_.summary(report_.unresolved > 0);
    report_.exportCsv = svc_.exportCsv();
    report_.stateHash = svc_.stateHash();
    return std::move(report_);
  }

  std::shared_ptr<const Classifier> model_;
  ScenarioConfig cfg_;
  std::shared_ptr<Millis> clock_;
  Service svc_;
  ExplainConfig explain_;
  std::vector<std::pair<CategoryId, Kind>> targets_;
  std::map<SampleId, Oracle> oracle_;
  SimulationReport report_;
};

}  // namespace

SimulationReport runScenario(std::shared_ptr<const Classifier> model, const ScenarioConfig& config,
                             const std::string& logPath) {
  if (!model) throw Error(ErrorCode::ModelMissing, "simulation needs a model");
  return Simulation(std::move(model), config, logPath).run();
}

// --- recorded study counters -------------------------------------------------

namespace {

struct ConditionTally {
  PromptCondition condition;
  std::size_t trials;
  std::size_t valid;
  std::size_t workers;
};

}  // namespace

RunData replayStudyBookkeeping() {
  const ConditionTally tallies[] = {{{true, true}, 262, 75, 66}, {{false, false}, 293, 108, 46}};
  // Validated failures per category, in validation order across both conditions.
  const std::pair<CategoryId, std::size_t> perCategory[] = {{1, 23}, {2, 44}, {3, 61}, {4, 55}};

  RunData run;
  const char* names[] = {"Subtle Sentiment Cues", "Mixed-sentiment", "Questions", "Others", "No majority"};
  for (CategoryId id = 1; id <= 5; ++id) run.categories.push_back({id, names[id - 1], "", "system", true});

  std::vector<CategoryId> categoryOf;
  for (const auto& [id, n] : perCategory) categoryOf.insert(categoryOf.end(), n, id);

  Rng rng(0x7461626c6531ULL);
  SessionId sid = 0;
  SampleId tid = 0;
  std::size_t validSoFar = 0;
  std::size_t workerNo = 0;
  const Millis t0 = 1'560'000'000'000;
  for (const auto& tally : tallies) {
    // Spread trials evenly over the condition's workers, then mark the
    // validated ones at an even stride so they land across many workers.
    std::vector<SampleId> ids;
    for (std::size_t w = 0; w < tally.workers; ++w) {
      Session s;
      s.id = ++sid;
      s.worker = "worker" + std::to_string(++workerNo);
      s.target = 1 + (workerNo % 4);
      s.condition = tally.condition;
      s.startedAt = t0 + static_cast<Millis>(s.id) * 3'600'000;
      const std::size_t n = tally.trials / tally.workers + (w < tally.trials % tally.workers ? 1 : 0);
      Millis at = s.startedAt;
      for (std::size_t k = 0; k < n; ++k) {
        Trial t;
        t.id = ++tid;
        t.session = s.id;
        t.worker = s.worker;
        t.text = "recorded trial " + std::to_string(t.id);
        at += 20'000 + static_cast<Millis>(rng.below(100'000));
        t.submittedAt = at;
        const double conf = 0.4 + 0.6 * rng.uniform();
        const double rest = (1.0 - conf) / 2.0;
        t.prediction = Prediction::fromScores({rest, rest, conf});  // positive
        t.claim = k + 1 == n ? ClaimState::GivenUp : ClaimState::Continued;
        t.claimedAt = at + 1000;
        s.trials.push_back(t.id);
        ids.push_back(t.id);
        run.trials.push_back(std::move(t));
      }
      s.closed = true;
      run.sessions.push_back(std::move(s));
    }
    for (std::size_t v = 0; v < tally.valid; ++v) {
      const SampleId id = ids[v * ids.size() / tally.valid];
      Trial& t = run.trials[id - 1];
      t.claim = ClaimState::ClaimedWin;
      t.asserted = L::Negative;
      AdjudicationResult r;
      r.sampleId = id;
      r.status = AdjudicationStatus::ValidatedFailing;
      r.groundTruth = L::Negative;
      r.confHuman = (3.0 + static_cast<double>(rng.below(3))) / 5.0;
      r.category = categoryOf[validSoFar++];
      r.judgmentCount = 5;
      run.results[id] = r;
    }
  }
  return run;
}

}  // namespace proact
