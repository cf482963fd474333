// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each check reports its wall time against its limit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "proact/adjudication.hpp"
#include "proact/analytics.hpp"
#include "proact/crowdsim.hpp"
#include "proact/csv.hpp"
#include "proact/explainer.hpp"
#include "proact/store.hpp"
#include "support/fixtures.hpp"
#include "support/ridge_oracle.hpp"
#include "support/temp.hpp"

namespace {

using namespace proact;
using L = SentimentLabel;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void check(const char* name, double limitSeconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limitSeconds > 0 && secs >= limitSeconds) {
    out.require(false, "took " + std::to_string(secs) + " s");
  }
  char timing[64];
  if (limitSeconds > 0) {
    std::snprintf(timing, sizeof timing, "%.3fs < %.0fs", secs, limitSeconds);
  } else {
    std::snprintf(timing, sizeof timing, "%.3fs", secs);
  }
  std::printf("%s  %-28s [%s]%s%s\n", out.ok ? "PASS" : "FAIL", name, timing, out.detail.empty() ? "" : "  ",
              out.detail.c_str());
  std::fflush(stdout);
  failures += !out.ok;
}

std::shared_ptr<const Classifier> corpusModel() {
  static const auto model = std::make_shared<NaiveBayesModel>(
      NaiveBayesModel::train(readLabeledCsv(testing::dataPath("train_corpus.csv"))));
  return model;
}

std::string readBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> scenarioFiles() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(testing::dataPath("scenarios"))) {
    if (e.path().extension() == ".json") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome severityCheck() {
  Outcome o;
  const auto s = severity(0.6, 0.9, {0.5, 0.5});
  o.require(std::abs(s.severity - 0.75) <= 1e-9, "S(0.6, 0.9) = " + std::to_string(s.severity));
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double h = u(gen), a = u(gen), w = u(gen);
    const double h2 = h + (1.0 - h) * u(gen), a2 = a + (1.0 - a) * u(gen);
    const SeverityWeights weights{w, 1.0 - w};
    const auto lo = severity(h, a, weights);
    const auto hi = severity(h2, a2, weights);
    o.require(lo.severity <= hi.severity + 1e-15, "severity decreased at pair " + std::to_string(k));
    o.require(static_cast<int>(lo.bucket) <= static_cast<int>(hi.bucket), "bucket decreased at pair " + std::to_string(k));
  }
  return o;
}

Outcome majorityCheck() {
  Outcome o;
  constexpr CategoryId kNoMajority = 5;
  for (int code = 0; code < 243; ++code) {
    int counts[3] = {0, 0, 0};
    std::vector<Judgment> js;
    int c = code;
    for (int k = 0; k < 5; ++k) {
      const int v = c % 3;
      c /= 3;
      counts[v] += 1;
      Judgment j;
      j.sampleId = 1;
      j.workerId = "w" + std::to_string(k);
      j.isEnglishAndSensible = true;
      j.sentiment = static_cast<L>(v);
      j.category = 1;
      js.push_back(j);
    }
    const int best = *std::max_element(counts, counts + 3);
    const int atBest = static_cast<int>(std::count(counts, counts + 3, best));
    const int winner = static_cast<int>(std::find(counts, counts + 3, best) - counts);
    for (L prediction : kAllLabels) {
      const auto r = adjudicate(1, js, prediction, kNoMajority, 5);
      if (atBest > 1) {
        o.require(r.status == AdjudicationStatus::NoMajoritySentiment, "missed tie at " + std::to_string(code));
        continue;
      }
      o.require(r.groundTruth == static_cast<L>(winner), "wrong majority at " + std::to_string(code));
      o.require(std::abs(r.confHuman - best / 5.0) < 1e-12, "wrong confHuman at " + std::to_string(code));
      const auto expected = static_cast<L>(winner) == prediction ? AdjudicationStatus::ValidatedNotFailing
                                                                 : AdjudicationStatus::ValidatedFailing;
      o.require(r.status == expected, "wrong status at " + std::to_string(code));
    }
  }
  return o;
}

Outcome explainerOracleCheck() {
  Outcome o;
  const auto model = corpusModel();
  for (const std::string text : {"the food was excellent", "great pizza but rude waiter",
                                 "we had a slow and boring time at the hotel",
                                 "i ordered the coffee at noon on monday"}) {
    ExplainConfig cfg;
    cfg.exhaustive = true;
    const auto ex = explain(*model, text, cfg);
    const std::size_t n = ex.text.tokens.size();
    o.require(n <= 10, "fixture sentence longer than 10 tokens");
    for (L label : kAllLabels) {
      const auto fit = testing::exhaustiveRidgeOracle(
          n, 0.75 * std::sqrt(double(n)), cfg.ridgePenalty, [&](const std::vector<int>& z) {
            std::string kept;
            for (std::size_t j = 0; j < n; ++j) {
              if (!z[j]) continue;
              if (!kept.empty()) kept += ' ';
              kept += ex.text.tokens[j].text;
            }
            return model->predict(kept).probability(label);
          });
      for (std::size_t j = 0; j < n; ++j) {
        o.require(std::abs(ex.classWeights[labelIndex(label)][j] - fit.weights[j]) <= 1e-6,
                  "exhaustive weight off oracle in \"" + text + "\"");
      }
    }
  }

  const auto linear = testing::linearFixtureModel();
  ExplainConfig cfg;
  cfg.sampleCount = 2000;
  const auto ex = explain(linear, testing::linearFixtureText(), cfg);
  const auto& w = ex.classWeights[labelIndex(L::Positive)];
  const auto& truth = testing::linearCoefficients();
  for (std::size_t j = 0; j < truth.size(); ++j) {
    o.require(std::abs(w[j] - truth[j]) <= 0.05 * std::abs(truth[j]),
              "sampled weight " + std::to_string(j) + " off by more than 5%");
  }
  return o;
}

Outcome excellentCheck() {
  Outcome o;
  const auto model = NaiveBayesModel::train(testing::sixDocumentCorpus());
  const auto ex = explain(model, "Crowdsourcing is an excellent approach to utilize human intelligence");
  const auto& pos = ex.classWeights[labelIndex(L::Positive)];
  std::size_t k = pos.size();
  for (std::size_t j = 0; j < ex.text.tokens.size(); ++j) {
    if (ex.text.tokens[j].lower == "excellent") k = j;
  }
  o.require(k < pos.size(), "token not found");
  if (!o.ok) return o;
  o.require(pos[k] > 0.0, "non-positive attribution");
  o.require(std::max_element(pos.begin(), pos.end()) - pos.begin() == static_cast<std::ptrdiff_t>(k),
            "another token outweighs excellent");
  return o;
}

Outcome bookkeepingCheck() {
  Outcome o;
  const RunSummary s = runSummary(replayStudyBookkeeping());
  o.require(s.nTotalTrials == 555, "N_total " + std::to_string(s.nTotalTrials));
  o.require(s.nValidated == 183, "N_valid " + std::to_string(s.nValidated));
  o.require(s.workerCount == 112, "workers " + std::to_string(s.workerCount));
  const auto& both = s.byCondition.at(PromptCondition{true, true});
  const auto& plain = s.byCondition.at(PromptCondition{false, false});
  o.require(both.nTotal == 262 && both.nValid == 75 && both.workers == 66, "lime+sp counts");
  o.require(plain.nTotal == 293 && plain.nValid == 108 && plain.workers == 46, "plain counts");
  return o;
}

Outcome categoryCheck() {
  Outcome o;
  const auto summary = summarize(replayStudyBookkeeping(), {}, nullptr);
  const auto find = [&](const std::string& name) -> const CategorySummary* {
    for (const auto& c : summary.categories) {
      if (c.name == name) return &c;
    }
    return nullptr;
  };
  const auto* subtle = find("Subtle Sentiment Cues");
  const auto* mixed = find("Mixed-sentiment");
  o.require(subtle && mixed, "category missing");
  if (!o.ok) return o;
  o.require(subtle->total() == 23, "subtle column " + std::to_string(subtle->total()));
  o.require(mixed->total() == 44, "mixed column " + std::to_string(mixed->total()));
  o.require(std::abs(subtle->robustness - 23.0 / 183.0) <= 1e-9, "subtle robustness");
  o.require(std::abs(mixed->robustness - 44.0 / 183.0) <= 1e-9, "mixed robustness");
  return o;
}

void collectTrialSeconds(const Platform& p, std::vector<double>& out) {
  for (const auto& [sid, s] : p.sessions()) {
    TrialTiming timing{s.startedAt, {}};
    for (SampleId t : s.trials) timing.trialTimes.push_back(p.trial(t).submittedAt);
    for (double secs : trialSeconds(timing)) out.push_back(secs);
  }
}

Outcome tcapCheck() {
  Outcome o;
  const auto ws = workerStats("w", {TrialTiming{0, {40'000, 440'000}}}, 1);
  o.require(ws && ws->avgTimePerTrial == 170.0, "gaps 40/400 did not give 170");

  std::vector<double> seconds;
  for (const auto& path : scenarioFiles()) {
    testing::TempPath log("acc-tcap");
    runScenario(corpusModel(), loadScenario(path), log.str());
    collectTrialSeconds(replay(log.str()), seconds);
  }
  // A slow crowd whose raw gaps routinely exceed five minutes.
  ScenarioConfig slow;
  slow.crafter.trialTime = {240.0, 1.2};
  slow.platform.explain.sampleCount = 200;
  testing::TempPath log("acc-tcap-slow");
  runScenario(corpusModel(), slow, log.str());
  collectTrialSeconds(replay(log.str()), seconds);

  o.require(!seconds.empty(), "no trials simulated");
  for (double s : seconds) o.require(s >= 0.0 && s <= 300.0, "trial time " + std::to_string(s));
  o.detail = o.ok ? std::to_string(seconds.size()) + " trial times checked" : o.detail;
  return o;
}

Outcome determinismCheck() {
  Outcome o;
  ScenarioConfig c;
  c.seed = 7;
  c.workerCount = 20;
  testing::TempPath a("acc-det-a"), b("acc-det-b");
  const auto ra = runScenario(corpusModel(), c, a.str());
  const auto rb = runScenario(corpusModel(), c, b.str());
  const std::string la = readBytes(a.str()), lb = readBytes(b.str());
  o.require(!la.empty(), "empty log");
  o.require(la == lb, "event logs differ");
  o.require(ra.exportCsv == rb.exportCsv, "exports differ");
  o.require(ra.exportCsv.rfind("Text,Human_Label,AI_Label,Category\n", 0) == 0, "export header");
  o.require(ra.trials == 20 * c.trialsPerWorker, "trial count");
  return o;
}

Outcome crashReplayCheck() {
  Outcome o;
  std::size_t runs = 0;
  for (const auto& path : scenarioFiles()) {
    testing::TempPath log("acc-replay");
    const auto r = runScenario(corpusModel(), loadScenario(path), log.str());
    const Platform p = replay(log.str());
    o.require(p.stateHash() == r.stateHash, "hash mismatch for " + path);
    ++runs;
  }
  o.require(runs > 0, "no scenarios found");
  return o;
}

Outcome qualityControlCheck() {
  Outcome o;
  const ScenarioConfig c = loadScenario(testing::dataPath("scenarios/quality_control.json"));
  o.require(c.adversaries.size() == 1 && c.adversaries[0].diligence == 0.1, "scenario lacks the adversary");
  if (!o.ok) return o;
  const WorkerId bad = c.adversaries[0].workerId;
  testing::TempPath log("acc-qc");
  const auto r = runScenario(corpusModel(), c, log.str());
  const Platform p = replay(log.str());
  const auto& q = p.board().quality(bad);
  o.require(q.rejected, "adversary not rejected");
  o.require(q.accuracy() < 0.7, "adversary gold accuracy " + std::to_string(q.accuracy()));
  std::size_t touched = 0;
  for (const auto& [id, t] : p.trials()) {
    if (t.claim != ClaimState::ClaimedWin) continue;
    const auto js = p.board().judgmentsFor(id);
    if (std::none_of(js.begin(), js.end(), [&](const Judgment& j) { return j.workerId == bad; })) continue;
    ++touched;
    const auto res = p.board().result(id);
    o.require(res.has_value(), "affected sample " + std::to_string(id) + " unresolved");
    o.require(p.board().acceptedCount(id) == 5, "affected sample " + std::to_string(id) + " below quorum");
  }
  o.require(touched > 0, "adversary judged nothing");
  o.require(r.unresolved == 0, "unresolved claims remain");
  return o;
}

}  // namespace

int main() {
  check("severity", 1, severityCheck);
  check("majority-vote-oracle", 1, majorityCheck);
  check("explainer-oracle", 30, explainerOracleCheck);
  check("explainer-sign", 5, excellentCheck);
  check("bookkeeping-replay", 1, bookkeepingCheck);
  check("category-counts", 1, categoryCheck);
  check("trial-time-cap", 0, tcapCheck);
  check("end-to-end-determinism", 60, determinismCheck);
  check("crash-replay", 0, crashReplayCheck);
  check("quality-control", 0, qualityControlCheck);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
