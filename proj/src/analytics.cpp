#include "proact/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "proact/csv.hpp"

namespace proact {

std::string_view toString(SeverityBucket bucket) {
  switch (bucket) {
    case SeverityBucket::Low: return "low";
    case SeverityBucket::Middle: return "middle";
    case SeverityBucket::High: return "high";
  }
  return "low";
}

namespace {

bool inUnit(double x) { return x >= 0.0 && x <= 1.0; }

std::string asciiLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

SeverityScore severity(double confHuman, double confAI, const SeverityWeights& weights,
                       const SeverityThresholds& thresholds) {
  if (!(weights.human >= 0.0) || !(weights.ai >= 0.0) || std::abs(weights.human + weights.ai - 1.0) > 1e-9) {
    throw Error(ErrorCode::BadWeights, "severity weights must be non-negative and sum to 1");
  }
  if (!(thresholds.low < thresholds.high)) {
    throw Error(ErrorCode::BadThresholds, "severity thresholds must satisfy low < high");
  }
  if (!inUnit(confHuman) || !inUnit(confAI)) {
    throw Error(ErrorCode::InvalidArgument, "confidences must lie in [0, 1]");
  }
  SeverityScore s;
  s.confHuman = confHuman;
  s.confAI = confAI;
  s.severity = weights.human * confHuman + weights.ai * confAI;
  if (s.severity < thresholds.low) {
    s.bucket = SeverityBucket::Low;
  } else if (s.severity < thresholds.high) {
    s.bucket = SeverityBucket::Middle;
  } else {
    s.bucket = SeverityBucket::High;
  }
  return s;
}

double robustness(CategoryId category, const std::vector<AdjudicationResult>& results) {
  std::size_t valid = 0;
  std::size_t inCategory = 0;
  for (const auto& r : results) {
    if (r.status != AdjudicationStatus::ValidatedFailing) continue;
    ++valid;
    if (r.category == category) ++inCategory;
  }
  return valid == 0 ? 0.0 : static_cast<double>(inCategory) / static_cast<double>(valid);
}

std::vector<double> trialSeconds(const TrialTiming& timing) {
  std::vector<double> out;
  out.reserve(timing.trialTimes.size());
  Millis previous = timing.sessionStart;
  for (Millis t : timing.trialTimes) {
    const Millis gap = std::clamp<Millis>(t - previous, 0, kTrialTimeCapMillis);
    out.push_back(static_cast<double>(gap) / 1000.0);
    previous = t;
  }
  return out;
}

std::optional<WorkerStats> workerStats(const WorkerId& worker, const std::vector<TrialTiming>& sessions,
                                       std::size_t nValid) {
  WorkerStats s;
  s.worker = worker;
  double total = 0.0;
  for (const auto& session : sessions) {
    for (double sec : trialSeconds(session)) {
      total += sec;
      ++s.nTotal;
    }
  }
  if (s.nTotal == 0) return std::nullopt;
  if (nValid > s.nTotal) throw Error(ErrorCode::InvalidArgument, "worker " + worker + " has more valid than total");
  s.nValid = nValid;
  s.avgTimePerTrial = total / static_cast<double>(s.nTotal);
  s.successRate = static_cast<double>(nValid) / static_cast<double>(s.nTotal);
  return s;
}

double RunSummary::validatedFraction() const {
  return nTotalTrials == 0 ? 0.0 : static_cast<double>(nValidated) / static_cast<double>(nTotalTrials);
}

double RunSummary::meanSuccessRate() const {
  if (workers.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& w : workers) sum += w.successRate;
  return sum / static_cast<double>(workers.size());
}

bool matches(const TableRow& row, const TableFilter& filter) {
  if (filter.category && row.category != *filter.category) return false;
  if (filter.word) {
    const std::string w = asciiLower(*filter.word);
    if (std::find(row.sentimentWords.begin(), row.sentimentWords.end(), w) == row.sentimentWords.end()) return false;
  }
  if (filter.search && asciiLower(row.text).find(asciiLower(*filter.search)) == std::string::npos) return false;
  return true;
}

std::vector<TableRow> filterRows(const std::vector<TableRow>& rows, const TableFilter& filter) {
  std::vector<TableRow> out;
  std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
               [&](const TableRow& r) { return matches(r, filter); });
  return out;
}

namespace {

bool isValidatedFailing(const RunData& run, SampleId id) {
  const auto it = run.results.find(id);
  return it != run.results.end() && it->second.status == AdjudicationStatus::ValidatedFailing;
}

std::map<SessionId, const Session*> sessionIndex(const RunData& run) {
  std::map<SessionId, const Session*> idx;
  for (const auto& s : run.sessions) idx[s.id] = &s;
  return idx;
}

std::string categoryName(const RunData& run, CategoryId id) {
  for (const auto& c : run.categories) {
    if (c.id == id) return c.name;
  }
  return {};
}

}  // namespace

RunSummary runSummary(const RunData& run) {
  RunSummary out;
  const auto sessions = sessionIndex(run);
  std::set<WorkerId> workers;
  std::map<PromptCondition, std::set<WorkerId>> conditionWorkers;
  std::map<WorkerId, std::map<SessionId, TrialTiming>> timings;
  std::map<WorkerId, std::size_t> valid;

  for (const Trial& t : run.trials) {
    const auto s = sessions.find(t.session);
    if (s == sessions.end()) {
      throw Error(ErrorCode::InvalidArgument, "trial " + std::to_string(t.id) + " has no session");
    }
    const PromptCondition cond = s->second->condition;
    const bool ok = isValidatedFailing(run, t.id);
    ++out.nTotalTrials;
    out.nValidated += ok;
    auto& cc = out.byCondition[cond];
    ++cc.nTotal;
    cc.nValid += ok;
    workers.insert(t.worker);
    conditionWorkers[cond].insert(t.worker);
    auto& timing = timings[t.worker][t.session];
    timing.sessionStart = s->second->startedAt;
    timing.trialTimes.push_back(t.submittedAt);
    valid[t.worker] += ok;
  }
  out.workerCount = workers.size();
  for (auto& [cond, ws] : conditionWorkers) out.byCondition[cond].workers = ws.size();
  for (auto& [worker, bySession] : timings) {
    std::vector<TrialTiming> list;
    for (auto& [sid, timing] : bySession) {
      std::sort(timing.trialTimes.begin(), timing.trialTimes.end());
      list.push_back(timing);
    }
    if (auto ws = workerStats(worker, list, valid[worker])) out.workers.push_back(*ws);
  }
  return out;
}

AnalysisSummary summarize(const RunData& run, const AnalyticsConfig& config, const ExplanationProvider& explanations,
                          bool allowPending) {
  AnalysisSummary out;
  for (const Trial& t : run.trials) {
    if (t.claim == ClaimState::ClaimedWin && !run.results.count(t.id)) ++out.pendingClaims;
  }
  if (out.pendingClaims > 0 && !allowPending) {
    throw Error(ErrorCode::AdjudicationPending,
                std::to_string(out.pendingClaims) + " claimed trials are awaiting adjudication");
  }
  out.run = runSummary(run);

  std::vector<AdjudicationResult> results;
  for (const auto& [id, r] : run.results) results.push_back(r);

  std::map<CategoryId, std::size_t> catIndex;
  for (const Category& c : run.categories) {
    if (!c.active) continue;
    catIndex[c.id] = out.categories.size();
    CategorySummary cs;
    cs.id = c.id;
    cs.name = c.name;
    cs.robustness = robustness(c.id, results);
    out.categories.push_back(std::move(cs));
  }

  struct WordTally {
    std::size_t frequency = 0;
    std::array<std::size_t, 3> byClass{};
  };
  std::map<std::string, WordTally> words;

  for (const Trial& t : run.trials) {
    if (!isValidatedFailing(run, t.id)) continue;
    const AdjudicationResult& r = run.results.at(t.id);
    TableRow row;
    row.id = t.id;
    row.text = t.text;
    row.prediction = t.prediction;
    row.groundTruth = *r.groundTruth;
    row.category = r.category;
    row.categoryName = categoryName(run, r.category);
    row.severity = severity(r.confHuman, t.prediction.confidence, config.weights, config.thresholds);
    row.severity.sampleId = t.id;

    if (auto it = catIndex.find(r.category); it != catIndex.end()) {
      auto& cs = out.categories[it->second];
      switch (row.severity.bucket) {
        case SeverityBucket::Low: ++cs.low; break;
        case SeverityBucket::Middle: ++cs.middle; break;
        case SeverityBucket::High: ++cs.high; break;
      }
    }

    if (!explanations) {
      out.rows.push_back(std::move(row));
      continue;
    }
    const Explanation ex = explanations(t);
    double maxAbs = 0.0;
    for (const auto& a : ex.attributions) maxAbs = std::max(maxAbs, std::abs(a.weight));
    const auto buckets = bucketize(ex, config.buckets);
    std::set<std::string> seen;
    for (std::size_t j = 0; j < ex.text.tokens.size(); ++j) {
      const Token& tok = ex.text.tokens[j];
      TokenView v;
      v.text = tok.text;
      v.begin = tok.begin;
      v.end = tok.end;
      v.attribution = ex.attributions[j];
      v.bucket = buckets[j];
      v.sentimentWord = maxAbs > 0.0 && std::abs(v.attribution.weight) / maxAbs >= config.cloudThreshold;
      if (v.sentimentWord && seen.insert(tok.lower).second) {
        row.sentimentWords.push_back(tok.lower);
        auto& tally = words[tok.lower];
        ++tally.frequency;
        ++tally.byClass[labelIndex(v.attribution.label)];
      }
      row.tokens.push_back(std::move(v));
    }
    out.rows.push_back(std::move(row));
  }

  for (const auto& [word, tally] : words) {
    CloudEntry e;
    e.word = word;
    e.frequency = tally.frequency;
    e.dominantClass = static_cast<SentimentLabel>(
        std::max_element(tally.byClass.begin(), tally.byClass.end()) - tally.byClass.begin());
    out.cloud.push_back(std::move(e));
  }
  std::stable_sort(out.cloud.begin(), out.cloud.end(), [](const CloudEntry& a, const CloudEntry& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.word < b.word;
  });
  return out;
}

nlohmann::json toJson(const RunSummary& run) {
  nlohmann::json conditions = nlohmann::json::object();
  for (const auto& [cond, c] : run.byCondition) {
    conditions[conditionName(cond)] = {{"lime", cond.showExplanation},
                                       {"sp", cond.startingPoint},
                                       {"n_total", c.nTotal},
                                       {"n_valid", c.nValid},
                                       {"workers", c.workers}};
  }
  nlohmann::json workers = nlohmann::json::array();
  for (const auto& w : run.workers) {
    workers.push_back({{"worker", w.worker},
                       {"n_total", w.nTotal},
                       {"n_valid", w.nValid},
                       {"avg_time_per_trial", w.avgTimePerTrial},
                       {"success_rate", w.successRate}});
  }
  return {{"n_total", run.nTotalTrials},
          {"n_valid", run.nValidated},
          {"workers", run.workerCount},
          {"validated_fraction", run.validatedFraction()},
          {"mean_success_rate", run.meanSuccessRate()},
          {"by_condition", std::move(conditions)},
          {"worker_stats", std::move(workers)}};
}

nlohmann::json toJson(const TableRow& row) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& t : row.tokens) {
    tokens.push_back({{"text", t.text},
                      {"start", t.begin},
                      {"end", t.end},
                      {"class", toString(t.attribution.label)},
                      {"weight", t.attribution.weight},
                      {"bucket", toString(t.bucket)},
                      {"color", bucketColor(t.bucket)},
                      {"sentiment_word", t.sentimentWord}});
  }
  return {{"id", row.id},
          {"text", row.text},
          {"prediction", predictionToJson(row.prediction)},
          {"ground_truth", toString(row.groundTruth)},
          {"category_id", row.category},
          {"category", row.categoryName},
          {"severity", row.severity.severity},
          {"severity_bucket", toString(row.severity.bucket)},
          {"conf_human", row.severity.confHuman},
          {"conf_ai", row.severity.confAI},
          {"sentiment_words", row.sentimentWords},
          {"tokens", std::move(tokens)}};
}

nlohmann::json toJson(const AnalysisSummary& summary) {
  nlohmann::json statistic = nlohmann::json::array();
  for (const auto& c : summary.categories) {
    statistic.push_back({{"category_id", c.id},
                         {"name", c.name},
                         {"low", c.low},
                         {"middle", c.middle},
                         {"high", c.high},
                         {"total", c.total()},
                         {"robustness", c.robustness}});
  }
  nlohmann::json cloud = nlohmann::json::array();
  for (const auto& e : summary.cloud) {
    cloud.push_back({{"word", e.word}, {"frequency", e.frequency}, {"dominant_class", toString(e.dominantClass)}});
  }
  nlohmann::json table = nlohmann::json::array();
  for (const auto& r : summary.rows) table.push_back(toJson(r));
  return {{"run", toJson(summary.run)},
          {"statistic", std::move(statistic)},
          {"cloud", std::move(cloud)},
          {"table", std::move(table)},
          {"pending_claims", summary.pendingClaims}};
}

std::string exportCsv(const RunData& run) {
  std::string out = std::string(kExportHeader) + "\n";
  std::vector<const Trial*> trials;
  for (const Trial& t : run.trials) trials.push_back(&t);
  std::sort(trials.begin(), trials.end(), [](const Trial* a, const Trial* b) { return a->id < b->id; });
  for (const Trial* t : trials) {
    const auto it = run.results.find(t->id);
    if (it == run.results.end() || it->second.status == AdjudicationStatus::RejectedNonsense) continue;
    const auto& r = it->second;
    out += csv::formatRow({t->text, r.groundTruth ? std::string(toString(*r.groundTruth)) : std::string(),
                           std::string(toString(t->prediction.label)), categoryName(run, r.category)});
  }
  return out;
}

}  // namespace proact
