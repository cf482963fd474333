#include "proact/service.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

namespace proact {

using nlohmann::json;

int httpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::NothingToJudge:
      return 404;
    case ErrorCode::DuplicateJudgment:
    case ErrorCode::IdempotencyConflict:
    case ErrorCode::DuplicateCategory:
    case ErrorCode::AlreadyResolved:
    case ErrorCode::SessionClosed:
    case ErrorCode::UnknownAssignment:
    case ErrorCode::AdjudicationPending:
    case ErrorCode::AdjudicationIncomplete:
    case ErrorCode::NoSeedErrorsAvailable:
      return 409;
    case ErrorCode::ModelMissing:
      return 503;
    case ErrorCode::Io:
    case ErrorCode::CorruptLog:
      return 500;
    default:
      return 400;
  }
}

namespace {

Millis systemMillis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Response jsonResponse(int status, const json& body) { return {status, "application/json", body.dump()}; }

Response errorResponse(ErrorCode code, const std::string& message) {
  return jsonResponse(httpStatus(code), {{"error", {{"code", codeName(code)}, {"message", message}}}});
}

std::vector<std::string> splitPath(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

std::uint64_t parseId(const std::string& s, const char* what) {
  std::uint64_t v = 0;
  if (s.empty() || s.size() > 19) throw Error(ErrorCode::NotFound, std::string("bad ") + what + " id '" + s + "'");
  for (char c : s) {
    if (c < '0' || c > '9') throw Error(ErrorCode::NotFound, std::string("bad ") + what + " id '" + s + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

json parseBody(const Request& r) {
  if (r.body.empty()) return json::object();
  try {
    json j = json::parse(r.body);
    if (!j.is_object()) throw Error(ErrorCode::Parse, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed JSON body: ") + e.what());
  }
}

std::string stringField(const json& j, const char* key, bool required = true) {
  if (!j.contains(key) || j[key].is_null()) {
    if (required) throw Error(ErrorCode::InvalidArgument, std::string("missing field '") + key + "'");
    return {};
  }
  if (!j[key].is_string()) throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

std::string workerOf(const Request& r, const json& body) {
  std::string w = stringField(body, "worker", false);
  if (w.empty()) {
    if (auto it = r.query.find("worker"); it != r.query.end()) w = it->second;
  }
  if (w.empty()) {
    if (auto it = r.headers.find("x-worker-id"); it != r.headers.end()) w = it->second;
  }
  if (w.empty()) throw Error(ErrorCode::InvalidArgument, "worker id required (body 'worker' or X-Worker-Id header)");
  return w;
}

SentimentLabel labelField(const json& v) {
  if (!v.is_string()) throw Error(ErrorCode::InvalidArgument, "sentiment must be a string");
  const auto l = parseLabel(v.get<std::string>());
  if (!l) throw Error(ErrorCode::InvalidArgument, "unknown sentiment '" + v.get<std::string>() + "'");
  return *l;
}

std::string fingerprint(const Request& r) {
  std::string s = r.method + " " + r.path + "?";
  for (const auto& [k, v] : r.query) s += k + "=" + v + "&";
  if (auto it = r.headers.find("x-worker-id"); it != r.headers.end()) s += "\nworker=" + it->second;
  s += "\n" + r.body;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

}  // namespace

Service::Service(std::shared_ptr<const Classifier> model, PlatformConfig config, const std::string& logPath,
                 Clock clock)
    : model_(std::move(model)),
      clock_(clock ? std::move(clock) : Clock(systemMillis)),
      log_(logPath, config),
      platform_(replay(LogContents{log_.config(), true, log_.events()})) {}

void Service::setClock(Clock clock) {
  std::lock_guard lock(mutex_);
  clock_ = clock ? std::move(clock) : Clock(systemMillis);
}

void Service::setModel(std::shared_ptr<const Classifier> model) {
  std::lock_guard lock(mutex_);
  model_ = std::move(model);
  explanationCache_.clear();
}

std::shared_ptr<const Classifier> Service::sharedModel() const {
  std::lock_guard lock(mutex_);
  if (!model_) throw Error(ErrorCode::ModelMissing, "no model loaded");
  return model_;
}

Millis Service::now() { return clock_(); }

const Classifier& Service::model() const {
  if (!model_) throw Error(ErrorCode::ModelMissing, "no model loaded");
  return *model_;
}

json Service::commit(Event event) {
  log_.append(event);
  return platform_.apply(event);
}

Category Service::createCategory(const std::string& name, const std::string& description,
                                 const std::string& createdBy) {
  std::lock_guard lock(mutex_);
  const json effect = commit(platform_.prepareCreateCategory(name, description, createdBy, now()));
  return platform_.categories().at(effect.at("id").get<CategoryId>());
}

SeedSample Service::importSeed(const std::string& text, SentimentLabel humanLabel, std::optional<CategoryId> category) {
  std::lock_guard lock(mutex_);
  const Prediction p = model().predict(text);
  const json effect = commit(platform_.prepareImportSeed(text, humanLabel, p, category, now()));
  return platform_.seeds().at(effect.at("id").get<SampleId>());
}

SampleId Service::addGold(const std::string& text, bool expectedSensible,
                          std::optional<SentimentLabel> expectedSentiment) {
  std::lock_guard lock(mutex_);
  return commit(platform_.prepareAddGold(text, expectedSensible, expectedSentiment, now())).at("id").get<SampleId>();
}

Session Service::openSession(const WorkerId& worker, CategoryId target, std::optional<PromptCondition> condition) {
  std::lock_guard lock(mutex_);
  const PromptCondition c = condition.value_or(platform_.config().defaultCondition);
  const json effect = commit(platform_.prepareOpenSession(worker, target, c, now()));
  return platform_.session(effect.at("id").get<SessionId>());
}

Trial Service::submitTrial(SessionId session, const std::string& text) {
  std::lock_guard lock(mutex_);
  const json effect = commit(platform_.prepareSubmitTrial(session, text, model(), now()));
  return platform_.trial(effect.at("id").get<SampleId>());
}

Trial Service::claim(SampleId trial, ClaimState claim, std::optional<SentimentLabel> asserted) {
  std::lock_guard lock(mutex_);
  commit(platform_.prepareClaim(trial, claim, asserted, now()));
  return platform_.trial(trial);
}

Assignment Service::assignTasks(const WorkerId& worker) {
  std::lock_guard lock(mutex_);
  return assignmentFromJson(commit(platform_.prepareAssignTasks(worker, now())));
}

json Service::recordJudgment(const Judgment& judgment) {
  std::lock_guard lock(mutex_);
  return commit(platform_.prepareJudgment(judgment, now()));
}

ExplanationProvider Service::explanations() {
  return [this](const Trial& t) -> Explanation {
    if (t.explanation) return *t.explanation;
    if (auto it = explanationCache_.find(t.id); it != explanationCache_.end()) return it->second;
    Explanation ex = explain(model(), t.text, platform_.config().explain);
    explanationCache_.emplace(t.id, ex);
    return ex;
  };
}

AnalysisSummary Service::summary(bool allowPending) {
  std::lock_guard lock(mutex_);
  return summarize(platform_.runData(), platform_.config().analytics, explanations(), allowPending);
}

std::vector<TableRow> Service::table(const TableFilter& filter) { return filterRows(summary(true).rows, filter); }

std::string Service::exportCsv() {
  std::lock_guard lock(mutex_);
  return proact::exportCsv(platform_.runData());
}

std::uint64_t Service::stateHash() {
  std::lock_guard lock(mutex_);
  return platform_.stateHash();
}

Response Service::handle(const Request& request) {
  std::lock_guard lock(mutex_);
  const bool mutating = request.method == "POST" || (request.method == "GET" && request.path == "/validation/tasks");
  std::string key;
  if (auto it = request.headers.find("idempotency-key"); it != request.headers.end()) key = it->second;
  if (!mutating || key.empty()) return route(request);

  const std::string fp = fingerprint(request);
  if (const StoredResponse* stored = platform_.storedResponse(key)) {
    if (stored->fingerprint != fp) {
      return errorResponse(ErrorCode::IdempotencyConflict, "Idempotency-Key reused for a different request");
    }
    Response r;
    r.status = stored->status;
    r.body = stored->body;
    if (r.body.rfind("Text,", 0) == 0) r.contentType = "text/csv";
    return r;
  }
  Response r = route(request);
  if (r.status < 300) {
    try {
      commit(platform_.prepareStoreResponse(key, {fp, r.status, r.body}, now()));
    } catch (const Error& e) {
      return errorResponse(e.code(), e.what());
    }
  }
  return r;
}

Response Service::route(const Request& req) {
  try {
    const auto parts = splitPath(req.path);
    const std::string& m = req.method;
    const std::size_t n = parts.size();
    const BucketThresholds& buckets = platform_.config().buckets;

    auto categoryArg = [&](const json& v) -> CategoryId {
      if (v.is_number_unsigned()) return v.get<CategoryId>();
      if (v.is_string()) {
        if (auto id = platform_.findCategory(v.get<std::string>())) return *id;
        throw Error(ErrorCode::NotFound, "unknown category '" + v.get<std::string>() + "'");
      }
      throw Error(ErrorCode::InvalidArgument, "category must be an id or a name");
    };

    if (n == 1 && parts[0] == "health" && m == "GET") return jsonResponse(200, {{"status", "ok"}});

    if (n == 1 && parts[0] == "sessions" && m == "POST") {
      const json body = parseBody(req);
      if (!body.contains("target_category")) throw Error(ErrorCode::InvalidArgument, "missing field 'target_category'");
      std::optional<PromptCondition> cond;
      if (body.contains("condition") && !body["condition"].is_null()) {
        const json& c = body["condition"];
        if (c.is_string()) {
          cond = parseCondition(c.get<std::string>());
          if (!cond) throw Error(ErrorCode::InvalidArgument, "unknown condition '" + c.get<std::string>() + "'");
        } else if (c.is_object()) {
          cond = PromptCondition{c.value("lime", false), c.value("sp", false)};
        } else {
          throw Error(ErrorCode::InvalidArgument, "condition must be a name or {lime, sp}");
        }
      }
      return jsonResponse(201, toJson(openSession(workerOf(req, body), categoryArg(body["target_category"]), cond)));
    }
    if (n == 2 && parts[0] == "sessions" && m == "GET") {
      return jsonResponse(200, toJson(platform_.session(parseId(parts[1], "session"))));
    }
    if (n == 3 && parts[0] == "sessions" && parts[2] == "trials" && m == "POST") {
      const json body = parseBody(req);
      const SessionId sid = parseId(parts[1], "session");
      platform_.session(sid);
      return jsonResponse(201, toJson(submitTrial(sid, stringField(body, "text")), buckets));
    }
    if (n == 2 && parts[0] == "trials" && m == "GET") {
      return jsonResponse(200, toJson(platform_.trial(parseId(parts[1], "trial")), buckets));
    }
    if (n == 3 && parts[0] == "trials" && parts[2] == "claim" && m == "POST") {
      const json body = parseBody(req);
      const SampleId tid = parseId(parts[1], "trial");
      const std::string c = stringField(body, "claim");
      ClaimState state;
      if (c == "win" || c == "claimed-win") {
        state = ClaimState::ClaimedWin;
      } else if (c == "continue" || c == "continued") {
        state = ClaimState::Continued;
      } else if (c == "give-up" || c == "given-up") {
        state = ClaimState::GivenUp;
      } else {
        throw Error(ErrorCode::InvalidArgument, "claim must be win, continue or give-up");
      }
      std::optional<SentimentLabel> asserted;
      if (body.contains("label") && !body["label"].is_null()) asserted = labelField(body["label"]);
      return jsonResponse(200, toJson(claim(tid, state, asserted), buckets));
    }
    if (n == 2 && parts[0] == "validation" && parts[1] == "tasks" && m == "GET") {
      const Assignment a = assignTasks(workerOf(req, json::object()));
      json items = json::array();
      for (const auto& it : a.items) {
        std::string text;
        if (it.gold) {
          text = platform_.board().goldQuestions().at(it.sampleId).text;
        } else {
          text = platform_.trial(it.sampleId).text;
        }
        items.push_back({{"sample_id", it.sampleId}, {"text", text}});
      }
      return jsonResponse(200, {{"worker", a.workerId}, {"at", a.at}, {"items", std::move(items)}});
    }
    if (n == 1 && parts[0] == "judgments" && m == "POST") {
      const json body = parseBody(req);
      Judgment j;
      if (!body.contains("sample_id") || !body["sample_id"].is_number_unsigned()) {
        throw Error(ErrorCode::InvalidArgument, "missing numeric field 'sample_id'");
      }
      j.sampleId = body["sample_id"].get<SampleId>();
      j.workerId = workerOf(req, body);
      if (!body.contains("sensible") || !body["sensible"].is_boolean()) {
        throw Error(ErrorCode::InvalidArgument, "missing boolean field 'sensible'");
      }
      j.isEnglishAndSensible = body["sensible"].get<bool>();
      if (body.contains("sentiment") && !body["sentiment"].is_null()) j.sentiment = labelField(body["sentiment"]);
      if (body.contains("category") && !body["category"].is_null()) j.category = categoryArg(body["category"]);
      return jsonResponse(201, recordJudgment(j));
    }
    if (n == 2 && parts[0] == "analysis" && parts[1] == "summary" && m == "GET") {
      return jsonResponse(200, toJson(summary(true)));
    }
    if (n == 2 && parts[0] == "analysis" && parts[1] == "table" && m == "GET") {
      TableFilter f;
      if (auto it = req.query.find("category"); it != req.query.end() && !it->second.empty()) {
        const bool numeric = it->second.find_first_not_of("0123456789") == std::string::npos;
        f.category = numeric ? parseId(it->second, "category") : categoryArg(json(it->second));
      }
      if (auto it = req.query.find("word"); it != req.query.end() && !it->second.empty()) f.word = it->second;
      if (auto it = req.query.find("search"); it != req.query.end() && !it->second.empty()) f.search = it->second;
      json rows = json::array();
      for (const auto& r : table(f)) rows.push_back(toJson(r));
      return jsonResponse(200, {{"rows", std::move(rows)}});
    }
    if (n == 1 && parts[0] == "categories" && m == "GET") {
      json out = json::array();
      for (const auto& [id, c] : platform_.categories()) {
        if (c.active) out.push_back(toJson(c));
      }
      return jsonResponse(200, out);
    }
    if (n == 1 && parts[0] == "categories" && m == "POST") {
      const json body = parseBody(req);
      std::string by = stringField(body, "created_by", false);
      if (by.empty()) {
        if (auto it = req.headers.find("x-worker-id"); it != req.headers.end()) by = it->second;
      }
      return jsonResponse(201, toJson(createCategory(stringField(body, "name"),
                                                     stringField(body, "description", false),
                                                     by.empty() ? "developer" : by)));
    }
    if (n == 1 && parts[0] == "gold" && m == "POST") {
      const json body = parseBody(req);
      const bool sensible = body.value("sensible", true);
      std::optional<SentimentLabel> s;
      if (body.contains("sentiment") && !body["sentiment"].is_null()) s = labelField(body["sentiment"]);
      return jsonResponse(201, {{"id", addGold(stringField(body, "text"), sensible, s)}});
    }
    if (n == 1 && parts[0] == "seeds" && m == "POST") {
      const json body = parseBody(req);
      if (!body.contains("label")) throw Error(ErrorCode::InvalidArgument, "missing field 'label'");
      std::optional<CategoryId> cat;
      if (body.contains("category") && !body["category"].is_null()) cat = categoryArg(body["category"]);
      return jsonResponse(201, toJson(importSeed(stringField(body, "text"), labelField(body["label"]), cat)));
    }
    if (n == 3 && parts[0] == "runs" && parts[2] == "export" && m == "POST") {
      if (parts[1] != "current") throw Error(ErrorCode::NotFound, "unknown run '" + parts[1] + "'");
      const auto fmt = req.query.find("format");
      if (fmt != req.query.end() && fmt->second == "json") return jsonResponse(200, toJson(summary(false)));
      return {200, "text/csv", exportCsv()};
    }
    if (n == 1 && parts[0] == "ledger" && m == "GET") {
      json entries = json::array();
      for (const auto& [id, e] : platform_.ledger()) entries.push_back(toJson(e));
      return jsonResponse(200, {{"entries", std::move(entries)}, {"total_micros", platform_.ledgerTotal().micros}});
    }
    if (n == 2 && parts[0] == "state" && parts[1] == "hash" && m == "GET") {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(platform_.stateHash()));
      return jsonResponse(200, {{"hash", buf}, {"events", platform_.eventCount()}});
    }
    return errorResponse(ErrorCode::NotFound, "no route for " + m + " " + req.path);
  } catch (const Error& e) {
    return errorResponse(e.code(), e.what());
  } catch (const std::exception& e) {
    return errorResponse(ErrorCode::InvalidArgument, e.what());
  }
}

}  // namespace proact
