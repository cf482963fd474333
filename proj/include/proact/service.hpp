#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "proact/pipeline.hpp"
#include "proact/store.hpp"

namespace proact {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;
};

struct Response {
  int status = 200;
  std::string contentType = "application/json";
  std::string body;
};

int httpStatus(ErrorCode code);

/// The platform behind a mutex, backed by an event log. Every mutation is
/// validated, appended to the log, then applied.
class Service {
 public:
  using Clock = std::function<Millis()>;

  /// Opens (or creates) the log at `logPath`; an empty path keeps events in
  /// memory. An existing log's configuration takes precedence over `config`.
  Service(std::shared_ptr<const Classifier> model, PlatformConfig config = {}, const std::string& logPath = {},
          Clock clock = {});

  void setClock(Clock clock);
  void setModel(std::shared_ptr<const Classifier> model);
  /// The current model; throws ModelMissing when none is loaded.
  std::shared_ptr<const Classifier> sharedModel() const;

  Category createCategory(const std::string& name, const std::string& description, const std::string& createdBy);
  SeedSample importSeed(const std::string& text, SentimentLabel humanLabel, std::optional<CategoryId> category);
  SampleId addGold(const std::string& text, bool expectedSensible, std::optional<SentimentLabel> expectedSentiment);
  Session openSession(const WorkerId& worker, CategoryId target, std::optional<PromptCondition> condition = {});
  Trial submitTrial(SessionId session, const std::string& text);
  Trial claim(SampleId trial, ClaimState claim, std::optional<SentimentLabel> asserted = {});
  Assignment assignTasks(const WorkerId& worker);
  nlohmann::json recordJudgment(const Judgment& judgment);

  AnalysisSummary summary(bool allowPending = true);
  std::vector<TableRow> table(const TableFilter& filter);
  std::string exportCsv();
  std::uint64_t stateHash();

  /// Runs `f` on the platform under the lock.
  template <typename F>
  auto read(F&& f) const {
    std::lock_guard lock(mutex_);
    return f(platform_);
  }

  /// Routes one HTTP request. Mutations carrying an Idempotency-Key header are
  /// answered from the log when retried with the same request, and rejected
  /// with 409 when the key is reused for a different one.
  Response handle(const Request& request);

  const std::string& logPath() const { return log_.path(); }

 private:
  nlohmann::json commit(Event event);
  Millis now();
  const Classifier& model() const;
  ExplanationProvider explanations();
  Response route(const Request& request);

  mutable std::recursive_mutex mutex_;
  std::shared_ptr<const Classifier> model_;
  Clock clock_;
  EventLog log_;
  Platform platform_;
  std::map<SampleId, Explanation> explanationCache_;
};

/// Blocks serving `service` over HTTP until the process is stopped.
void serveHttp(Service& service, const std::string& host, int port);

}  // namespace proact
