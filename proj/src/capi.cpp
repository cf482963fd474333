#include "proact/proact.h"

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <string>

#include "proact/benchmark.hpp"
#include "proact/crowdsim.hpp"
#include "proact/explainer.hpp"
#include "proact/service.hpp"
#include "proact/store.hpp"

struct proact_model {
  std::shared_ptr<const proact::NaiveBayesModel> model;
};

struct proact_service {
  std::unique_ptr<proact::Service> service;
};

namespace {

using proact::ErrorCode;
using json = nlohmann::json;

thread_local std::string lastError;

static_assert(static_cast<int>(ErrorCode::TooShort) + 1 == PROACT_E_TOO_SHORT);
static_assert(static_cast<int>(ErrorCode::Parse) + 1 == PROACT_E_PARSE);

proact_status statusOf(ErrorCode code) {
  return static_cast<proact_status>(static_cast<int>(code) + 1);
}

template <typename F>
proact_status guard(F&& f) {
  try {
    lastError.clear();
    f();
    return PROACT_OK;
  } catch (const proact::Error& e) {
    lastError = e.what();
    return statusOf(e.code());
  } catch (const json::exception& e) {
    lastError = e.what();
    return PROACT_E_PARSE;
  } catch (const std::bad_alloc&) {
    lastError = "out of memory";
    return PROACT_E_INTERNAL;
  } catch (const std::exception& e) {
    lastError = e.what();
    return PROACT_E_INTERNAL;
  } catch (...) {
    lastError = "unknown failure";
    return PROACT_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw proact::Error(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

proact::PlatformConfig configOf(const char* config_json) {
  if (!config_json || !*config_json) return {};
  return proact::configFromJson(json::parse(config_json));
}

int hexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string percentDecode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && hexValue(s[i + 1]) >= 0 && hexValue(s[i + 2]) >= 0) {
      out += static_cast<char>(hexValue(s[i + 1]) * 16 + hexValue(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::map<std::string, std::string> parseQuery(const char* query) {
  std::map<std::string, std::string> out;
  if (!query) return out;
  std::string_view q(query);
  if (!q.empty() && q.front() == '?') q.remove_prefix(1);
  while (!q.empty()) {
    const auto amp = q.find('&');
    const std::string_view pair = q.substr(0, amp);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      out[percentDecode(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : percentDecode(pair.substr(eq + 1));
    }
    if (amp == std::string_view::npos) break;
    q.remove_prefix(amp + 1);
  }
  return out;
}

}  // namespace

extern "C" {

const char* proact_last_error(void) { return lastError.c_str(); }

const char* proact_status_name(proact_status status) {
  if (status == PROACT_OK) return "OK";
  if (status == PROACT_E_INTERNAL) return "INTERNAL";
  const int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(ErrorCode::Parse)) return "UNKNOWN";
  // codeName returns views of string literals, so data() is NUL-terminated.
  return proact::codeName(static_cast<ErrorCode>(code)).data();
}

void proact_string_free(char* s) { std::free(s); }

proact_status proact_model_train_csv(const char* corpus_path, double alpha, proact_model** out) {
  return guard([&] {
    require(corpus_path, "corpus_path");
    require(out, "out");
    auto m = proact::NaiveBayesModel::train(proact::readLabeledCsv(corpus_path), alpha > 0.0 ? alpha : 1.0);
    *out = new proact_model{std::make_shared<const proact::NaiveBayesModel>(std::move(m))};
  });
}

proact_status proact_model_load(const char* path, proact_model** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new proact_model{std::make_shared<const proact::NaiveBayesModel>(proact::NaiveBayesModel::load(path))};
  });
}

proact_status proact_model_save(const proact_model* model, const char* path) {
  return guard([&] {
    require(model, "model");
    require(path, "path");
    model->model->save(path);
  });
}

void proact_model_free(proact_model* model) { delete model; }

proact_status proact_model_predict(const proact_model* model, const char* text, char** out_json) {
  return guard([&] {
    require(model, "model");
    require(text, "text");
    require(out_json, "out_json");
    *out_json = dup(proact::predictionToJson(model->model->predict(text)).dump());
  });
}

proact_status proact_model_explain(const proact_model* model, const char* text, const char* config_json,
                                   char** out_json) {
  return guard([&] {
    require(model, "model");
    require(text, "text");
    require(out_json, "out_json");
    const auto cfg = configOf(config_json);
    const auto e = proact::explain(*model->model, text, cfg.explain);
    *out_json = dup(proact::explanationToJson(e, cfg.buckets).dump());
  });
}

proact_status proact_service_open(const proact_model* model, const char* config_json, const char* log_path,
                                  proact_service** out) {
  return guard([&] {
    require(out, "out");
    std::shared_ptr<const proact::Classifier> m;
    if (model) m = model->model;
    auto svc = std::make_unique<proact::Service>(std::move(m), configOf(config_json), log_path ? log_path : "");
    *out = new proact_service{std::move(svc)};
  });
}

void proact_service_free(proact_service* service) { delete service; }

proact_status proact_service_request(proact_service* service, const char* method, const char* path,
                                     const char* query, const char* headers_json, const char* body,
                                     int* out_status, char** out_content_type, char** out_body) {
  return guard([&] {
    require(service, "service");
    require(method, "method");
    require(path, "path");
    require(out_status, "out_status");
    proact::Request req;
    req.method = method;
    req.path = path;
    req.query = parseQuery(query);
    if (headers_json && *headers_json) {
      const json headers = json::parse(headers_json);
      if (!headers.is_object()) throw proact::Error(ErrorCode::InvalidArgument, "headers_json must be an object");
      for (const auto& [k, v] : headers.items()) {
        std::string name = k;
        for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        req.headers[name] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    req.body = body ? body : "";
    const proact::Response r = service->service->handle(req);
    *out_status = r.status;
    put(out_content_type, r.contentType);
    put(out_body, r.body);
  });
}

proact_status proact_service_serve(proact_service* service, const char* host, int port) {
  return guard([&] {
    require(service, "service");
    require(host, "host");
    if (port < 0 || port > 65535) throw proact::Error(ErrorCode::InvalidArgument, "port out of range");
    proact::serveHttp(*service->service, host, port);
  });
}

proact_status proact_service_state_hash(proact_service* service, uint64_t* out_hash) {
  return guard([&] {
    require(service, "service");
    require(out_hash, "out_hash");
    *out_hash = service->service->stateHash();
  });
}

proact_status proact_service_export_csv(proact_service* service, char** out_csv) {
  return guard([&] {
    require(service, "service");
    require(out_csv, "out_csv");
    *out_csv = dup(service->service->exportCsv());
  });
}

proact_status proact_service_summary_json(proact_service* service, int allow_pending, char** out_json) {
  return guard([&] {
    require(service, "service");
    require(out_json, "out_json");
    *out_json = dup(proact::toJson(service->service->summary(allow_pending != 0)).dump());
  });
}

proact_status proact_service_import_benchmark(proact_service* service, const char* csv_path, char** out_json,
                                              char** out_csv) {
  return guard([&] {
    require(service, "service");
    require(csv_path, "csv_path");
    auto& svc = *service->service;
    const auto result = proact::importBenchmark(svc, proact::readLabeledCsv(csv_path));
    const json report = {{"total", result.total}, {"misclassified", result.misclassified},
                         {"stored", result.stored.size()}};
    std::string csv;
    if (out_csv) csv = svc.read([&](const proact::Platform& p) { return proact::seedsCsv(p, result.stored); });
    put(out_json, report.dump());
    put(out_csv, csv);
  });
}

proact_status proact_service_sample_misclassified(proact_service* service, size_t n, uint64_t seed,
                                                  size_t* out_count, size_t* out_pool, char** out_csv) {
  return guard([&] {
    require(service, "service");
    const auto csv = service->service->read([&](const proact::Platform& p) {
      const auto pool = proact::misclassifiedSeeds(p);
      const auto picked = proact::sampleWithoutReplacement(pool, n, seed);
      if (out_count) *out_count = picked.size();
      if (out_pool) *out_pool = pool.size();
      return proact::seedsCsv(p, picked);
    });
    put(out_csv, csv);
  });
}

proact_status proact_simulate(const proact_model* model, const char* scenario_json, const char* log_path,
                              char** out_report_json, char** out_csv) {
  return guard([&] {
    require(model, "model");
    proact::ScenarioConfig cfg;
    if (scenario_json && *scenario_json) cfg = proact::scenarioFromJson(json::parse(scenario_json));
    const auto report = proact::runScenario(model->model, cfg, log_path ? log_path : "");
    put(out_report_json, proact::toJson(report).dump());
    put(out_csv, report.exportCsv);
  });
}

proact_status proact_replay(const char* log_path, uint64_t* out_hash, uint64_t* out_events) {
  return guard([&] {
    require(log_path, "log_path");
    const auto contents = proact::readLog(log_path);
    const proact::Platform p = proact::replay(contents);
    if (out_hash) *out_hash = p.stateHash();
    if (out_events) *out_events = p.eventCount();
  });
}

}  // extern "C"
