// Operator CLI. Talks to the core exclusively through the C API.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "proact/proact.h"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kDataError = 3;
constexpr int kModelMissing = 4;

struct Failure {
  int exitCode;
  std::string message;
};

void check(proact_status s, const std::string& what) {
  if (s == PROACT_OK) return;
  const int code = s == PROACT_E_MODEL_MISSING ? kModelMissing : s == PROACT_E_INVALID_ARGUMENT ? kUsage : kDataError;
  throw Failure{code, what + ": " + proact_status_name(s) + ": " + proact_last_error()};
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { proact_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct ModelDeleter {
  void operator()(proact_model* m) const { proact_model_free(m); }
};
struct ServiceDeleter {
  void operator()(proact_service* s) const { proact_service_free(s); }
};
using Model = std::unique_ptr<proact_model, ModelDeleter>;
using Service = std::unique_ptr<proact_service, ServiceDeleter>;

Model loadModel(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Failure{kModelMissing, "model file not found: " + path};
  proact_model* m = nullptr;
  const proact_status s = proact_model_load(path.c_str(), &m);
  if (s == PROACT_E_IO) throw Failure{kModelMissing, std::string("cannot read model: ") + proact_last_error()};
  check(s, "loading model " + path);
  return Model(m);
}

std::string readText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kDataError, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeOut(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content)) throw Failure{kDataError, "cannot write " + path};
}

Service openService(const proact_model* model, const std::string& configPath, const std::string& log) {
  std::string config;
  if (!configPath.empty()) config = readText(configPath);
  proact_service* s = nullptr;
  check(proact_service_open(model, config.empty() ? nullptr : config.c_str(), log.c_str(), &s), "opening " + log);
  return Service(s);
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Background color from "#rrggbb", with black text for readability.
std::string ansiBackground(const std::string& color, const std::string& text) {
  if (color.size() != 7 || color[0] != '#') return text;
  const int r = std::stoi(color.substr(1, 2), nullptr, 16);
  const int g = std::stoi(color.substr(3, 2), nullptr, 16);
  const int b = std::stoi(color.substr(5, 2), nullptr, 16);
  return "\x1b[48;2;" + std::to_string(r) + ";" + std::to_string(g) + ";" + std::to_string(b) + "m\x1b[30m" + text +
         "\x1b[0m";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proactive model-testing platform"};
  app.require_subcommand(1);

  std::string corpus, modelPath, out, log, config, input, scenario, format = "csv", text, host = "127.0.0.1";
  std::string exportPath, reportPath;
  double alpha = 1.0;
  int port = 8080;
  std::size_t n = 200;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> seedOverride;
  bool allowPending = false, noColor = false, asJson = false;

  auto* train = app.add_subcommand("train", "Train the stand-in classifier from a text,label CSV");
  train->add_option("--corpus", corpus, "Labeled CSV (text,label)")->required();
  train->add_option("--out", out, "Model file to write")->required();
  train->add_option("--alpha", alpha, "Additive smoothing")->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API over an event log");
  serve->add_option("--model", modelPath, "Model file")->required();
  serve->add_option("--log", log, "Event log")->required();
  serve->add_option("--config", config, "Platform configuration JSON (new logs only)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));

  auto* import = app.add_subcommand("import-benchmark", "Store the model's mistakes on a labeled CSV");
  import->add_option("--model", modelPath, "Model file")->required();
  import->add_option("--input", input, "Labeled CSV (text,label)")->required();
  import->add_option("--log", log, "Event log")->required();
  import->add_option("--config", config, "Platform configuration JSON (new logs only)");
  import->add_option("--csv", out, "Also write the stored rows as Text,Human_Label,AI_Label,Category");

  auto* sample = app.add_subcommand("sample-misclassified", "Uniformly sample stored mistakes");
  sample->add_option("--log", log, "Event log")->required();
  sample->add_option("--n", n, "Sample size")->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "Sampling seed");
  sample->add_option("--out", out, "CSV output (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Run a simulated crowd scenario");
  simulate->add_option("--model", modelPath, "Model file")->required();
  simulate->add_option("--scenario", scenario, "Scenario JSON (defaults when omitted)");
  simulate->add_option("--seed", seedOverride, "Override the scenario seed");
  simulate->add_option("--log", log, "Event log to create");
  simulate->add_option("--export", exportPath, "Write the four-column CSV export here");
  simulate->add_option("--report", reportPath, "Write the JSON report here (default stdout)");

  auto* exp = app.add_subcommand("export", "Export the adjudicated run");
  exp->add_option("--log", log, "Event log")->required();
  exp->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  exp->add_option("--out", out, "Output file (default stdout)");
  exp->add_flag("--allow-pending", allowPending, "JSON: skip claims still awaiting quorum");
  exp->add_option("--model", modelPath, "JSON: model for explaining rows without a stored explanation");

  auto* explainOne = app.add_subcommand("explain-one", "Explain one prediction");
  explainOne->add_option("--model", modelPath, "Model file")->required();
  explainOne->add_option("--text", text, "Sentence to explain")->required();
  explainOne->add_option("--config", config, "Platform configuration JSON");
  explainOne->add_flag("--no-color", noColor, "Plain text output");
  explainOne->add_flag("--json", asJson, "Print the explanation JSON");

  auto* replayCmd = app.add_subcommand("replay", "Replay an event log and print its state hash");
  replayCmd->add_option("--log", log, "Event log")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*train) {
      proact_model* m = nullptr;
      check(proact_model_train_csv(corpus.c_str(), alpha, &m), "training on " + corpus);
      Model model(m);
      check(proact_model_save(model.get(), out.c_str()), "saving " + out);
      std::cerr << "wrote " << out << "\n";
    } else if (*serve) {
      Model model = loadModel(modelPath);
      Service svc = openService(model.get(), config, log);
      std::cerr << "listening on " << host << ":" << port << "\n";
      check(proact_service_serve(svc.get(), host.c_str(), port), "serving");
    } else if (*import) {
      Model model = loadModel(modelPath);
      Service svc = openService(model.get(), config, log);
      OwnedString report, csv;
      check(proact_service_import_benchmark(svc.get(), input.c_str(), &report.p, out.empty() ? nullptr : &csv.p),
            "importing " + input);
      if (!out.empty()) writeOut(out, csv.str());
      std::cout << report.str() << "\n";
    } else if (*sample) {
      Service svc = openService(nullptr, {}, log);
      OwnedString csv;
      std::size_t count = 0, pool = 0;
      check(proact_service_sample_misclassified(svc.get(), n, seed, &count, &pool, &csv.p), "sampling");
      if (count < n) {
        std::cerr << "warning: requested " << n << " samples but only " << pool << " misclassified samples are stored\n";
      }
      writeOut(out, csv.str());
    } else if (*simulate) {
      Model model = loadModel(modelPath);
      nlohmann::json sc = nlohmann::json::object();
      if (!scenario.empty()) {
        try {
          sc = nlohmann::json::parse(readText(scenario));
        } catch (const nlohmann::json::exception& e) {
          throw Failure{kDataError, scenario + ": " + e.what()};
        }
      }
      if (seedOverride) sc["seed"] = *seedOverride;
      if (!log.empty() && std::filesystem::exists(log) && std::filesystem::file_size(log) > 0) {
        throw Failure{kDataError, "refusing to simulate into existing log " + log};
      }
      OwnedString report, csv;
      const std::string scText = sc.dump();
      check(proact_simulate(model.get(), scText.c_str(), log.c_str(), &report.p, &csv.p), "simulating");
      if (!exportPath.empty()) writeOut(exportPath, csv.str());
      writeOut(reportPath, report.str() + "\n");
    } else if (*exp) {
      Model model;
      if (!modelPath.empty()) model = loadModel(modelPath);
      Service svc = openService(model.get(), {}, log);
      OwnedString body;
      if (format == "json") {
        check(proact_service_summary_json(svc.get(), allowPending ? 1 : 0, &body.p), "summarizing");
        writeOut(out, body.str() + "\n");
      } else {
        check(proact_service_export_csv(svc.get(), &body.p), "exporting");
        writeOut(out, body.str());
      }
    } else if (*explainOne) {
      Model model = loadModel(modelPath);
      std::string cfg;
      if (!config.empty()) cfg = readText(config);
      OwnedString ex;
      check(proact_model_explain(model.get(), text.c_str(), cfg.empty() ? nullptr : cfg.c_str(), &ex.p), "explaining");
      if (asJson) {
        std::cout << ex.str() << "\n";
      } else {
        const auto j = nlohmann::json::parse(ex.str());
        const std::string original = j["text"];
        std::string line;
        std::size_t at = 0;
        for (const auto& t : j["tokens"]) {
          const std::size_t b = t["start"], e = t["end"];
          line += original.substr(at, b - at);
          const std::string word = original.substr(b, e - b);
          line += noColor ? "[" + word + "]" : ansiBackground(t["color"], word);
          at = e;
        }
        line += original.substr(at);
        const auto& p = j["prediction"];
        std::cout << line << "\n";
        std::printf("prediction: %s (%.3f)  fidelity: %.3f\n", p["label"].get<std::string>().c_str(),
                    p["confidence"].get<double>(), j["fidelity"].get<double>());
        for (const auto& t : j["tokens"]) {
          std::printf("  %-16s %-9s %+.4f  %s\n", t["text"].get<std::string>().c_str(),
                      t["class"].get<std::string>().c_str(), t["weight"].get<double>(),
                      t["bucket"].get<std::string>().c_str());
        }
      }
    } else if (*replayCmd) {
      if (!std::filesystem::exists(log)) throw Failure{kDataError, "no such log " + log};
      std::uint64_t hash = 0, events = 0;
      check(proact_replay(log.c_str(), &hash, &events), "replaying " + log);
      std::cout << nlohmann::json{{"hash", hex(hash)}, {"events", events}}.dump() << "\n";
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exitCode;
  }
  return kOk;
}
