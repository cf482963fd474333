#include "proact/config.hpp"

#include <initializer_list>

#include "proact/csv.hpp"

namespace proact {

namespace {

using nlohmann::json;

void allowKeys(const json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "config " + std::string(where) + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (auto key : keys) known = known || key == k;
    if (!known) throw Error(ErrorCode::Parse, "unknown config key " + std::string(where) + "." + k);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void readMoney(const json& j, const char* key, Money& out) {
  if (j.contains(key)) out = Money::fromDollars(j.at(key).get<double>());
}

}  // namespace

PlatformConfig configFromJson(const json& j) {
  PlatformConfig c;
  try {
    allowKeys(j, "", {"payment", "min_words", "default_condition", "explain", "buckets", "validation", "severity",
                      "cloud_threshold", "seed"});
    if (j.contains("payment")) {
      const auto& p = j["payment"];
      allowKeys(p, "payment", {"base", "fail_bonus", "category_bonus"});
      readMoney(p, "base", c.payment.base);
      readMoney(p, "fail_bonus", c.payment.failBonus);
      readMoney(p, "category_bonus", c.payment.categoryBonus);
      if (c.payment.base.micros < 0 || c.payment.failBonus.micros < 0 || c.payment.categoryBonus.micros < 0) {
        throw Error(ErrorCode::InvalidArgument, "payment rates must be non-negative");
      }
    }
    read(j, "min_words", c.minWords);
    if (j.contains("default_condition")) {
      const auto& d = j["default_condition"];
      allowKeys(d, "default_condition", {"lime", "sp"});
      read(d, "lime", c.defaultCondition.showExplanation);
      read(d, "sp", c.defaultCondition.startingPoint);
    }
    if (j.contains("explain")) {
      const auto& e = j["explain"];
      allowKeys(e, "explain", {"sample_count", "kernel_width", "ridge_penalty", "seed"});
      read(e, "sample_count", c.explain.sampleCount);
      if (e.contains("kernel_width") && !e["kernel_width"].is_null()) {
        c.explain.kernelWidth = e["kernel_width"].get<double>();
      }
      read(e, "ridge_penalty", c.explain.ridgePenalty);
      read(e, "seed", c.explain.seed);
    }
    if (j.contains("buckets")) {
      const auto& b = j["buckets"];
      allowKeys(b, "buckets", {"weak", "strong"});
      read(b, "weak", c.buckets.weak);
      read(b, "strong", c.buckets.strong);
      if (!(c.buckets.weak > 0.0 && c.buckets.weak < c.buckets.strong)) {
        throw Error(ErrorCode::BadThresholds, "buckets need 0 < weak < strong");
      }
    }
    if (j.contains("validation")) {
      const auto& v = j["validation"];
      allowKeys(v, "validation", {"quorum", "gold_rate", "gold_min_answers", "gold_accuracy_threshold", "batch_size"});
      read(v, "quorum", c.validation.quorum);
      read(v, "gold_rate", c.validation.goldRate);
      read(v, "gold_min_answers", c.validation.goldMinAnswers);
      read(v, "gold_accuracy_threshold", c.validation.goldAccuracyThreshold);
      read(v, "batch_size", c.validation.batchSize);
      if (c.validation.quorum == 0 || c.validation.batchSize == 0 || c.validation.goldRate < 0.0 ||
          c.validation.goldRate > 1.0) {
        throw Error(ErrorCode::InvalidArgument, "validation settings out of range");
      }
    }
    if (j.contains("severity")) {
      const auto& s = j["severity"];
      allowKeys(s, "severity", {"w_human", "w_ai", "t_low", "t_high"});
      read(s, "w_human", c.analytics.weights.human);
      read(s, "w_ai", c.analytics.weights.ai);
      read(s, "t_low", c.analytics.thresholds.low);
      read(s, "t_high", c.analytics.thresholds.high);
      severity(0.0, 0.0, c.analytics.weights, c.analytics.thresholds);  // validates
    }
    read(j, "cloud_threshold", c.analytics.cloudThreshold);
    read(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("bad config: ") + e.what());
  }
  if (c.minWords == 0) throw Error(ErrorCode::InvalidArgument, "min_words must be positive");
  c.analytics.buckets = c.buckets;
  return c;
}

json toJson(const PlatformConfig& c) {
  return {{"payment",
           {{"base", c.payment.base.dollars()},
            {"fail_bonus", c.payment.failBonus.dollars()},
            {"category_bonus", c.payment.categoryBonus.dollars()}}},
          {"min_words", c.minWords},
          {"default_condition", {{"lime", c.defaultCondition.showExplanation}, {"sp", c.defaultCondition.startingPoint}}},
          {"explain",
           {{"sample_count", c.explain.sampleCount},
            {"kernel_width", c.explain.kernelWidth ? json(*c.explain.kernelWidth) : json(nullptr)},
            {"ridge_penalty", c.explain.ridgePenalty},
            {"seed", c.explain.seed}}},
          {"buckets", {{"weak", c.buckets.weak}, {"strong", c.buckets.strong}}},
          {"validation",
           {{"quorum", c.validation.quorum},
            {"gold_rate", c.validation.goldRate},
            {"gold_min_answers", c.validation.goldMinAnswers},
            {"gold_accuracy_threshold", c.validation.goldAccuracyThreshold},
            {"batch_size", c.validation.batchSize}}},
          {"severity",
           {{"w_human", c.analytics.weights.human},
            {"w_ai", c.analytics.weights.ai},
            {"t_low", c.analytics.thresholds.low},
            {"t_high", c.analytics.thresholds.high}}},
          {"cloud_threshold", c.analytics.cloudThreshold},
          {"seed", c.seed}};
}

PlatformConfig loadConfig(const std::string& path) {
  const std::string text = csv::readFile(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
  return configFromJson(j);
}

}  // namespace proact
