#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "proact/adjudication.hpp"
#include "proact/analytics.hpp"
#include "proact/explainer.hpp"
#include "proact/records.hpp"

namespace proact {

struct PaymentRates {
  Money base = Money::fromDollars(0.01);
  Money failBonus = Money::fromDollars(0.05);
  Money categoryBonus = Money::fromDollars(0.05);
};

struct PlatformConfig {
  PaymentRates payment;
  std::size_t minWords = 5;
  PromptCondition defaultCondition{true, true};
  ExplainConfig explain;
  BucketThresholds buckets;
  ValidationConfig validation;
  AnalyticsConfig analytics;
  std::uint64_t seed = 1;
};

/// Keys (all optional, unknown keys rejected):
///   payment.{base,fail_bonus,category_bonus}      dollars
///   min_words
///   default_condition.{lime,sp}
///   explain.{sample_count,kernel_width,ridge_penalty,seed}
///   buckets.{weak,strong}
///   validation.{quorum,gold_rate,gold_min_answers,gold_accuracy_threshold,batch_size}
///   severity.{w_human,w_ai,t_low,t_high}
///   cloud_threshold
///   seed
PlatformConfig configFromJson(const nlohmann::json& j);
nlohmann::json toJson(const PlatformConfig& config);

PlatformConfig loadConfig(const std::string& path);

}  // namespace proact
