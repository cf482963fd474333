#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string_view>
#include <vector>

#include "proact/classifier.hpp"

namespace proact {

struct ExplainConfig {
  std::size_t sampleCount = 500;
  /// Defaults to 0.75 * sqrt(token count) when unset.
  std::optional<double> kernelWidth;
  double ridgePenalty = 1.0;
  std::uint64_t seed = 42;
  /// Use every one of the 2^n presence masks instead of sampling (n <= 20).
  bool exhaustive = false;
};

struct Attribution {
  SentimentLabel label = SentimentLabel::Neutral;
  double weight = 0.0;
};

struct Explanation {
  TokenizedText text;
  Prediction prediction;  // of the unperturbed text
  std::vector<Attribution> attributions;  // one per token position
  std::array<std::vector<double>, 3> classWeights;  // per-class surrogate coefficients
  std::array<double, 3> intercepts{};
  double fidelity = 1.0;  // weighted R^2 of the predicted-class surrogate
  std::size_t sampleCount = 0;
  std::uint64_t seed = 0;
  double kernelWidth = 0.0;
};

/// Weighted ridge regression with an unpenalized intercept:
///   min_b,b0  sum_i w_i (y_i - b0 - x_i.b)^2 + lambda |b|^2
/// solved by weighted centering followed by an LDLT solve.
struct RidgeFit {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double weightedR2 = 1.0;  // 1.0 when the target is constant
  double maxAbsResidual = 0.0;
};

RidgeFit fitWeightedRidge(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                          const Eigen::VectorXd& sampleWeights, double lambda);

/// Binary presence masks used to perturb a text of `tokenCount` tokens. The
/// first row is always the unperturbed point.
Eigen::MatrixXd perturbationMasks(std::size_t tokenCount, const ExplainConfig& config);

/// exp(-d^2 / width^2) with d the cosine distance from the all-ones mask.
Eigen::VectorXd kernelWeights(const Eigen::MatrixXd& masks, double kernelWidth);

/// Text with the masked-out tokens deleted (kept tokens joined by spaces).
std::string maskedText(const TokenizedText& text, const Eigen::RowVectorXd& mask);

/// Local surrogate explanation of `model` around `text`. Throws EmptyText when
/// the text has no tokens.
Explanation explain(const Classifier& model, std::string_view text, const ExplainConfig& config = {});

enum class ColorBucket : std::uint8_t { StrongNegative, WeakNegative, Neutral, WeakPositive, StrongPositive };

struct BucketThresholds {
  double weak = 0.05;
  double strong = 0.2;
};

std::string_view toString(ColorBucket bucket);
/// Diverging red-yellow-green palette used by every rendering surface.
std::string_view bucketColor(ColorBucket bucket);

ColorBucket bucketFor(const Attribution& attribution, const BucketThresholds& thresholds);
std::vector<ColorBucket> bucketize(const Explanation& explanation, const BucketThresholds& thresholds);

nlohmann::json predictionToJson(const Prediction& p);
Prediction predictionFromJson(const nlohmann::json& j);

nlohmann::json explanationToJson(const Explanation& explanation, const BucketThresholds& thresholds);
Explanation explanationFromJson(const nlohmann::json& j);

}  // namespace proact
