#include "proact/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "proact/random.hpp"

namespace proact {

RidgeFit fitWeightedRidge(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                          const Eigen::VectorXd& sampleWeights, double lambda) {
  const Eigen::Index rows = features.rows();
  const Eigen::Index cols = features.cols();
  if (target.size() != rows || sampleWeights.size() != rows || rows == 0) {
    throw Error(ErrorCode::InvalidArgument, "ridge: dimension mismatch");
  }
  if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge: negative penalty");

  const double weightSum = sampleWeights.sum();
  if (!(weightSum > 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge: weights sum to zero");
  const Eigen::RowVectorXd featureMean = (sampleWeights.transpose() * features) / weightSum;
  const double targetMean = sampleWeights.dot(target) / weightSum;

  const Eigen::MatrixXd centered = features.rowwise() - featureMean;
  const Eigen::VectorXd centeredTarget = target.array() - targetMean;
  const Eigen::MatrixXd weighted = centered.array().colwise() * sampleWeights.array();

  Eigen::MatrixXd gram = weighted.transpose() * centered;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = weighted.transpose() * centeredTarget;

  RidgeFit fit;
  fit.coefficients = cols == 0 ? Eigen::VectorXd() : Eigen::VectorXd(gram.ldlt().solve(rhs));
  fit.intercept = targetMean - (cols == 0 ? 0.0 : featureMean.dot(fit.coefficients));

  const Eigen::VectorXd fitted =
      (cols == 0 ? Eigen::VectorXd::Zero(rows) : Eigen::VectorXd(features * fit.coefficients)).array() +
      fit.intercept;
  const Eigen::VectorXd residual = target - fitted;
  const double ssRes = (sampleWeights.array() * residual.array().square()).sum();
  const double ssTot = (sampleWeights.array() * centeredTarget.array().square()).sum();
  fit.maxAbsResidual = residual.cwiseAbs().maxCoeff();
  if (ssTot <= 1e-24 * weightSum) {
    fit.weightedR2 = 1.0;
  } else {
    fit.weightedR2 = std::clamp(1.0 - ssRes / ssTot, 0.0, 1.0);
  }
  return fit;
}

Eigen::MatrixXd perturbationMasks(std::size_t tokenCount, const ExplainConfig& config) {
  const auto n = static_cast<Eigen::Index>(tokenCount);
  if (config.exhaustive) {
    if (tokenCount > 20) throw Error(ErrorCode::InvalidArgument, "exhaustive perturbation limited to 20 tokens");
    const Eigen::Index total = Eigen::Index{1} << n;
    Eigen::MatrixXd masks(total, n);
    // Row 0 is the all-present mask; remaining rows enumerate the rest.
    for (Eigen::Index r = 0; r < total; ++r) {
      const auto bits = static_cast<std::uint64_t>((total - 1) - r);
      for (Eigen::Index j = 0; j < n; ++j) masks(r, j) = static_cast<double>((bits >> j) & 1U);
    }
    return masks;
  }
  if (config.sampleCount == 0) throw Error(ErrorCode::InvalidArgument, "sampleCount must be positive");
  Eigen::MatrixXd masks(static_cast<Eigen::Index>(config.sampleCount), n);
  masks.row(0).setOnes();
  Rng rng(config.seed);
  for (Eigen::Index r = 1; r < masks.rows(); ++r) {
    for (Eigen::Index j = 0; j < n; ++j) masks(r, j) = rng.bernoulli(0.5) ? 0.0 : 1.0;
  }
  return masks;
}

Eigen::VectorXd kernelWeights(const Eigen::MatrixXd& masks, double kernelWidth) {
  const auto n = static_cast<double>(masks.cols());
  Eigen::VectorXd w(masks.rows());
  for (Eigen::Index r = 0; r < masks.rows(); ++r) {
    const double kept = masks.row(r).sum();
    const double distance = kept > 0.0 ? 1.0 - std::sqrt(kept / n) : 1.0;
    w(r) = std::exp(-(distance * distance) / (kernelWidth * kernelWidth));
  }
  return w;
}

std::string maskedText(const TokenizedText& text, const Eigen::RowVectorXd& mask) {
  std::string out;
  for (std::size_t j = 0; j < text.tokens.size(); ++j) {
    if (mask(static_cast<Eigen::Index>(j)) == 0.0) continue;
    if (!out.empty()) out.push_back(' ');
    out += text.tokens[j].text;
  }
  return out;
}

Explanation explain(const Classifier& model, std::string_view text, const ExplainConfig& config) {
  Explanation ex;
  ex.text = tokenize(text);
  const std::size_t n = ex.text.tokens.size();
  if (n == 0) throw Error(ErrorCode::EmptyText, "cannot explain a text without words");
  if (config.ridgePenalty < 0.0) throw Error(ErrorCode::InvalidArgument, "ridgePenalty must be non-negative");

  ex.kernelWidth = config.kernelWidth.value_or(0.75 * std::sqrt(static_cast<double>(n)));
  if (!(ex.kernelWidth > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernelWidth must be positive");
  ex.seed = config.seed;

  const Eigen::MatrixXd masks = perturbationMasks(n, config);
  ex.sampleCount = static_cast<std::size_t>(masks.rows());
  const Eigen::VectorXd weights = kernelWeights(masks, ex.kernelWidth);

  ex.prediction = model.predict(text);
  std::array<Eigen::VectorXd, 3> targets;
  for (auto& t : targets) t.resize(masks.rows());

  // Identical perturbed texts are queried once.
  std::unordered_map<std::string, Prediction> cache;
  for (Eigen::Index r = 0; r < masks.rows(); ++r) {
    Prediction p;
    if (r == 0 && masks.row(0).minCoeff() == 1.0) {
      p = ex.prediction;
    } else {
      std::string perturbed = maskedText(ex.text, masks.row(r));
      auto it = cache.find(perturbed);
      if (it == cache.end()) it = cache.emplace(perturbed, model.predict(perturbed)).first;
      p = it->second;
    }
    for (std::size_t c = 0; c < 3; ++c) targets[c](r) = p.probabilities[c];
  }

  std::array<RidgeFit, 3> fits;
  for (std::size_t c = 0; c < 3; ++c) {
    fits[c] = fitWeightedRidge(masks, targets[c], weights, config.ridgePenalty);
    ex.classWeights[c].assign(fits[c].coefficients.data(), fits[c].coefficients.data() + n);
    ex.intercepts[c] = fits[c].intercept;
  }
  ex.fidelity = fits[labelIndex(ex.prediction.label)].weightedR2;

  ex.attributions.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < 3; ++c) {
      if (std::abs(ex.classWeights[c][j]) > std::abs(ex.classWeights[best][j])) best = c;
    }
    ex.attributions[j] = {static_cast<SentimentLabel>(best), ex.classWeights[best][j]};
  }
  return ex;
}

std::string_view toString(ColorBucket bucket) {
  switch (bucket) {
    case ColorBucket::StrongNegative: return "strong-negative";
    case ColorBucket::WeakNegative: return "weak-negative";
    case ColorBucket::Neutral: return "neutral";
    case ColorBucket::WeakPositive: return "weak-positive";
    case ColorBucket::StrongPositive: return "strong-positive";
  }
  return "neutral";
}

std::string_view bucketColor(ColorBucket bucket) {
  switch (bucket) {
    case ColorBucket::StrongNegative: return "#d73027";
    case ColorBucket::WeakNegative: return "#fc8d59";
    case ColorBucket::Neutral: return "#ffffbf";
    case ColorBucket::WeakPositive: return "#91cf60";
    case ColorBucket::StrongPositive: return "#1a9850";
  }
  return "#ffffbf";
}

ColorBucket bucketFor(const Attribution& attribution, const BucketThresholds& thresholds) {
  if (!(thresholds.weak > 0.0) || !(thresholds.weak < thresholds.strong)) {
    throw Error(ErrorCode::BadThresholds, "bucket thresholds must satisfy 0 < weak < strong");
  }
  if (attribution.label == SentimentLabel::Neutral) return ColorBucket::Neutral;
  const double magnitude = std::abs(attribution.weight);
  if (magnitude < thresholds.weak) return ColorBucket::Neutral;
  // Evidence for negative (or against positive) renders on the red side.
  const bool towardPositive = (attribution.weight > 0.0) == (attribution.label == SentimentLabel::Positive);
  const bool strong = magnitude >= thresholds.strong;
  if (towardPositive) return strong ? ColorBucket::StrongPositive : ColorBucket::WeakPositive;
  return strong ? ColorBucket::StrongNegative : ColorBucket::WeakNegative;
}

std::vector<ColorBucket> bucketize(const Explanation& explanation, const BucketThresholds& thresholds) {
  std::vector<ColorBucket> out;
  out.reserve(explanation.attributions.size());
  for (const auto& a : explanation.attributions) out.push_back(bucketFor(a, thresholds));
  if (out.empty()) bucketFor({}, thresholds);  // still validate thresholds
  return out;
}

nlohmann::json predictionToJson(const Prediction& p) {
  return {{"label", toString(p.label)},
          {"confidence", p.confidence},
          {"probabilities",
           {{"negative", p.probabilities[0]}, {"neutral", p.probabilities[1]}, {"positive", p.probabilities[2]}}}};
}

Prediction predictionFromJson(const nlohmann::json& j) {
  Prediction p;
  p.probabilities = {j.at("probabilities").at("negative").get<double>(),
                     j.at("probabilities").at("neutral").get<double>(),
                     j.at("probabilities").at("positive").get<double>()};
  p.label = requireLabel(j.at("label").get<std::string>());
  p.confidence = j.at("confidence").get<double>();
  return p;
}

nlohmann::json explanationToJson(const Explanation& ex, const BucketThresholds& thresholds) {
  const auto buckets = bucketize(ex, thresholds);
  nlohmann::json tokens = nlohmann::json::array();
  for (std::size_t j = 0; j < ex.text.tokens.size(); ++j) {
    const Token& t = ex.text.tokens[j];
    tokens.push_back({{"text", t.text},
                      {"start", t.begin},
                      {"end", t.end},
                      {"class", toString(ex.attributions[j].label)},
                      {"weight", ex.attributions[j].weight},
                      {"bucket", toString(buckets[j])},
                      {"color", bucketColor(buckets[j])}});
  }
  return {{"text", ex.text.original},
          {"prediction", predictionToJson(ex.prediction)},
          {"tokens", std::move(tokens)},
          {"class_weights",
           {{"negative", ex.classWeights[0]}, {"neutral", ex.classWeights[1]}, {"positive", ex.classWeights[2]}}},
          {"intercepts", ex.intercepts},
          {"fidelity", ex.fidelity},
          {"sample_count", ex.sampleCount},
          {"kernel_width", ex.kernelWidth},
          {"seed", ex.seed}};
}

Explanation explanationFromJson(const nlohmann::json& j) {
  Explanation ex;
  ex.text = tokenize(j.at("text").get<std::string>());
  ex.prediction = predictionFromJson(j.at("prediction"));
  const auto& tokens = j.at("tokens");
  if (tokens.size() != ex.text.tokens.size()) {
    throw Error(ErrorCode::Parse, "explanation token count does not match its text");
  }
  for (const auto& t : tokens) {
    ex.attributions.push_back({requireLabel(t.at("class").get<std::string>()), t.at("weight").get<double>()});
  }
  const auto& cw = j.at("class_weights");
  ex.classWeights = {cw.at("negative").get<std::vector<double>>(), cw.at("neutral").get<std::vector<double>>(),
                     cw.at("positive").get<std::vector<double>>()};
  ex.intercepts = j.at("intercepts").get<std::array<double, 3>>();
  ex.fidelity = j.at("fidelity").get<double>();
  ex.sampleCount = j.at("sample_count").get<std::size_t>();
  ex.kernelWidth = j.at("kernel_width").get<double>();
  ex.seed = j.at("seed").get<std::uint64_t>();
  return ex;
}

}  // namespace proact
