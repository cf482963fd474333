#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "proact/common.hpp"

namespace proact {

struct Token {
  std::string text;   // original spelling
  std::string lower;  // model feature
  std::size_t begin = 0;  // byte offsets into the original text, [begin, end)
  std::size_t end = 0;
};

struct TokenizedText {
  std::string original;
  std::vector<Token> tokens;

  std::size_t wordCount() const { return tokens.size(); }
};

/// Words are maximal runs of alphanumerics, with apostrophes allowed between
/// word characters. Non-ASCII letters count as word characters; common
/// Unicode punctuation does not.
TokenizedText tokenize(std::string_view text);

struct Prediction {
  SentimentLabel label = SentimentLabel::Neutral;
  std::array<double, 3> probabilities{};  // indexed by labelIndex
  double confidence = 0.0;

  double probability(SentimentLabel l) const { return probabilities[labelIndex(l)]; }

  /// Normalizes raw non-negative scores, then applies argmax with ties broken
  /// by label order.
  static Prediction fromScores(const std::array<double, 3>& scores);
};

/// Black-box prediction contract. Implementations must be thread-safe for
/// concurrent predict calls.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Prediction predict(std::string_view text) const = 0;
};

using LabeledCorpus = std::vector<std::pair<std::string, SentimentLabel>>;

/// Multinomial naive Bayes over lowercase unigrams with additive smoothing.
/// Words outside the training vocabulary are ignored at prediction time.
class NaiveBayesModel final : public Classifier {
 public:
  static NaiveBayesModel train(const LabeledCorpus& corpus, double alpha = 1.0);

  Prediction predict(std::string_view text) const override;

  /// Log-probability of `word` under class `label` (smoothed); nullopt if unknown.
  std::optional<double> wordLogLikelihood(std::string_view word, SentimentLabel label) const;

  std::size_t vocabularySize() const { return counts_.size(); }
  const std::array<std::size_t, 3>& documentCounts() const { return docCounts_; }
  double alpha() const { return alpha_; }

  std::string toJson() const;
  static NaiveBayesModel fromJson(std::string_view json);

  void save(const std::string& path) const;
  static NaiveBayesModel load(const std::string& path);

 private:
  void finalize();

  double alpha_ = 1.0;
  std::array<std::size_t, 3> docCounts_{};
  std::array<std::size_t, 3> tokenTotals_{};
  std::map<std::string, std::array<std::size_t, 3>, std::less<>> counts_;
  std::array<double, 3> logPrior_{};
  std::array<double, 3> logDenominator_{};
};

/// Reads a UTF-8 CSV with header `text,label`.
LabeledCorpus readLabeledCsv(const std::string& path);
LabeledCorpus parseLabeledCsv(std::string_view content);

}  // namespace proact
