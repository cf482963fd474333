#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "proact/classifier.hpp"
#include "proact/explainer.hpp"

namespace proact::testing {

/// Six documents, two per class; "excellent" appears only in positive ones.
inline LabeledCorpus sixDocumentCorpus() {
  return {
      {"excellent food and excellent service", SentimentLabel::Positive},
      {"the staff were excellent", SentimentLabel::Positive},
      {"terrible food and bad service", SentimentLabel::Negative},
      {"the staff were rude", SentimentLabel::Negative},
      {"the food arrived at noon", SentimentLabel::Neutral},
      {"service starts at nine", SentimentLabel::Neutral},
  };
}

/// A model where "very" and "good" are heavy positive evidence, plus enough
/// neutral filler for the rest of the tea sentence.
inline LabeledCorpus veryGoodCorpus() {
  return {
      {"very good job", SentimentLabel::Positive},
      {"very good service very good food", SentimentLabel::Positive},
      {"good tea and very good staff", SentimentLabel::Positive},
      {"very good very good", SentimentLabel::Positive},
      {"awful slow service", SentimentLabel::Negative},
      {"terrible cold tea", SentimentLabel::Negative},
      {"the worst job ever", SentimentLabel::Negative},
      {"the station opens at nine", SentimentLabel::Neutral},
      {"we ordered a cup of coffee", SentimentLabel::Neutral},
      {"the train leaves in an hour", SentimentLabel::Neutral},
  };
}

inline std::string dataPath(const std::string& name) { return std::string(PROACT_DATA_DIR) + "/" + name; }

/// Always returns the same probabilities.
class ConstantModel final : public Classifier {
 public:
  explicit ConstantModel(std::array<double, 3> p) : p_(Prediction::fromScores(p)) {}
  Prediction predict(std::string_view) const override { return p_; }

 private:
  Prediction p_;
};

/// P(positive) is an explicit linear function of word presence; negative and
/// neutral share the remainder evenly.
class LinearWordModel final : public Classifier {
 public:
  LinearWordModel(double base, std::map<std::string, double> coefficients)
      : base_(base), coefficients_(std::move(coefficients)) {}

  Prediction predict(std::string_view text) const override {
    double pos = base_;
    for (const auto& tok : tokenize(text).tokens) {
      auto it = coefficients_.find(tok.lower);
      if (it != coefficients_.end()) pos += it->second;
    }
    const double rest = (1.0 - pos) / 2.0;
    return Prediction::fromScores({rest, rest, pos});
  }

 private:
  double base_;
  std::map<std::string, double> coefficients_;
};

inline const std::vector<std::string>& linearWords() {
  static const std::vector<std::string> words = {"alpha", "bravo", "charlie", "delta",
                                                 "echo",  "foxtrot", "golf", "hotel"};
  return words;
}

inline const std::vector<double>& linearCoefficients() {
  static const std::vector<double> c = {0.08, -0.05, 0.06, 0.03, -0.07, 0.04, 0.02, 0.05};
  return c;
}

inline LinearWordModel linearFixtureModel() {
  std::map<std::string, double> m;
  for (std::size_t j = 0; j < linearWords().size(); ++j) m[linearWords()[j]] = linearCoefficients()[j];
  return LinearWordModel(0.4, m);
}

inline std::string linearFixtureText() { return "alpha bravo charlie delta echo foxtrot golf hotel"; }

}  // namespace proact::testing
