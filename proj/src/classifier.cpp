#include "proact/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "proact/csv.hpp"

namespace proact {

namespace {

struct Codepoint {
  char32_t value = 0;
  std::size_t length = 1;
};

// Lenient decoder: malformed bytes decode as single units.
Codepoint decodeAt(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (i + len > s.size()) return {0xFFFD, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

bool isWordChar(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  if (cp <= 0xBF) return false;                  // Latin-1 punctuation and symbols
  if (cp == 0xD7 || cp == 0xF7) return false;    // multiplication / division signs
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // general punctuation, arrows, symbols
  if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp == 0xFFFD) return false;
  if (cp >= 0x1F000) return false;  // emoji and pictographs
  return true;
}

bool isApostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

std::string asciiLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  out.original = std::string(text);
  std::size_t i = 0;
  while (i < text.size()) {
    Codepoint cp = decodeAt(text, i);
    if (!isWordChar(cp.value)) {
      i += cp.length;
      continue;
    }
    const std::size_t begin = i;
    std::size_t end = i + cp.length;
    i = end;
    while (i < text.size()) {
      cp = decodeAt(text, i);
      if (isWordChar(cp.value)) {
        i += cp.length;
        end = i;
        continue;
      }
      if (isApostrophe(cp.value) && i + cp.length < text.size() &&
          isWordChar(decodeAt(text, i + cp.length).value)) {
        i += cp.length;
        continue;
      }
      break;
    }
    Token tok;
    tok.text = std::string(text.substr(begin, end - begin));
    tok.lower = asciiLower(tok.text);
    tok.begin = begin;
    tok.end = end;
    out.tokens.push_back(std::move(tok));
  }
  return out;
}

Prediction Prediction::fromScores(const std::array<double, 3>& scores) {
  Prediction p;
  double total = 0.0;
  for (double s : scores) total += s;
  for (std::size_t k = 0; k < 3; ++k) {
    p.probabilities[k] = total > 0.0 ? scores[k] / total : 1.0 / 3.0;
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < 3; ++k) {
    if (p.probabilities[k] > p.probabilities[best]) best = k;
  }
  p.label = static_cast<SentimentLabel>(best);
  p.confidence = p.probabilities[best];
  return p;
}

NaiveBayesModel NaiveBayesModel::train(const LabeledCorpus& corpus, double alpha) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "training corpus is empty");
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "smoothing alpha must be positive");
  NaiveBayesModel model;
  model.alpha_ = alpha;
  for (const auto& [text, label] : corpus) {
    const std::size_t c = labelIndex(label);
    ++model.docCounts_[c];
    for (const Token& tok : tokenize(text).tokens) {
      auto it = model.counts_.find(tok.lower);
      if (it == model.counts_.end()) it = model.counts_.emplace(tok.lower, std::array<std::size_t, 3>{}).first;
      ++it->second[c];
      ++model.tokenTotals_[c];
    }
  }
  for (SentimentLabel l : kAllLabels) {
    if (model.docCounts_[labelIndex(l)] == 0) {
      throw Error(ErrorCode::MissingClass, "no training document has label " + std::string(toString(l)));
    }
  }
  model.finalize();
  return model;
}

void NaiveBayesModel::finalize() {
  const double docs = static_cast<double>(docCounts_[0] + docCounts_[1] + docCounts_[2]);
  const double vocab = static_cast<double>(counts_.size());
  for (std::size_t c = 0; c < 3; ++c) {
    logPrior_[c] = std::log(static_cast<double>(docCounts_[c]) / docs);
    logDenominator_[c] = std::log(static_cast<double>(tokenTotals_[c]) + alpha_ * vocab);
  }
}

std::optional<double> NaiveBayesModel::wordLogLikelihood(std::string_view word, SentimentLabel label) const {
  const auto it = counts_.find(word);
  if (it == counts_.end()) return std::nullopt;
  const std::size_t c = labelIndex(label);
  return std::log(static_cast<double>(it->second[c]) + alpha_) - logDenominator_[c];
}

Prediction NaiveBayesModel::predict(std::string_view text) const {
  std::array<double, 3> logScore = logPrior_;
  for (const Token& tok : tokenize(text).tokens) {
    const auto it = counts_.find(tok.lower);
    if (it == counts_.end()) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      logScore[c] += std::log(static_cast<double>(it->second[c]) + alpha_) - logDenominator_[c];
    }
  }
  const double top = std::max({logScore[0], logScore[1], logScore[2]});
  std::array<double, 3> scores{};
  for (std::size_t c = 0; c < 3; ++c) scores[c] = std::exp(logScore[c] - top);
  return Prediction::fromScores(scores);
}

std::string NaiveBayesModel::toJson() const {
  nlohmann::json j;
  j["format"] = "proact-naive-bayes";
  j["version"] = 1;
  j["alpha"] = alpha_;
  j["document_counts"] = docCounts_;
  nlohmann::json words = nlohmann::json::object();
  for (const auto& [word, counts] : counts_) words[word] = counts;
  j["word_counts"] = std::move(words);
  return j.dump();
}

NaiveBayesModel NaiveBayesModel::fromJson(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("model file is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "proact-naive-bayes" || j.value("version", 0) != 1) {
    throw Error(ErrorCode::Parse, "unsupported model format");
  }
  NaiveBayesModel model;
  try {
    model.alpha_ = j.at("alpha").get<double>();
    model.docCounts_ = j.at("document_counts").get<std::array<std::size_t, 3>>();
    for (const auto& [word, counts] : j.at("word_counts").items()) {
      const auto arr = counts.get<std::array<std::size_t, 3>>();
      model.counts_.emplace(word, arr);
      for (std::size_t c = 0; c < 3; ++c) model.tokenTotals_[c] += arr[c];
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed model file: ") + e.what());
  }
  for (std::size_t c = 0; c < 3; ++c) {
    if (model.docCounts_[c] == 0) throw Error(ErrorCode::MissingClass, "model has an empty class");
  }
  model.finalize();
  return model;
}

void NaiveBayesModel::save(const std::string& path) const { csv::writeFile(path, toJson()); }

NaiveBayesModel NaiveBayesModel::load(const std::string& path) { return fromJson(csv::readFile(path)); }

LabeledCorpus parseLabeledCsv(std::string_view content) {
  const auto rows = csv::parse(content);
  if (rows.empty()) return {};
  const auto& header = rows.front();
  if (header.size() < 2 || header[0] != "text" || header[1] != "label") {
    throw Error(ErrorCode::Parse, "corpus CSV must start with header `text,label`");
  }
  LabeledCorpus corpus;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() < 2) throw Error(ErrorCode::Parse, "corpus row " + std::to_string(r + 1) + " has too few fields");
    const auto label = parseLabel(row[1]);
    if (!label) throw Error(ErrorCode::Parse, "corpus row " + std::to_string(r + 1) + ": unknown label '" + row[1] + "'");
    corpus.emplace_back(row[0], *label);
  }
  return corpus;
}

LabeledCorpus readLabeledCsv(const std::string& path) { return parseLabeledCsv(csv::readFile(path)); }

}  // namespace proact
