//
// Copyright 2026 The fairdial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Per-response measurements: diversity (distinct-1/2), sentiment,
// offensiveness and attribute-word counts, plus the response clean-up they
// rely on (punctuation-run collapsing and lemmatization).

#ifndef FAIRDIAL_ANALYZERS_HPP_
#define FAIRDIAL_ANALYZERS_HPP_

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fairdial/corpus.hpp"
#include "fairdial/error.hpp"
#include "fairdial/io.hpp"
#include "fairdial/lemmatize.hpp"
#include "fairdial/lexicons.hpp"
#include "fairdial/tokenize.hpp"
#include "fairdial/wire.hpp"

namespace fairdial {

// ---------------------------------------------------------------------------
// Normalization

// Collapses every maximal run of one repeated ASCII punctuation character
// to a single occurrence: "wow!!!" -> "wow!", "...?!?!" -> ".?!?!".
inline std::string normalize_response(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool punct = detail::is_punct(static_cast<unsigned char>(c)) &&
                       static_cast<unsigned char>(c) < 0x80;
    if (punct && !out.empty() && out.back() == c) continue;
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diversity

struct DiversitySummary {
  double distinct1 = 0.0;
  double distinct2 = 0.0;
  double diversity = 0.0;
  std::size_t token_count = 0;
  std::size_t unique_unigrams = 0;
  std::size_t unique_bigrams = 0;
};

// distinct-n = |unique n-grams| / total tokens, bigrams never crossing a
// response boundary. diversity is the mean of distinct-1 and distinct-2.
inline DiversitySummary diversity(std::span<const Utterance> responses) {
  std::unordered_set<std::string> unigrams;
  std::unordered_set<std::string> bigrams;
  std::size_t total = 0;
  for (const auto& r : responses) {
    total += r.tokens.size();
    for (std::size_t i = 0; i < r.tokens.size(); ++i) {
      unigrams.insert(r.tokens[i]);
      if (i + 1 < r.tokens.size()) {
        std::string key = r.tokens[i];
        key.push_back('\0');
        key.append(r.tokens[i + 1]);
        bigrams.insert(std::move(key));
      }
    }
  }
  if (total == 0) {
    throw UndefinedMeasureError("diversity is undefined for zero tokens");
  }
  DiversitySummary s;
  s.token_count = total;
  s.unique_unigrams = unigrams.size();
  s.unique_bigrams = bigrams.size();
  s.distinct1 = static_cast<double>(unigrams.size()) / static_cast<double>(total);
  s.distinct2 = static_cast<double>(bigrams.size()) / static_cast<double>(total);
  s.diversity = (s.distinct1 + s.distinct2) / 2.0;
  return s;
}

// ---------------------------------------------------------------------------
// Sentiment

class ValenceLexicon {
 public:
  ValenceLexicon() = default;
  explicit ValenceLexicon(std::unordered_map<std::string, double> entries)
      : entries_(std::move(entries)) {
    for (const auto& [w, v] : entries_) check(w, v);
  }

  void set(const std::string& word, double valence) {
    check(word, valence);
    entries_[ascii_lower(word)] = valence;
  }

  const double* find(const std::string& word) const {
    const auto it = entries_.find(word);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, double>& entries() const {
    return entries_;
  }

 private:
  static void check(const std::string& word, double v) {
    if (!(v >= -4.0 && v <= 4.0)) {
      throw ValidationError("valence of '" + word + "' is outside [-4, 4]");
    }
  }

  std::unordered_map<std::string, double> entries_;
};

// word<TAB>valence per line; '#' starts a comment line.
inline ValenceLexicon load_valence_lexicon(std::istream& in) {
  std::unordered_map<std::string, double> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab = t.find('\t');
    double v = 0.0;
    if (tab == std::string_view::npos || !parse_double(t.substr(tab + 1), v)) {
      throw ParseError("expected word<TAB>valence", line_no);
    }
    if (!(v >= -4.0 && v <= 4.0)) {
      throw ParseError("valence outside [-4, 4]", line_no);
    }
    entries[ascii_lower(trim(t.substr(0, tab)))] = v;
  }
  if (entries.empty()) throw ValidationError("valence lexicon is empty");
  return ValenceLexicon(std::move(entries));
}

inline ValenceLexicon load_valence_lexicon(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_valence_lexicon(in);
}

inline constexpr double kSentimentAlpha = 15.0;
inline constexpr std::size_t kNegationWindow = 3;

inline bool is_negator(std::string_view token) {
  return token == "not" || token == "no" || token == "never" ||
         token.ends_with("n't");
}

// Sum of token valences, each flipped when a negator occurs among the three
// preceding tokens, squashed into (-1, 1) by s / sqrt(s^2 + 15).
inline double sentiment_score(std::string_view text,
                              const ValenceLexicon& lexicon) {
  const auto tokens = tokenize(text);
  double raw = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const double* v = lexicon.find(tokens[i]);
    if (v == nullptr) continue;
    bool negated = false;
    for (std::size_t k = 1; k <= kNegationWindow && k <= i; ++k) {
      if (is_negator(tokens[i - k])) {
        negated = true;
        break;
      }
    }
    raw += negated ? -*v : *v;
  }
  if (raw == 0.0) return 0.0;
  return raw / std::sqrt(raw * raw + kSentimentAlpha);
}

enum class SentimentLabel { kNegative, kNeutral, kPositive };

inline constexpr double kSentimentThreshold = 0.8;

// Strict thresholds: exactly +/-0.8 is neutral.
inline SentimentLabel sentiment_label(double score) {
  if (!(score >= -1.0 && score <= 1.0)) {
    throw ContractViolation("sentiment score " + std::to_string(score) +
                            " is outside [-1, 1]");
  }
  if (score > kSentimentThreshold) return SentimentLabel::kPositive;
  if (score < -kSentimentThreshold) return SentimentLabel::kNegative;
  return SentimentLabel::kNeutral;
}

inline std::string_view to_string(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::kNegative: return "negative";
    case SentimentLabel::kPositive: return "positive";
    default: return "neutral";
  }
}

// ---------------------------------------------------------------------------
// Attribute words

// Tokens whose lemma is the lemma of a lexicon entry, counted with
// multiplicity, plus occurrences of hyphenated compound entries as token runs.
inline std::size_t attribute_count(std::string_view text,
                                   const AttributeLexicon& lexicon) {
  const auto tokens = tokenize(text);
  std::size_t count = 0;
  for (const auto& t : tokens) {
    if (lexicon.contains_lemma(lemmatize(t))) ++count;
  }
  for (const auto& compound : lexicon.compounds()) {
    if (compound.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + compound.size() <= tokens.size(); ++i) {
      bool hit = true;
      for (std::size_t k = 0; k < compound.size() && hit; ++k) {
        hit = tokens[i + k] == compound[k];
      }
      if (hit) ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Offense detection

class OffenseDetector {
 public:
  virtual ~OffenseDetector() = default;
  // 1 when the text is judged offensive, 0 otherwise.
  virtual int label(std::string_view text) = 0;
  virtual std::string describe() const = 0;
  // Whether label() may be called from several threads at once.
  virtual bool parallel_safe() const { return true; }
};

// Flags a text when any token's lemma is in the offensive lexicon.
class LexiconOffenseDetector final : public OffenseDetector {
 public:
  explicit LexiconOffenseDetector(AttributeLexicon lexicon)
      : lexicon_(std::move(lexicon)) {}

  int label(std::string_view text) override {
    for (const auto& t : tokenize(text)) {
      if (lexicon_.contains_lemma(lemmatize(t))) return 1;
    }
    return 0;
  }

  std::string describe() const override {
    return "lexicon:" + lexicon_.name();
  }

 private:
  AttributeLexicon lexicon_;
};

inline constexpr double kOffenseProbabilityThreshold = 0.5;

// Asks an out-of-process classifier for P(offensive); >= 0.5 maps to 1.
// Answers are cached by text.
class ExternalOffenseDetector final : public OffenseDetector {
 public:
  explicit ExternalOffenseDetector(std::unique_ptr<WireClient> client)
      : client_(std::move(client)) {}

  int label(std::string_view text) override {
    std::lock_guard<std::mutex> lock(mu_);
    const std::string key(text);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
    double p = 0.0;
    try {
      p = client_->request_score(text);
    } catch (const ProtocolError& e) {
      throw DetectorError(std::string("offense classifier failed: ") + e.what());
    }
    const int y = p >= kOffenseProbabilityThreshold ? 1 : 0;
    cache_.emplace(key, y);
    return y;
  }

  std::string describe() const override {
    return "external:" + client_->describe();
  }

  bool parallel_safe() const override { return false; }

 private:
  std::unique_ptr<WireClient> client_;
  std::mutex mu_;
  std::unordered_map<std::string, int> cache_;
};

}  // namespace fairdial

#endif  // FAIRDIAL_ANALYZERS_HPP_
