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

// Word-pair lists (group A form <-> group B form) and attribute lexicons.
//
// Pair files hold one pair per line, "a_form - b_form", with '#' comment
// lines. Attribute files hold one word per line or comma-separated words.
// Both are case-insensitive and stored lowercase. Everything here is
// immutable once loaded.

#ifndef FAIRDIAL_LEXICONS_HPP_
#define FAIRDIAL_LEXICONS_HPP_

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fairdial/error.hpp"
#include "fairdial/io.hpp"
#include "fairdial/lemmatize.hpp"
#include "fairdial/tokenize.hpp"

namespace fairdial {

enum class Direction { kAToB, kBToA };

inline std::string_view to_string(Direction d) {
  return d == Direction::kAToB ? "A->B" : "B->A";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "A->B") return Direction::kAToB;
  if (s == "B->A") return Direction::kBToA;
  throw ValidationError("unknown direction '" + std::string(s) + "'");
}

inline Direction reverse(Direction d) {
  return d == Direction::kAToB ? Direction::kBToA : Direction::kAToB;
}

// Longest phrase a pair side may hold. The race list's
// "do you want to fight" needs five.
inline constexpr std::size_t kMaxPhraseTokens = 5;

struct WordPair {
  std::vector<std::string> a_form;
  std::vector<std::string> b_form;
  // Lowercased text spelled the way it is inserted on substitution, e.g.
  // "5-0" rather than the token sequence "5 0".
  std::string a_surface;
  std::string b_surface;
  std::size_t line = 0;

  const std::vector<std::string>& form(bool b_side) const {
    return b_side ? b_form : a_form;
  }
  const std::string& surface(bool b_side) const {
    return b_side ? b_surface : a_surface;
  }
};

class WordPairList {
 public:
  WordPairList(std::string group_pair_name, std::vector<WordPair> pairs)
      : name_(std::move(group_pair_name)), pairs_(std::move(pairs)) {
    if (pairs_.empty()) {
      throw ValidationError("pair list '" + name_ + "' is empty");
    }
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const auto& p = pairs_[i];
      if (p.a_form.empty() || p.b_form.empty()) {
        throw ValidationError("pair with an empty side in '" + name_ + "'");
      }
      if (p.a_form == p.b_form) {
        throw ValidationError("pair '" + p.a_surface +
                              "' maps a phrase to itself");
      }
      first_a_.try_emplace(join_tokens(p.a_form), i);
      first_b_.try_emplace(join_tokens(p.b_form), i);
      max_len_ = std::max({max_len_, p.a_form.size(), p.b_form.size()});
    }
    std::set<std::string> reported;
    for (const auto& p : pairs_) {
      const std::string a = join_tokens(p.a_form);
      if (first_b_.contains(a) && reported.insert(a).second) {
        warnings_.push_back("line " + std::to_string(p.line) + ": '" + a +
                            "' is listed on both sides of '" + name_ + "'");
      }
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<WordPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  std::size_t max_phrase_length() const { return max_len_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Index of the first pair whose side (a or b) equals `phrase`, a
  // space-joined token sequence.
  std::optional<std::size_t> first_with(std::string_view phrase,
                                        bool b_side) const {
    const auto& index = b_side ? first_b_ : first_a_;
    const auto it = index.find(std::string(phrase));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::string name_;
  std::vector<WordPair> pairs_;
  std::unordered_map<std::string, std::size_t> first_a_;
  std::unordered_map<std::string, std::size_t> first_b_;
  std::size_t max_len_ = 0;
  std::vector<std::string> warnings_;
};

namespace detail {

inline std::string surface_of(std::string_view side) {
  const auto spans = tokenize_spans(side);
  if (spans.empty()) return {};
  return ascii_lower(
      side.substr(spans.front().begin, spans.back().end - spans.front().begin));
}

}  // namespace detail

inline WordPairList load_pair_list(std::istream& in,
                                   std::string group_pair_name) {
  static constexpr std::string_view kSep = " - ";
  std::vector<WordPair> pairs;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto sep = line.find(kSep);
    if (sep == std::string_view::npos) {
      if (line.ends_with(" -") || line.starts_with("- ") || line == "-") {
        throw ParseError("pair has an empty side", line_no);
      }
      throw ParseError("missing ' - ' separator", line_no);
    }
    const auto a_text = trim(line.substr(0, sep));
    const auto b_text = trim(line.substr(sep + kSep.size()));
    WordPair pair{tokenize(a_text), tokenize(b_text),
                  detail::surface_of(a_text), detail::surface_of(b_text),
                  line_no};
    if (pair.a_form.empty() || pair.b_form.empty()) {
      throw ParseError("pair has an empty side", line_no);
    }
    if (pair.a_form.size() > kMaxPhraseTokens ||
        pair.b_form.size() > kMaxPhraseTokens) {
      throw ParseError("phrase longer than " +
                           std::to_string(kMaxPhraseTokens) + " tokens",
                       line_no);
    }
    if (pair.a_form == pair.b_form) {
      throw ParseError("both sides are the same phrase", line_no);
    }
    pairs.push_back(std::move(pair));
  }
  if (pairs.empty()) {
    throw ValidationError("pair list '" + group_pair_name + "' has no pairs");
  }
  return WordPairList(std::move(group_pair_name), std::move(pairs));
}

inline WordPairList load_pair_list(const std::filesystem::path& path,
                                   std::string group_pair_name) {
  auto in = open_input(path);
  return load_pair_list(in, std::move(group_pair_name));
}

inline WordPairList parse_pair_list(std::string_view text,
                                    std::string group_pair_name) {
  std::istringstream in{std::string(text)};
  return load_pair_list(in, std::move(group_pair_name));
}

// For A->B: the b_form of the first pair whose a_form equals `phrase`;
// for B->A: the a_form of the first pair whose b_form equals it.
inline std::optional<std::vector<std::string>> counterpart_of(
    const WordPairList& list, std::span<const std::string> phrase,
    Direction direction) {
  const bool from_b = direction == Direction::kBToA;
  const auto idx = list.first_with(join_tokens(phrase), from_b);
  if (!idx) return std::nullopt;
  return list.pairs()[*idx].form(!from_b);
}

// A named set of lowercase words. Entries are whitespace-free; hyphenated
// compounds ("in-law") are kept as written and matched as token runs. Each
// entry's lemma is kept too, so inflected entries such as "engaged" still
// match text lemmas.
class AttributeLexicon {
 public:
  AttributeLexicon(std::string name, const std::vector<std::string>& words)
      : name_(std::move(name)) {
    for (const auto& w : words) {
      std::string entry = ascii_lower(trim(w));
      if (entry.empty()) continue;
      if (entry.find_first_of(" \t") != std::string::npos) {
        throw ValidationError("attribute entry '" + entry +
                              "' is not a single word");
      }
      if (!words_.insert(entry).second) continue;
      lemmas_.insert(lemmatize(entry));
      ordered_.push_back(entry);
      auto toks = tokenize(entry);
      if (toks.size() > 1) compounds_.push_back(std::move(toks));
    }
    if (words_.empty()) {
      throw ValidationError("attribute lexicon '" + name_ + "' is empty");
    }
  }

  const std::string& name() const { return name_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return ordered_; }
  const std::vector<std::vector<std::string>>& compounds() const {
    return compounds_;
  }

  bool contains(std::string_view word) const {
    return words_.contains(ascii_lower(word));
  }

  // True when `lemma` is the lemma of some entry.
  bool contains_lemma(const std::string& lemma) const {
    return lemmas_.contains(lemma);
  }

 private:
  std::string name_;
  std::unordered_set<std::string> words_;
  std::unordered_set<std::string> lemmas_;
  std::vector<std::string> ordered_;
  std::vector<std::vector<std::string>> compounds_;
};

inline AttributeLexicon load_attribute_list(std::istream& in,
                                            std::string name) {
  std::vector<std::string> words;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto comma = line.find(',', start);
      if (comma == std::string_view::npos) comma = line.size();
      const auto entry = trim(line.substr(start, comma - start));
      if (!entry.empty()) {
        if (entry.find_first_of(" \t") != std::string_view::npos) {
          throw ParseError("entry '" + std::string(entry) +
                               "' is not a single word",
                           line_no);
        }
        words.emplace_back(entry);
      }
      start = comma + 1;
    }
  }
  return AttributeLexicon(std::move(name), words);
}

inline AttributeLexicon load_attribute_list(const std::filesystem::path& path,
                                            std::string name) {
  auto in = open_input(path);
  return load_attribute_list(in, std::move(name));
}

}  // namespace fairdial

#endif  // FAIRDIAL_LEXICONS_HPP_
