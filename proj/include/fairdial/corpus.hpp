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

// Parallel context construction: find group terms in a context and swap
// them for their counterparts to obtain the mirrored context.

#ifndef FAIRDIAL_CORPUS_HPP_
#define FAIRDIAL_CORPUS_HPP_

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdial/error.hpp"
#include "fairdial/io.hpp"
#include "fairdial/lexicons.hpp"
#include "fairdial/tokenize.hpp"

namespace fairdial {

struct Utterance {
  std::string text;
  std::vector<std::string> tokens;

  Utterance() = default;
  explicit Utterance(std::string t)
      : text(std::move(t)), tokens(tokenize(text)) {}

  bool operator==(const Utterance&) const = default;
};

// A run of tokens [position, position + length) matching a listed phrase.
struct TermSpan {
  std::size_t position = 0;
  std::size_t length = 0;
  std::string phrase;  // space-joined tokens

  bool operator==(const TermSpan&) const = default;
};

struct GroupTerms {
  std::vector<TermSpan> a_matches;
  std::vector<TermSpan> b_matches;
};

struct Substitution {
  std::size_t position = 0;  // token index in context_a
  std::string a_phrase;
  std::string b_phrase;

  bool operator==(const Substitution&) const = default;
};

struct ParallelContextPair {
  Utterance context_a;
  Utterance context_b;
  std::vector<Substitution> substitutions;
  Direction source_direction = Direction::kAToB;

  bool operator==(const ParallelContextPair&) const = default;
};

struct CorpusStats {
  std::size_t built = 0;
  std::size_t skipped_no_match = 0;
  std::size_t skipped_mixed = 0;

  bool operator==(const CorpusStats&) const = default;
};

struct ParallelCorpus {
  std::string group_pair_name;
  std::vector<ParallelContextPair> pairs;
  CorpusStats stats;

  std::size_t size() const { return pairs.size(); }
};

namespace detail {

// One greedy longest-match hit. A phrase may be listed on side A, side B,
// or both; list_index says which list supplied it when several are scanned.
struct TermHit {
  std::size_t position = 0;
  std::size_t length = 0;
  std::size_t list_index = 0;
  std::optional<std::size_t> a_pair;  // first pair with this a_form
  std::optional<std::size_t> b_pair;  // first pair with this b_form
};

// Greedy left-to-right scan preferring the longest phrase at each position.
// Lists are consulted in order; the first list holding the phrase wins.
inline std::vector<TermHit> scan_terms(
    std::span<const std::string> tokens,
    std::span<const WordPairList* const> lists) {
  std::size_t max_len = 0;
  for (const auto* l : lists) max_len = std::max(max_len, l->max_phrase_length());

  std::vector<TermHit> hits;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    const std::size_t longest = std::min(max_len, tokens.size() - i);
    for (std::size_t len = longest; len >= 1 && !matched; --len) {
      const std::string phrase = join_tokens(tokens.subspan(i, len));
      for (std::size_t li = 0; li < lists.size(); ++li) {
        auto a = lists[li]->first_with(phrase, false);
        auto b = lists[li]->first_with(phrase, true);
        if (a || b) {
          hits.push_back({i, len, li, a, b});
          i += len;
          matched = true;
          break;
        }
      }
    }
    if (!matched) ++i;
  }
  return hits;
}

inline bool starts_upper(std::string_view s) {
  return !s.empty() && s.front() >= 'A' && s.front() <= 'Z';
}

inline std::string match_case(std::string replacement, bool upper) {
  if (upper && !replacement.empty() && replacement.front() >= 'a' &&
      replacement.front() <= 'z') {
    replacement.front() =
        static_cast<char>(replacement.front() - 'a' + 'A');
  }
  return replacement;
}

// One planned rewrite of tokens [position, position + length).
struct Edit {
  std::size_t position;
  std::size_t length;
  const WordPair* pair;
  bool to_b;  // replace with the pair's b side (otherwise a side)
};

struct Rewrite {
  std::string text;
  // For every edit: the token index it lands on in the rewritten text.
  std::vector<std::size_t> new_positions;
};

// Splices replacement surfaces into the original bytes, keeping everything
// between matches untouched, then normalises whitespace.
inline Rewrite apply_edits(std::string_view text,
                           std::span<const TokenSpan> spans,
                           std::span<const Edit> edits) {
  Rewrite out;
  std::string buf;
  std::size_t cursor = 0;
  std::ptrdiff_t shift = 0;
  for (const auto& e : edits) {
    const std::size_t begin = spans[e.position].begin;
    const std::size_t end = spans[e.position + e.length - 1].end;
    buf.append(text.substr(cursor, begin - cursor));
    const std::string& surface = e.pair->surface(e.to_b);
    buf.append(match_case(surface, starts_upper(text.substr(begin))));
    cursor = end;
    out.new_positions.push_back(
        static_cast<std::size_t>(static_cast<std::ptrdiff_t>(e.position) + shift));
    shift += static_cast<std::ptrdiff_t>(e.pair->form(e.to_b).size()) -
             static_cast<std::ptrdiff_t>(e.length);
  }
  buf.append(text.substr(cursor));
  out.text = collapse_whitespace(buf);
  return out;
}

}  // namespace detail

inline GroupTerms find_group_terms(const Utterance& context,
                                   const WordPairList& list) {
  const WordPairList* lists[] = {&list};
  GroupTerms out;
  for (const auto& hit : detail::scan_terms(context.tokens, lists)) {
    TermSpan span{hit.position, hit.length,
                  join_tokens(std::span<const std::string>(context.tokens)
                                  .subspan(hit.position, hit.length))};
    if (hit.a_pair) out.a_matches.push_back(span);
    if (hit.b_pair) out.b_matches.push_back(std::move(span));
  }
  return out;
}

// Replaces every source-side term by its counterpart. The returned pair is
// always in canonical orientation: context_a holds the group-A wording.
inline ParallelContextPair substitute(const Utterance& context,
                                      const WordPairList& list,
                                      Direction direction) {
  const bool from_b = direction == Direction::kBToA;
  const WordPairList* lists[] = {&list};
  const auto hits = detail::scan_terms(context.tokens, lists);

  bool has_source = false;
  bool has_target = false;
  for (const auto& h : hits) {
    has_source |= from_b ? h.b_pair.has_value() : h.a_pair.has_value();
    has_target |= from_b ? h.a_pair.has_value() : h.b_pair.has_value();
  }
  if (!has_source) {
    throw NotApplicableError("context has no " +
                             std::string(from_b ? "B" : "A") +
                             "-side term: '" + context.text + "'");
  }
  if (has_target) {
    throw AmbiguityError("context mixes terms of both groups: '" +
                         context.text + "'");
  }

  std::vector<detail::Edit> edits;
  for (const auto& h : hits) {
    const auto& pair = list.pairs()[from_b ? *h.b_pair : *h.a_pair];
    edits.push_back({h.position, h.length, &pair, !from_b});
  }
  const auto spans = tokenize_spans(context.text);
  auto rewritten = detail::apply_edits(context.text, spans, edits);

  ParallelContextPair out;
  out.source_direction = direction;
  Utterance mirrored(std::move(rewritten.text));
  for (std::size_t k = 0; k < edits.size(); ++k) {
    const auto& e = edits[k];
    out.substitutions.push_back(
        {from_b ? rewritten.new_positions[k] : e.position,
         join_tokens(e.pair->a_form), join_tokens(e.pair->b_form)});
  }
  if (from_b) {
    out.context_a = std::move(mirrored);
    out.context_b = context;
  } else {
    out.context_a = context;
    out.context_b = std::move(mirrored);
  }
  return out;
}

// Replays the substitutions on context_a's tokens and checks that the
// result is exactly context_b's tokens.
inline bool verify_pair(const ParallelContextPair& pair) {
  if (pair.substitutions.empty()) return false;
  std::vector<std::string> expected;
  std::size_t cursor = 0;
  const auto& a = pair.context_a.tokens;
  for (const auto& s : pair.substitutions) {
    const auto a_toks = tokenize(s.a_phrase);
    if (s.position < cursor || s.position + a_toks.size() > a.size()) {
      return false;
    }
    expected.insert(expected.end(), a.begin() + cursor, a.begin() + s.position);
    for (std::size_t k = 0; k < a_toks.size(); ++k) {
      if (a[s.position + k] != a_toks[k]) return false;
    }
    const auto b_toks = tokenize(s.b_phrase);
    expected.insert(expected.end(), b_toks.begin(), b_toks.end());
    cursor = s.position + a_toks.size();
  }
  expected.insert(expected.end(), a.begin() + cursor, a.end());
  return expected == pair.context_b.tokens;
}

// Scans utterances from `next` (which returns nullopt at end of input) and
// builds up to max_pairs parallel pairs. A-only contexts are swapped A->B,
// B-only contexts B->A; mixed and term-free contexts are counted and skipped.
inline ParallelCorpus build_parallel_corpus(
    const std::function<std::optional<Utterance>()>& next,
    const WordPairList& list, std::size_t max_pairs) {
  if (max_pairs < 1) throw ContractViolation("max_pairs must be at least 1");
  ParallelCorpus corpus;
  corpus.group_pair_name = list.name();
  while (corpus.pairs.size() < max_pairs) {
    auto utt = next();
    if (!utt) break;
    const auto terms = find_group_terms(*utt, list);
    const bool has_a = !terms.a_matches.empty();
    const bool has_b = !terms.b_matches.empty();
    if (!has_a && !has_b) {
      ++corpus.stats.skipped_no_match;
    } else if (has_a && has_b) {
      ++corpus.stats.skipped_mixed;
    } else {
      corpus.pairs.push_back(
          substitute(*utt, list, has_a ? Direction::kAToB : Direction::kBToA));
      ++corpus.stats.built;
    }
  }
  return corpus;
}

inline ParallelCorpus build_parallel_corpus(std::span<const Utterance> dialogues,
                                            const WordPairList& list,
                                            std::size_t max_pairs) {
  std::size_t i = 0;
  return build_parallel_corpus(
      [&]() -> std::optional<Utterance> {
        if (i >= dialogues.size()) return std::nullopt;
        return dialogues[i++];
      },
      list, max_pairs);
}

enum class InputMode { kContext, kDialogue };

// Reads one utterance per line, or the context column of tab-separated
// context/response lines. Blank lines are ignored.
class UtteranceReader {
 public:
  UtteranceReader(std::istream& in, InputMode mode) : in_(in), mode_(mode) {}

  std::optional<Utterance> operator()() {
    std::string line;
    while (true) {
      if (!std::getline(in_, line)) {
        if (in_.bad()) {
          throw IoError("read failure after line " + std::to_string(line_));
        }
        return std::nullopt;
      }
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (mode_ == InputMode::kDialogue) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
          if (trim(line).empty()) continue;
          throw ParseError("expected context<TAB>response", line_);
        }
        line.resize(tab);
      }
      if (trim(line).empty()) continue;
      return Utterance(std::move(line));
    }
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  InputMode mode_;
  std::size_t line_ = 0;
};

inline nlohmann::json to_json(const ParallelContextPair& p, std::size_t id) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : p.substitutions) {
    subs.push_back({{"position", s.position}, {"a", s.a_phrase}, {"b", s.b_phrase}});
  }
  nlohmann::json j;
  j["id"] = id;
  j["context_a"] = p.context_a.text;
  j["context_b"] = p.context_b.text;
  j["substitutions"] = std::move(subs);
  j["direction"] = std::string(to_string(p.source_direction));
  return j;
}

// One JSON object per line, ids counting from 0 in corpus order.
inline void write_corpus(std::ostream& out, const ParallelCorpus& corpus) {
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    out << to_json(corpus.pairs[i], i).dump() << '\n';
  }
}

inline ParallelCorpus read_corpus(std::istream& in, std::string group_pair_name) {
  ParallelCorpus corpus;
  corpus.group_pair_name = std::move(group_pair_name);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ParallelContextPair p;
      p.context_a = Utterance(j.at("context_a").get<std::string>());
      p.context_b = Utterance(j.at("context_b").get<std::string>());
      p.source_direction = parse_direction(j.at("direction").get<std::string>());
      for (const auto& s : j.at("substitutions")) {
        p.substitutions.push_back({s.at("position").get<std::size_t>(),
                                   s.at("a").get<std::string>(),
                                   s.at("b").get<std::string>()});
      }
      corpus.pairs.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad corpus record: ") + e.what(), line_no);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (in.bad()) throw IoError("read failure after line " + std::to_string(line_no));
  corpus.stats.built = corpus.pairs.size();
  return corpus;
}

}  // namespace fairdial

#endif  // FAIRDIAL_CORPUS_HPP_
