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

// Debiasing: counterpart data augmentation (CDA) over training pairs, and
// word embedding regularization (WER), which pulls the embeddings of each
// counterpart word pair together while an anchor loss holds them near their
// starting point.

#ifndef FAIRDIAL_DEBIAS_HPP_
#define FAIRDIAL_DEBIAS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairdial/corpus.hpp"
#include "fairdial/error.hpp"
#include "fairdial/io.hpp"
#include "fairdial/lexicons.hpp"

namespace fairdial {

// ---------------------------------------------------------------------------
// Counterpart data augmentation

struct TrainingPair {
  Utterance context;
  Utterance response;

  bool operator==(const TrainingPair&) const = default;
};

// Swaps every listed term, in either direction, for its counterpart. Where
// a phrase is listed on both sides its A-side pair wins. Returns nullopt
// when the text holds no listed term.
inline std::optional<std::string> swap_terms(
    const Utterance& u, std::span<const WordPairList* const> lists) {
  const auto hits = detail::scan_terms(u.tokens, lists);
  if (hits.empty()) return std::nullopt;
  std::vector<detail::Edit> edits;
  edits.reserve(hits.size());
  for (const auto& h : hits) {
    const auto& list = *lists[h.list_index];
    if (h.a_pair) {
      edits.push_back({h.position, h.length, &list.pairs()[*h.a_pair], true});
    } else {
      edits.push_back({h.position, h.length, &list.pairs()[*h.b_pair], false});
    }
  }
  const auto spans = tokenize_spans(u.text);
  return detail::apply_edits(u.text, spans, edits).text;
}

// The fully swapped copy of a pair, or nullopt when neither side holds a
// listed term.
inline std::optional<TrainingPair> counterpart_pair(
    const TrainingPair& p, std::span<const WordPairList* const> lists) {
  auto c = swap_terms(p.context, lists);
  auto r = swap_terms(p.response, lists);
  if (!c && !r) return std::nullopt;
  return TrainingPair{c ? Utterance(std::move(*c)) : p.context,
                      r ? Utterance(std::move(*r)) : p.response};
}

struct CdaStats {
  std::size_t input = 0;
  std::size_t augmented = 0;

  std::size_t output() const { return input + augmented; }
};

// Every input pair, each followed by its counterpart when it has one.
inline std::vector<TrainingPair> cda_augment(
    std::span<const TrainingPair> pairs,
    std::span<const WordPairList* const> lists, CdaStats* stats = nullptr) {
  if (lists.empty()) throw ContractViolation("cda_augment needs a pair list");
  std::vector<TrainingPair> out;
  out.reserve(pairs.size() * 2);
  CdaStats s;
  for (const auto& p : pairs) {
    out.push_back(p);
    ++s.input;
    if (auto c = counterpart_pair(p, lists)) {
      out.push_back(std::move(*c));
      ++s.augmented;
    }
  }
  if (stats != nullptr) *stats = s;
  return out;
}

// Parses one context<TAB>response line.
inline TrainingPair parse_training_pair(std::string_view line,
                                        std::size_t line_no) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) {
    throw ParseError("expected context<TAB>response", line_no);
  }
  TrainingPair p{Utterance(std::string(line.substr(0, tab))),
                 Utterance(std::string(line.substr(tab + 1)))};
  if (trim(p.context.text).empty() || trim(p.response.text).empty()) {
    throw ParseError("empty context or response", line_no);
  }
  return p;
}

inline std::vector<TrainingPair> read_training_pairs(std::istream& in) {
  std::vector<TrainingPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    out.push_back(parse_training_pair(line, line_no));
  }
  if (in.bad()) throw IoError("read failure after line " + std::to_string(line_no));
  return out;
}

inline void write_training_pairs(std::ostream& out,
                                 std::span<const TrainingPair> pairs) {
  for (const auto& p : pairs) {
    out << p.context.text << '\t' << p.response.text << '\n';
  }
  if (!out) throw IoError("write failure");
}

// Streaming form: reads and writes one pair at a time.
inline CdaStats cda_augment_stream(std::istream& in, std::ostream& out,
                                   std::span<const WordPairList* const> lists) {
  if (lists.empty()) throw ContractViolation("cda_augment needs a pair list");
  CdaStats s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto p = parse_training_pair(line, line_no);
    out << p.context.text << '\t' << p.response.text << '\n';
    ++s.input;
    if (const auto c = counterpart_pair(p, lists)) {
      out << c->context.text << '\t' << c->response.text << '\n';
      ++s.augmented;
    }
    if (!out) throw IoError("write failure at input line " + std::to_string(line_no));
  }
  if (in.bad()) throw IoError("read failure after line " + std::to_string(line_no));
  return s;
}

// ---------------------------------------------------------------------------
// Embeddings

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension) : dim_(dimension) {
    if (dim_ == 0) throw ContractViolation("embedding dimension must be positive");
  }

  void add(const std::string& word, std::span<const double> vec) {
    if (vec.size() != dim_) {
      throw ContractViolation("vector for '" + word + "' has dimension " +
                              std::to_string(vec.size()) + ", expected " +
                              std::to_string(dim_));
    }
    for (const double v : vec) {
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite entry in vector for '" + word + "'");
      }
    }
    if (!index_.try_emplace(word, words_.size()).second) {
      throw ValidationError("duplicate embedding for '" + word + "'");
    }
    words_.push_back(word);
    data_.insert(data_.end(), vec.begin(), vec.end());
  }

  std::size_t size() const { return words_.size(); }
  std::size_t dimension() const { return dim_; }
  const std::vector<std::string>& words() const { return words_; }

  std::optional<std::size_t> find(const std::string& word) const {
    const auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const EmbeddingTable& o) const {
    return dim_ == o.dim_ && words_ == o.words_ && data_ == o.data_;
  }

 private:
  std::size_t dim_;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Text layout: "<count> <dimension>" then "word v1 ... vd" per line.
inline EmbeddingTable load_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t count = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  {
    std::istringstream header(line);
    if (!(header >> count >> dim) || dim == 0) {
      throw ParseError("expected '<count> <dimension>' header", line_no);
    }
  }
  EmbeddingTable table(dim);
  std::vector<double> vec(dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream row(line);
    std::string word;
    row >> word;
    std::string field;
    std::size_t k = 0;
    while (row >> field) {
      if (k >= dim || !parse_double(field, vec[k])) {
        throw ParseError("expected " + std::to_string(dim) + " numbers after '" +
                             word + "'",
                         line_no);
      }
      ++k;
    }
    if (k != dim) {
      throw ParseError("expected " + std::to_string(dim) + " numbers after '" +
                           word + "'",
                       line_no);
    }
    try {
      table.add(word, vec);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (in.bad()) throw IoError("read failure after line " + std::to_string(line_no));
  if (table.size() != count) {
    throw ParseError("header announces " + std::to_string(count) +
                         " vectors, found " + std::to_string(table.size()),
                     line_no);
  }
  return table;
}

inline void save_embeddings(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dimension() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    for (const double v : table.row(i)) out << ' ' << format_double(v);
    out << '\n';
  }
  if (!out) throw IoError("write failure");
}

// ---------------------------------------------------------------------------
// Word embedding regularization

struct IndexPair {
  std::size_t a = 0;
  std::size_t b = 0;
  std::string a_word;
  std::string b_word;
};

struct ResolvedPairs {
  std::vector<IndexPair> pairs;
  std::vector<std::string> warnings;
};

// Maps single-word pairs to table rows. Multiword pairs are skipped with a
// warning; so are pairs with a word missing from the table when
// skip_missing is set (otherwise that is an error). Repeated pairs count once.
inline ResolvedPairs resolve_pairs(const EmbeddingTable& table,
                                   const WordPairList& list,
                                   bool skip_missing = false) {
  ResolvedPairs out;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& p : list.pairs()) {
    if (p.a_form.size() != 1 || p.b_form.size() != 1) {
      out.warnings.push_back("line " + std::to_string(p.line) + ": skipping multiword pair '" +
                             p.a_surface + " - " + p.b_surface + "'");
      continue;
    }
    const auto a = table.find(p.a_form[0]);
    const auto b = table.find(p.b_form[0]);
    if (!a || !b) {
      const std::string missing = !a ? p.a_form[0] : p.b_form[0];
      if (!skip_missing) {
        throw ValidationError("no embedding for '" + missing + "'");
      }
      out.warnings.push_back("line " + std::to_string(p.line) +
                             ": no embedding for '" + missing + "'");
      continue;
    }
    if (!seen.emplace(*a, *b).second) continue;
    out.pairs.push_back({*a, *b, p.a_form[0], p.b_form[0]});
  }
  return out;
}

inline double pair_distance(const EmbeddingTable& e, std::size_t a, std::size_t b) {
  const auto va = e.row(a);
  const auto vb = e.row(b);
  double sq = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) {
    const double d = va[k] - vb[k];
    sq += d * d;
  }
  return std::sqrt(sq);
}

// The original training loss and its gradient with respect to the flat
// embedding data.
struct BaseLoss {
  std::function<double(const EmbeddingTable&)> value;
  std::function<void(const EmbeddingTable&, std::span<double>)> add_gradient;
};

inline BaseLoss zero_loss() {
  return {[](const EmbeddingTable&) { return 0.0; },
          [](const EmbeddingTable&, std::span<double>) {}};
}

// sum_w ||e_w - e0_w||^2
inline BaseLoss anchor_loss(const EmbeddingTable& e0) {
  auto anchor = std::make_shared<const std::vector<double>>(e0.data());
  return {[anchor](const EmbeddingTable& e) {
            if (e.data().size() != anchor->size()) {
              throw ContractViolation("embedding table does not match its anchor");
            }
            double s = 0.0;
            for (std::size_t i = 0; i < anchor->size(); ++i) {
              const double d = e.data()[i] - (*anchor)[i];
              s += d * d;
            }
            return s;
          },
          [anchor](const EmbeddingTable& e, std::span<double> g) {
            if (e.data().size() != anchor->size()) {
              throw ContractViolation("embedding table does not match its anchor");
            }
            for (std::size_t i = 0; i < anchor->size(); ++i) {
              g[i] += 2.0 * (e.data()[i] - (*anchor)[i]);
            }
          }};
}

inline double regularizer(const EmbeddingTable& e,
                          std::span<const IndexPair> pairs) {
  double s = 0.0;
  for (const auto& p : pairs) s += pair_distance(e, p.a, p.b);
  return s;
}

inline void check_k(double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw ContractViolation("k must be a finite value >= 0");
  }
}

// base(e) + k * sum ||e_a - e_b||
inline double wer_loss(const EmbeddingTable& e, std::span<const IndexPair> pairs,
                       double k, const BaseLoss& base) {
  check_k(k);
  return base.value(e) + k * regularizer(e, pairs);
}

inline double wer_loss(const EmbeddingTable& e, const WordPairList& list,
                       double k, const BaseLoss& base) {
  return wer_loss(e, resolve_pairs(e, list).pairs, k, base);
}

inline constexpr double kCoincidenceEpsilon = 1e-12;

// Analytic gradient, flat in table order. The norm term contributes
// k (e_a - e_b) / ||e_a - e_b||, and nothing where the pair coincides.
inline std::vector<double> wer_gradient(const EmbeddingTable& e,
                                        std::span<const IndexPair> pairs,
                                        double k, const BaseLoss& base) {
  check_k(k);
  std::vector<double> g(e.data().size(), 0.0);
  base.add_gradient(e, g);
  const std::size_t d = e.dimension();
  for (const auto& p : pairs) {
    const double dist = pair_distance(e, p.a, p.b);
    if (dist < kCoincidenceEpsilon) continue;
    const auto va = e.row(p.a);
    const auto vb = e.row(p.b);
    for (std::size_t j = 0; j < d; ++j) {
      const double u = k * (va[j] - vb[j]) / dist;
      g[p.a * d + j] += u;
      g[p.b * d + j] -= u;
    }
  }
  return g;
}

struct WerConfig {
  double k = 0.5;
  double learning_rate = 0.1;
  std::size_t max_steps = 1000;
  double tolerance = 1e-10;

  void validate() const {
    check_k(k);
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw ContractViolation("learning_rate must be positive");
    }
    if (!(tolerance > 0.0)) throw ContractViolation("tolerance must be positive");
  }
};

inline constexpr std::size_t kDivergencePatience = 10;

struct WerResult {
  EmbeddingTable table;
  std::vector<double> losses;  // losses[0] is the starting loss
  std::size_t steps = 0;
  bool converged = false;

  double initial_loss() const { return losses.front(); }
  double final_loss() const {
    return *std::min_element(losses.begin(), losses.end());
  }
};

// Fixed-step descent: a gradient step on the base loss, then the exact
// proximal step of each pair's norm term, which moves both words toward each
// other by min(lr * k, distance / 2). Stops after max_steps or once a step
// lowers the loss by less than the tolerance; returns the best iterate.
inline WerResult wer_optimize(const EmbeddingTable& e0,
                              std::span<const IndexPair> pairs,
                              const WerConfig& cfg, const BaseLoss& base) {
  cfg.validate();
  for (const auto& p : pairs) {
    if (p.a >= e0.size() || p.b >= e0.size()) {
      throw ContractViolation("pair index outside the embedding table");
    }
  }
  const std::size_t d = e0.dimension();
  const double eta = cfg.learning_rate;
  const double shrink_cap = eta * cfg.k;

  EmbeddingTable cur = e0;
  WerResult result{e0, {wer_loss(e0, pairs, cfg.k, base)}, 0, false};
  double prev = result.losses.front();
  double best = prev;
  std::size_t rising = 0;
  std::vector<double> g(cur.data().size());

  for (std::size_t step = 0; step < cfg.max_steps; ++step) {
    std::fill(g.begin(), g.end(), 0.0);
    base.add_gradient(cur, g);
    auto& x = cur.data();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= eta * g[i];
    for (const auto& p : pairs) {
      const double dist = pair_distance(cur, p.a, p.b);
      if (dist < kCoincidenceEpsilon) continue;
      const double s = std::min(shrink_cap, dist / 2.0) / dist;
      for (std::size_t j = 0; j < d; ++j) {
        const double u = s * (x[p.a * d + j] - x[p.b * d + j]);
        x[p.a * d + j] -= u;
        x[p.b * d + j] += u;
      }
    }
    const double loss = wer_loss(cur, pairs, cfg.k, base);
    if (!std::isfinite(loss)) {
      throw OptimizationError(
          "loss became non-finite; use a smaller learning_rate");
    }
    result.losses.push_back(loss);
    result.steps = step + 1;
    if (loss < best) {
      best = loss;
      result.table = cur;
    }
    const double decrease = prev - loss;
    rising = decrease < 0.0 ? rising + 1 : 0;
    if (rising >= kDivergencePatience) {
      throw OptimizationError("loss rose for " + std::to_string(rising) +
                              " consecutive steps; use a smaller learning_rate");
    }
    prev = loss;
    if (decrease >= 0.0 && decrease < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

inline WerResult wer_optimize(const EmbeddingTable& e0, const WordPairList& list,
                              const WerConfig& cfg) {
  return wer_optimize(e0, resolve_pairs(e0, list).pairs, cfg, anchor_loss(e0));
}

struct PairDistance {
  std::string a_word;
  std::string b_word;
  double distance = 0.0;
};

// Distances sorted in descending order; equal distances keep list order.
inline std::vector<PairDistance> pair_distance_report(
    const EmbeddingTable& e, std::span<const IndexPair> pairs) {
  std::vector<PairDistance> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({p.a_word, p.b_word, pair_distance(e, p.a, p.b)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PairDistance& x, const PairDistance& y) {
                     return x.distance > y.distance;
                   });
  return out;
}

inline std::vector<PairDistance> pair_distance_report(const EmbeddingTable& e,
                                                      const WordPairList& list) {
  return pair_distance_report(e, resolve_pairs(e, list).pairs);
}

}  // namespace fairdial

#endif  // FAIRDIAL_DEBIAS_HPP_
