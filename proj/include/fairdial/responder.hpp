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

// Dialogue models under audit: context in, response out.
//
//   echo                 returns the context
//   canned:<file>        exact lookup in a context<TAB>response table
//   retrieval:<file>     bag-of-words cosine retrieval over a repository
//   external:<endpoint>  line protocol to a subprocess or TCP server

#ifndef FAIRDIAL_RESPONDER_HPP_
#define FAIRDIAL_RESPONDER_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairdial/corpus.hpp"
#include "fairdial/error.hpp"
#include "fairdial/io.hpp"
#include "fairdial/parallel.hpp"
#include "fairdial/tokenize.hpp"
#include "fairdial/wire.hpp"

namespace fairdial {

class Responder {
 public:
  virtual ~Responder() = default;
  virtual std::string respond(const Utterance& context) = 0;
  virtual std::string describe() const = 0;
  // Whether respond() may run on several threads at once.
  virtual bool parallel_safe() const { return true; }
};

class EchoResponder final : public Responder {
 public:
  std::string respond(const Utterance& context) override { return context.text; }
  std::string describe() const override { return "echo"; }
};

// Lookup keyed on the tokenized context, so case and spacing do not matter.
class CannedResponder final : public Responder {
 public:
  CannedResponder(std::unordered_map<std::string, std::string> table,
                  std::string fallback, std::string label = "canned")
      : table_(std::move(table)),
        fallback_(std::move(fallback)),
        label_(std::move(label)) {}

  static std::string key_of(std::string_view text) {
    return join_tokens(tokenize(text));
  }

  std::string respond(const Utterance& context) override {
    const auto it = table_.find(join_tokens(context.tokens));
    return it == table_.end() ? fallback_ : it->second;
  }

  std::string describe() const override { return label_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, std::string> table_;
  std::string fallback_;
  std::string label_;
};

// context<TAB>response per line; a context of "*" sets the fallback reply
// (empty when absent). The first entry for a context wins.
inline CannedResponder load_canned(std::istream& in, std::string label = "canned") {
  std::unordered_map<std::string, std::string> table;
  std::string fallback;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("expected context<TAB>response", line_no);
    }
    const std::string_view ctx = trim(std::string_view(line).substr(0, tab));
    std::string reply = line.substr(tab + 1);
    if (ctx == "*") {
      fallback = std::move(reply);
    } else {
      table.try_emplace(CannedResponder::key_of(ctx), std::move(reply));
    }
  }
  return CannedResponder(std::move(table), std::move(fallback), std::move(label));
}

// Candidate responses, optionally each paired with the context it answered.
// In paired mode retrieval matches against the stored contexts and returns
// the paired response.
struct ResponseRepository {
  std::vector<Utterance> keys;
  std::vector<std::string> responses;
  bool paired = false;

  std::size_t size() const { return keys.size(); }
};

// Plain mode: one candidate per line. Paired mode: context<TAB>response per
// line. The first non-blank line decides the mode.
inline ResponseRepository load_repository(std::istream& in) {
  ResponseRepository repo;
  std::optional<bool> paired;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    const bool has_tab = tab != std::string::npos;
    if (!paired) paired = has_tab;
    if (*paired != has_tab) {
      throw ParseError(*paired ? "expected context<TAB>response"
                               : "unexpected tab in a plain repository",
                       line_no);
    }
    if (has_tab) {
      repo.keys.emplace_back(line.substr(0, tab));
      repo.responses.push_back(line.substr(tab + 1));
    } else {
      repo.keys.emplace_back(line);
      repo.responses.push_back(line);
    }
  }
  if (in.bad()) throw IoError("read failure after line " + std::to_string(line_no));
  repo.paired = paired.value_or(false);
  return repo;
}

// Uniform integer in [0, bound) from raw 64-bit draws, by rejection, so the
// sequence is the same on every standard library.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// k distinct indices of [0, n) chosen uniformly, returned in increasing order.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                               std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k >= n) return idx;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline ResponseRepository sample_repository(const ResponseRepository& repo,
                                            std::size_t k, std::uint64_t seed) {
  ResponseRepository out;
  out.paired = repo.paired;
  for (const std::size_t i : sample_indices(repo.size(), k, seed)) {
    out.keys.push_back(repo.keys[i]);
    out.responses.push_back(repo.responses[i]);
  }
  return out;
}

// Term-frequency cosine retrieval with an inverted index. Ties, including
// the all-zero case, go to the lowest candidate index.
class RetrievalResponder final : public Responder {
 public:
  explicit RetrievalResponder(ResponseRepository repo,
                              std::string label = "retrieval")
      : repo_(std::move(repo)), label_(std::move(label)) {
    if (repo_.size() == 0) {
      throw ConfigurationError("retrieval repository is empty");
    }
    norms_.resize(repo_.size(), 0.0);
    for (std::size_t i = 0; i < repo_.size(); ++i) {
      std::map<std::string_view, std::uint32_t> tf;
      for (const auto& t : repo_.keys[i].tokens) ++tf[t];
      double sq = 0.0;
      for (const auto& [term, count] : tf) {
        postings_[std::string(term)].push_back({i, count});
        sq += static_cast<double>(count) * count;
      }
      norms_[i] = std::sqrt(sq);
    }
  }

  std::size_t best_index(const Utterance& context) const {
    std::map<std::string_view, std::uint32_t> tf;
    for (const auto& t : context.tokens) ++tf[t];
    double qsq = 0.0;
    std::unordered_map<std::size_t, double> dot;
    for (const auto& [term, count] : tf) {
      qsq += static_cast<double>(count) * count;
      const auto it = postings_.find(std::string(term));
      if (it == postings_.end()) continue;
      for (const auto& p : it->second) {
        dot[p.candidate] += static_cast<double>(count) * p.count;
      }
    }
    std::size_t best = 0;
    double best_score = 0.0;
    if (qsq == 0.0) return best;
    const double qnorm = std::sqrt(qsq);
    for (const auto& [i, d] : dot) {
      const double score = d / (qnorm * norms_[i]);
      if (score > best_score || (score == best_score && i < best)) {
        best = i;
        best_score = score;
      }
    }
    return best;
  }

  std::string respond(const Utterance& context) override {
    return repo_.responses[best_index(context)];
  }

  std::string describe() const override { return label_; }
  const ResponseRepository& repository() const { return repo_; }

 private:
  struct Posting {
    std::size_t candidate;
    std::uint32_t count;
  };

  ResponseRepository repo_;
  std::string label_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
};

class ExternalResponder final : public Responder {
 public:
  explicit ExternalResponder(std::unique_ptr<WireClient> client)
      : client_(std::move(client)) {}

  std::string respond(const Utterance& context) override {
    try {
      return client_->request_text(context.text);
    } catch (const ProtocolError& e) {
      throw ResponderError(std::string("external responder failed: ") + e.what());
    }
  }

  std::string describe() const override {
    return "external:" + client_->describe();
  }

  bool parallel_safe() const override { return false; }

 private:
  std::unique_ptr<WireClient> client_;
};

// Raised by respond_batch; carries the replies obtained before the failure.
class BatchError : public ResponderError {
 public:
  BatchError(const std::string& what, std::size_t index,
             std::vector<std::optional<std::string>> partial)
      : ResponderError(what), index_(index), partial_(std::move(partial)) {}

  std::size_t index() const { return index_; }
  const std::vector<std::optional<std::string>>& partial() const {
    return partial_;
  }

 private:
  std::size_t index_;
  std::vector<std::optional<std::string>> partial_;
};

// Order-preserving map of respond() over the contexts. Responders that are
// not parallel_safe run sequentially regardless of `workers`.
inline std::vector<std::string> respond_batch(Responder& responder,
                                              std::span<const Utterance> contexts,
                                              std::size_t workers = 1) {
  if (contexts.empty()) throw ContractViolation("respond_batch needs contexts");
  if (!responder.parallel_safe()) workers = 1;
  std::vector<std::optional<std::string>> out(contexts.size());
  const auto failure = parallel_for(contexts.size(), workers, [&](std::size_t i) {
    out[i] = responder.respond(contexts[i]);
  });
  if (failure) {
    std::string what;
    try {
      std::rethrow_exception(failure->error);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
      what = "unknown error";
    }
    throw BatchError("context " + std::to_string(failure->index) + ": " + what,
                     failure->index, std::move(out));
  }
  std::vector<std::string> replies;
  replies.reserve(out.size());
  for (auto& r : out) replies.push_back(std::move(*r));
  return replies;
}

// Builds a responder from "echo", "canned:<file>", "retrieval:<file>" or
// "external:<command or host:port>". repo_size > 0 samples that many
// repository entries with `seed`.
inline std::unique_ptr<Responder> make_responder(
    const std::string& spec, std::uint64_t seed = 0, std::size_t repo_size = 0,
    Millis timeout = kDefaultWireTimeout) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "echo" && colon == std::string::npos) {
    return std::make_unique<EchoResponder>();
  }
  if (arg.empty()) {
    throw ConfigurationError("bad responder spec '" + spec + "'");
  }
  if (kind == "canned") {
    auto in = open_input(arg);
    return std::make_unique<CannedResponder>(load_canned(in, spec));
  }
  if (kind == "retrieval") {
    auto in = open_input(arg);
    auto repo = load_repository(in);
    std::string label = spec;
    if (repo_size > 0) {
      repo = sample_repository(repo, repo_size, seed);
      label += " (sampled " + std::to_string(repo.size()) + ")";
    }
    return std::make_unique<RetrievalResponder>(std::move(repo), label);
  }
  if (kind == "external") {
    return std::make_unique<ExternalResponder>(
        std::make_unique<WireClient>(open_channel(arg), timeout));
  }
  throw ConfigurationError("unknown responder kind '" + kind + "'");
}

}  // namespace fairdial

#endif  // FAIRDIAL_RESPONDER_HPP_
