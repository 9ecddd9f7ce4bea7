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

// The audit pipeline: respond to both sides of every parallel context pair,
// score the responses and compare the groups.

#ifndef FAIRDIAL_AUDIT_HPP_
#define FAIRDIAL_AUDIT_HPP_

#include <cstddef>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdial/analyzers.hpp"
#include "fairdial/corpus.hpp"
#include "fairdial/error.hpp"
#include "fairdial/parallel.hpp"
#include "fairdial/report.hpp"
#include "fairdial/responder.hpp"

namespace fairdial {

struct AuditOptions {
  double alpha = kDefaultAlpha;
  std::size_t workers = 1;
  const ValenceLexicon* valence = nullptr;
  OffenseDetector* offense = nullptr;
  std::vector<AttributeLexicon> attributes;
  std::optional<GroupLabels> labels;  // defaults from the group pair name
  std::vector<std::string> lexicon_notes;  // copied into the report metadata
  std::optional<std::string> timestamp;
};

inline ResponseRecord score_response(const std::string& raw,
                                     const AuditOptions& opt) {
  ResponseRecord r;
  r.response = Utterance(normalize_response(raw));
  r.offense = opt.offense->label(r.response.text);
  r.sentiment = sentiment_score(r.response.text, *opt.valence);
  r.attribute_counts.reserve(opt.attributes.size());
  for (const auto& lex : opt.attributes) {
    r.attribute_counts.push_back(attribute_count(r.response.text, lex));
  }
  return r;
}

// What was obtained before an audit failed, one entry per context: side A
// contexts first, then side B.
struct PartialAudit {
  std::string error;
  std::string stage;  // "respond" or "score"
  std::size_t failed_index = 0;
  std::vector<std::string> contexts;
  std::vector<std::optional<std::string>> responses;
  std::vector<std::optional<ResponseRecord>> records;
  std::vector<std::string> attribute_names;
};

class AuditAborted : public Error {
 public:
  explicit AuditAborted(PartialAudit partial)
      : Error("audit aborted during " + partial.stage + ": " + partial.error),
        partial_(std::move(partial)) {}

  const PartialAudit& partial() const { return partial_; }

 private:
  PartialAudit partial_;
};

// JSON lines: a header record, then one record per context.
inline void write_partial_dump(std::ostream& out, const PartialAudit& p) {
  const std::size_t n = p.contexts.size() / 2;
  std::size_t answered = 0;
  std::size_t scored = 0;
  for (const auto& r : p.responses) answered += r.has_value();
  for (const auto& r : p.records) scored += r.has_value();
  nlohmann::json head;
  head["type"] = "partial";
  head["stage"] = p.stage;
  head["error"] = p.error;
  head["failed_index"] = p.failed_index;
  head["total"] = p.contexts.size();
  head["responded"] = answered;
  head["scored"] = scored;
  out << head.dump() << '\n';
  for (std::size_t i = 0; i < p.contexts.size(); ++i) {
    nlohmann::json j;
    j["type"] = "response";
    j["pair"] = i % n;
    j["side"] = i < n ? "a" : "b";
    j["context"] = p.contexts[i];
    j["response"] = p.responses[i] ? nlohmann::json(*p.responses[i])
                                   : nlohmann::json(nullptr);
    if (p.records[i]) {
      const auto& r = *p.records[i];
      j["offense"] = r.offense;
      j["sentiment"] = r.sentiment;
      nlohmann::json attrs = nlohmann::json::object();
      for (std::size_t k = 0; k < p.attribute_names.size(); ++k) {
        attrs[p.attribute_names[k]] = r.attribute_counts[k];
      }
      j["attributes"] = std::move(attrs);
    }
    out << j.dump() << '\n';
  }
}

namespace detail {

inline std::string exception_text(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const std::exception& x) {
    return x.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace detail

// Responses and scores are stored by index, so the report does not depend on
// the worker count. Responder or detector failures raise AuditAborted.
inline AuditReport run_audit(const ParallelCorpus& corpus, Responder& responder,
                             const AuditOptions& opt) {
  if (opt.valence == nullptr || opt.offense == nullptr) {
    throw ContractViolation("audit needs a valence lexicon and an offense detector");
  }
  if (corpus.pairs.empty()) throw ContractViolation("audit needs a non-empty corpus");
  const std::size_t n = corpus.pairs.size();
  std::vector<Utterance> contexts;
  contexts.reserve(2 * n);
  for (const auto& p : corpus.pairs) contexts.push_back(p.context_a);
  for (const auto& p : corpus.pairs) contexts.push_back(p.context_b);

  std::vector<std::string> names;
  for (const auto& lex : opt.attributes) names.push_back(lex.name());

  PartialAudit partial;
  partial.attribute_names = names;
  for (const auto& c : contexts) partial.contexts.push_back(c.text);
  partial.records.resize(2 * n);

  auto score_available = [&](std::size_t workers) {
    if (!opt.offense->parallel_safe()) workers = 1;
    return parallel_for(2 * n, workers, [&](std::size_t i) {
      if (partial.responses[i]) {
        partial.records[i] = score_response(*partial.responses[i], opt);
      }
    });
  };

  std::vector<std::string> replies;
  try {
    replies = respond_batch(responder, contexts, opt.workers);
  } catch (const BatchError& e) {
    partial.stage = "respond";
    partial.error = e.what();
    partial.failed_index = e.index();
    partial.responses = e.partial();
    score_available(opt.workers);  // best effort for the post-mortem
    throw AuditAborted(std::move(partial));
  }
  partial.responses.assign(replies.begin(), replies.end());

  if (const auto failure = score_available(opt.workers)) {
    partial.stage = "score";
    partial.error = detail::exception_text(failure->error);
    partial.failed_index = failure->index;
    throw AuditAborted(std::move(partial));
  }

  std::vector<ResponseRecord> a;
  std::vector<ResponseRecord> b;
  a.reserve(n);
  b.reserve(n);
  for (std::size_t i = 0; i < n; ++i) a.push_back(std::move(*partial.records[i]));
  for (std::size_t i = n; i < 2 * n; ++i) b.push_back(std::move(*partial.records[i]));

  ReportMetadata meta;
  meta.alpha = opt.alpha;
  meta.responder = responder.describe();
  meta.offense_detector = opt.offense->describe();
  meta.lexicons = opt.lexicon_notes;
  meta.timestamp = opt.timestamp;
  return build_report(corpus.group_pair_name,
                      opt.labels.value_or(labels_for(corpus.group_pair_name)), a,
                      b, names, std::move(meta));
}

}  // namespace fairdial

#endif  // FAIRDIAL_AUDIT_HPP_
