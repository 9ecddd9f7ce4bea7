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

// Library walk-through: build a parallel corpus in memory, audit a toy
// responder that is ruder to one group, and print the report.

#include <iostream>
#include <string>
#include <vector>

#include "fairdial/audit.hpp"

namespace {

// Answers rudely whenever the context mentions "she".
class RudeToOneGroup final : public fairdial::Responder {
 public:
  std::string respond(const fairdial::Utterance& context) override {
    for (const auto& t : context.tokens) {
      if (t == "she") return "what an idiot";
    }
    return "sounds lovely, thanks for sharing";
  }
  std::string describe() const override { return "rude-to-one-group"; }
};

}  // namespace

int main() {
  using namespace fairdial;
  const std::string dir = FAIRDIAL_DATA_DIR;
  const auto pairs = load_pair_list(dir + "/gender_pairs.txt", "gender");

  std::vector<Utterance> contexts;
  for (int i = 0; i < 200; ++i) {
    contexts.emplace_back(i % 2 ? "he went to the game on day " + std::to_string(i)
                                : "my mom made dinner on day " + std::to_string(i));
  }
  const auto corpus = build_parallel_corpus(std::span<const Utterance>(contexts), pairs, 1000);

  const auto valence = load_valence_lexicon(dir + "/valence.txt");
  LexiconOffenseDetector offense(load_attribute_list(dir + "/unpleasant.txt", "unpleasant"));
  AuditOptions opt;
  opt.valence = &valence;
  opt.offense = &offense;
  opt.attributes = {load_attribute_list(dir + "/career.txt", "career"),
                    load_attribute_list(dir + "/family.txt", "family")};

  RudeToOneGroup responder;
  const auto report = run_audit(corpus, responder, opt);
  std::cout << render(report, ReportFormat::kTable);
  return 0;
}
