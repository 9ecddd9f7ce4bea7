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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails. Tolerances and time budgets are pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdial/analyzers.hpp"
#include "fairdial/corpus.hpp"
#include "fairdial/debias.hpp"
#include "fairdial/report.hpp"
#include "fairdial/stats.hpp"
#include "test_support.hpp"

namespace {

using namespace fairdial;
using fairdial::testing::fixture;
using fairdial::testing::run_cli;
using fairdial::testing::TempDir;

std::string data(const std::string& name) {
  return std::string(FAIRDIAL_DATA_DIR) + "/" + name;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome substitution_fidelity() {
  Outcome o;
  const auto gender = load_pair_list(data("gender_pairs.txt"), "gender");
  const auto g = substitute(Utterance("Hahaha, he has a really cute laugh and smile:d"),
                            gender, Direction::kAToB);
  o.check(g.context_b.text == "Hahaha, she has a really cute laugh and smile:d",
          "gender pair: " + g.context_b.text);

  // Only the highlighted "this" changes in the example pair; the shipped
  // race list would also turn "the" into "da".
  const auto race = load_pair_list(data("race_pairs.txt"), "race");
  const auto idx = race.first_with("this", false);
  o.check(idx.has_value(), "race list lacks 'this'");
  if (idx) {
    const WordPairList highlighted("race", {race.pairs()[*idx]});
    const auto r = substitute(
        Utterance("Oh my god, for real, what is with this music during the downtime."),
        highlighted, Direction::kAToB);
    o.check(r.context_b.text ==
                "Oh my god, for real, what is with dis music during the downtime.",
            "race pair: " + r.context_b.text);
    o.check(verify_pair(r), "race pair fails verification");
  }
  if (o.pass) o.detail = "he->she and this->dis reproduce byte-exactly";
  return o;
}

Outcome difference_column() {
  Outcome o;
  const auto a = format_difference(relative_difference(0.193, 0.190));
  const auto b = format_difference(relative_difference(36.763, 40.098));
  o.check(a == "+1.6%", "got " + a);
  o.check(b == "-9.1%", "got " + b);
  if (o.pass) o.detail = a + " and " + b;
  return o;
}

SampleSummary two_pass(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  const double mean = s / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {xs.size(), mean, ss / static_cast<double>(xs.size() - 1)};
}

// 1 - 2 * integral_0^|z| phi(t) dt by composite Simpson.
double quadrature_p(double z) {
  const double a = std::fabs(z);
  if (a > 12.0) return 0.0;
  const int steps = 20000;
  const double h = a / steps;
  auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
  double acc = pdf(0.0) + pdf(a);
  for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * pdf(i * h);
  return 1.0 - 2.0 * acc * h / 3.0;
}

Outcome ztest_correctness() {
  Outcome o;
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> shift(-0.15, 0.15);
  std::uniform_real_distribution<double> spread(0.5, 2.0);
  double worst_z = 0.0;
  double worst_p = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::normal_distribution<double> da(0.0, spread(rng));
    std::normal_distribution<double> db(shift(rng), spread(rng));
    std::vector<double> a(1000);
    std::vector<double> b(1000);
    for (auto& x : a) x = da(rng);
    for (auto& x : b) x = db(rng);
    const auto sa = two_pass(a);
    const auto sb = two_pass(b);
    const double z = (sa.mean - sb.mean) / std::sqrt(sa.variance / 1000 + sb.variance / 1000);
    const auto r = z_test(a, b);
    worst_z = std::max(worst_z, std::fabs(r.z - z));
    worst_p = std::max(worst_p, std::fabs(r.p_two_sided - quadrature_p(z)));
  }
  o.check(worst_z <= 1e-6, "max |dz| = " + fmt(worst_z));
  o.check(worst_p <= 1e-6, "max |dp| = " + fmt(worst_p));
  const std::vector<double> same{0.2, 0.4, 0.9, 0.1};
  const auto id = z_test(same, same);
  o.check(id.z == 0.0 && id.p_two_sided == 1.0, "identical samples");
  if (o.pass) o.detail = "max |dz|=" + fmt(worst_z) + " max |dp|=" + fmt(worst_p);
  return o;
}

double rejection_rate(double pa, double pb, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution da(pa);
  std::bernoulli_distribution db(pb);
  std::vector<double> a(10000);
  std::vector<double> b(10000);
  int rejected = 0;
  for (int t = 0; t < trials; ++t) {
    for (auto& x : a) x = da(rng);
    for (auto& x : b) x = db(rng);
    rejected += z_test(a, b, 0.05).reject_h0;
  }
  return static_cast<double>(rejected) / trials;
}

Outcome calibration_and_power() {
  Outcome o;
  const double null_rate = rejection_rate(0.3, 0.3, 1000, 2718);
  const double power = rejection_rate(0.36, 0.40, 200, 1618);
  o.check(null_rate >= 0.03 && null_rate <= 0.07, "null rejection " + fmt(null_rate));
  o.check(power > 0.99, "power " + fmt(power));
  if (o.pass) o.detail = "null rejection " + fmt(null_rate) + ", power " + fmt(power);
  return o;
}

Outcome diversity_metric() {
  Outcome o;
  std::mt19937_64 rng(99);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"};
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> responses(1, 40);
  std::uniform_int_distribution<int> length(0, 10);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Utterance> u;
    std::set<std::string> uni;
    std::set<std::pair<std::string, std::string>> bi;
    std::size_t total = 0;
    const int n = responses(rng);
    for (int r = 0; r < n; ++r) {
      std::vector<std::string> ws(static_cast<std::size_t>(length(rng)));
      std::string text;
      for (auto& w : ws) {
        w = vocab[word(rng)];
        text += w + " ";
      }
      for (std::size_t k = 0; k < ws.size(); ++k) {
        uni.insert(ws[k]);
        if (k + 1 < ws.size()) bi.insert({ws[k], ws[k + 1]});
      }
      total += ws.size();
      u.emplace_back(text);
    }
    if (total == 0) continue;
    const auto d = diversity(u);
    const double d1 = static_cast<double>(uni.size()) / static_cast<double>(total);
    const double d2 = static_cast<double>(bi.size()) / static_cast<double>(total);
    if (d.distinct1 != d1 || d.distinct2 != d2) {
      o.check(false, "corpus " + std::to_string(trial));
      break;
    }
    ++checked;
  }
  const double hand = diversity(std::vector<Utterance>{Utterance("a b"), Utterance("a c")}).diversity;
  o.check(hand == 0.625, "hand case " + fmt(hand));
  if (o.pass) o.detail = std::to_string(checked) + " corpora exact, hand case 0.625";
  return o;
}

Outcome sentiment_thresholds() {
  Outcome o;
  o.check(sentiment_label(0.8) == SentimentLabel::kNeutral, "0.8");
  o.check(sentiment_label(-0.8) == SentimentLabel::kNeutral, "-0.8");
  o.check(sentiment_label(0.81) == SentimentLabel::kPositive, "0.81");
  o.check(sentiment_label(-0.81) == SentimentLabel::kNegative, "-0.81");
  o.check(sentiment_label(std::nextafter(0.8, 1.0)) == SentimentLabel::kPositive, "0.8+ulp");
  if (o.pass) o.detail = "0.8 neutral, 0.81 positive, -0.81 negative";
  return o;
}

// Whether any n-gram of the text is a listed phrase on either side.
bool mentions_listed_term(const Utterance& u, const WordPairList& list) {
  const auto& t = u.tokens;
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::string phrase;
    for (std::size_t n = 1; n <= list.max_phrase_length() && i + n <= t.size(); ++n) {
      phrase += (n > 1 ? " " : "") + t[i + n - 1];
      if (list.first_with(phrase, false) || list.first_with(phrase, true)) return true;
    }
  }
  return false;
}

std::optional<double> offense_difference(const std::string& records) {
  std::istringstream in(records);
  const auto rep = parse_records(in);
  for (const auto& row : rep.rows) {
    if (row.measurement == "offense") return row.relative_difference;
  }
  return std::nullopt;
}

Outcome cda() {
  Outcome o;
  const auto gender = load_pair_list(data("gender_pairs.txt"), "gender");
  const std::vector<const WordPairList*> lists{&gender};
  std::vector<TrainingPair> in;
  {
    std::ifstream f(fixture("biased_training.tsv"));
    in = read_training_pairs(f);
  }
  std::size_t matched = 0;
  for (const auto& p : in) {
    matched += mentions_listed_term(p.context, gender) || mentions_listed_term(p.response, gender);
  }
  const auto once = cda_augment(in, lists);
  o.check(in.size() == 1000, "fixture has " + std::to_string(in.size()) + " pairs");
  o.check(once.size() == in.size() + matched,
          "output " + std::to_string(once.size()) + " != " + std::to_string(in.size()) + " + " +
              std::to_string(matched));
  auto as_set = [](const std::vector<TrainingPair>& v) {
    std::set<std::pair<std::string, std::string>> s;
    for (const auto& p : v) s.emplace(p.context.text, p.response.text);
    return s;
  };
  o.check(as_set(once) == as_set(cda_augment(once, lists)), "re-augmentation added pairs");

  TempDir dir;
  const auto build = run_cli({"build-corpus", "--input", fixture("contexts_1000.txt").string(),
                              "--output", dir.file("corpus.jsonl")});
  o.check(build.code == 0, "build-corpus: " + build.err);
  const auto aug = run_cli({"debias-cda", "--input", fixture("biased_training.tsv").string(),
                            "--output", dir.file("augmented.tsv")});
  o.check(aug.code == 0, "debias-cda: " + aug.err);
  auto audit = [&](const std::string& repo) {
    const auto r = run_cli({"audit", "--corpus", dir.file("corpus.jsonl"), "--responder",
                            "retrieval:" + repo, "--format", "records"});
    o.check(r.code == 0, "audit: " + r.err);
    return r.code == 0 ? offense_difference(r.out) : std::nullopt;
  };
  const auto before = audit(fixture("biased_training.tsv").string());
  const auto after = audit(dir.file("augmented.tsv"));
  o.check(before.has_value() && after.has_value(), "offense difference undefined");
  if (before && after) {
    o.check(std::fabs(*after) < std::fabs(*before),
            "|diff| " + fmt(*before) + " -> " + fmt(*after));
    if (o.pass) {
      o.detail = std::to_string(in.size()) + " + " + std::to_string(matched) +
                 " pairs, closed; offense |diff| " + fmt(std::fabs(*before)) + " -> " +
                 fmt(std::fabs(*after));
    }
  }
  return o;
}

Outcome wer() {
  Outcome o;
  EmbeddingTable e0(2);
  e0.add("he", std::vector<double>{1.0, 0.0});
  e0.add("she", std::vector<double>{-1.0, 0.0});
  const std::vector<IndexPair> pair{{0, 1, "he", "she"}};
  std::string detail;
  for (const double k : {0.5, 4.0}) {
    WerConfig cfg;
    cfg.k = k;
    const auto r = wer_optimize(e0, pair, cfg, anchor_loss(e0));
    const double target = k == 0.5 ? 0.75 : 0.0;
    const double ta = r.table.row(0)[0];
    const double tb = r.table.row(1)[0];
    o.check(std::fabs(ta - target) <= 1e-3 && std::fabs(tb + target) <= 1e-3,
            "k=" + fmt(k) + " reached " + fmt(ta) + ", " + fmt(tb));
    for (std::size_t i = 1; i < r.losses.size(); ++i) {
      if (r.losses[i] > r.losses[i - 1] + 1e-9) {
        o.check(false, "loss rose at step " + std::to_string(i));
        break;
      }
    }
    detail += "k=" + fmt(k) + " t=" + fmt(ta) + " ";
  }

  // Finite differences at random points of a random problem.
  std::mt19937_64 rng(55);
  std::normal_distribution<double> nd;
  auto random_table = [&] {
    EmbeddingTable t(5);
    for (int w = 0; w < 12; ++w) {
      std::vector<double> v(5);
      for (auto& x : v) x = nd(rng);
      t.add("w" + std::to_string(w), v);
    }
    return t;
  };
  std::vector<IndexPair> pairs;
  for (std::size_t i = 0; i < 12; i += 2) pairs.push_back({i, i + 1, "", ""});
  const auto base = anchor_loss(random_table());
  double worst = 0.0;
  for (int point = 0; point < 100; ++point) {
    auto t = random_table();
    const auto g = wer_gradient(t, pairs, 0.5, base);
    for (std::size_t i = 0; i < t.data().size(); ++i) {
      const double x = t.data()[i];
      const double h = 1e-6;
      t.data()[i] = x + h;
      const double up = wer_loss(t, pairs, 0.5, base);
      t.data()[i] = x - h;
      const double down = wer_loss(t, pairs, 0.5, base);
      t.data()[i] = x;
      const double rel = std::fabs((up - down) / (2 * h) - g[i]) / std::max(1.0, std::fabs(g[i]));
      worst = std::max(worst, rel);
    }
  }
  o.check(worst <= 1e-5, "gradient error " + fmt(worst));
  if (o.pass) o.detail = detail + "gradient rel err " + fmt(worst);
  return o;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

Outcome determinism() {
  Outcome o;
  TempDir dir;
  const auto build = run_cli({"build-corpus", "--input", fixture("contexts_1000.txt").string(),
                              "--output", dir.file("corpus.jsonl")});
  o.check(build.code == 0, "build-corpus: " + build.err);
  const std::string golden = read_file(fixture("golden_report_1000.txt"));
  for (const char* workers : {"1", "8", "1", "8"}) {
    const auto r = run_cli({"--workers", workers, "audit", "--corpus", dir.file("corpus.jsonl"),
                            "--responder",
                            "retrieval:" + fixture("retrieval_repo.txt").string()});
    o.check(r.code == 0, "audit: " + r.err);
    o.check(replace_all(r.out, FAIRDIAL_FIXTURE_DIR, "@FIXTURES@") == golden,
            std::string("workers=") + workers + " differs from golden");
  }
  if (o.pass) o.detail = "4 runs (workers 1 and 8) byte-identical to golden";
  return o;
}

Outcome wire_protocol() {
  Outcome o;
  TempDir dir;
  const auto build = run_cli({"build-corpus", "--input", fixture("contexts_1000.txt").string(),
                              "--output", dir.file("corpus.jsonl"), "--max-pairs", "250"});
  o.check(build.code == 0, "build-corpus: " + build.err);
  const std::string script = fairdial::testing::python() + " " + fixture("fake_model.py").string();
  const auto ok = run_cli({"audit", "--corpus", dir.file("corpus.jsonl"), "--responder",
                           "external:" + script + " echo", "--format", "records"});
  o.check(ok.code == 0 && ok.err.empty(), "echo audit: code " + std::to_string(ok.code) + " " + ok.err);
  std::size_t n = 0;
  if (ok.code == 0) {
    std::istringstream in(ok.out);
    n = parse_records(in).metadata.n;
    o.check(n == 250, "audited " + std::to_string(n) + " pairs");
  }
  const std::string dump = dir.file("partial.jsonl");
  const auto bad = run_cli({"audit", "--corpus", dir.file("corpus.jsonl"), "--responder",
                            "external:" + script + " garble-after 100", "--partial-dump", dump});
  o.check(bad.code == 1, "malformed server exit " + std::to_string(bad.code));
  std::size_t scored = 0;
  if (std::filesystem::exists(dump)) {
    std::ifstream f(dump);
    std::string head;
    std::getline(f, head);
    const auto j = nlohmann::json::parse(head);
    scored = j.value("scored", std::size_t{0});
    o.check(j.value("type", "") == "partial" && scored == 100, "dump header " + head);
  } else {
    o.check(false, "no partial dump");
  }
  if (o.pass) {
    o.detail = std::to_string(2 * n) + " contexts over the wire; malformed reply -> exit 1, " +
               std::to_string(scored) + " partial scores dumped";
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "substitution fidelity", 1.0, substitution_fidelity},
      {2, "difference column", 1.0, difference_column},
      {3, "z-test correctness", 10.0, ztest_correctness},
      {4, "calibration and power", 120.0, calibration_and_power},
      {5, "diversity metric", 30.0, diversity_metric},
      {6, "sentiment thresholds", 1.0, sentiment_thresholds},
      {7, "counterpart data augmentation", 60.0, cda},
      {8, "word embedding regularization", 30.0, wer},
      {9, "end-to-end determinism", 60.0, determinism},
      {10, "wire protocol", 60.0, wire_protocol},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_seconds) {
      out.check(false, "took " + fmt(secs) + " s, budget " + fmt(c.budget_seconds) + " s");
    }
    failed += !out.pass;
    std::printf("%s %d %s (%.2fs/%gs): %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget_seconds, out.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
