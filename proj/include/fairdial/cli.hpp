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

// The fairdial command line: build-corpus, audit, ztest, debias-cda and
// debias-wer. Exit status 0 on success, 1 on runtime failure, 2 on usage
// error, 3 when --fail-on-bias is set and the audit found a significant row.

#ifndef FAIRDIAL_CLI_HPP_
#define FAIRDIAL_CLI_HPP_

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdial/analyzers.hpp"
#include "fairdial/audit.hpp"
#include "fairdial/corpus.hpp"
#include "fairdial/debias.hpp"
#include "fairdial/error.hpp"
#include "fairdial/io.hpp"
#include "fairdial/lexicons.hpp"
#include "fairdial/parallel.hpp"
#include "fairdial/report.hpp"
#include "fairdial/responder.hpp"
#include "fairdial/stats.hpp"
#include "fairdial/wire.hpp"

#ifndef FAIRDIAL_DATA_DIR
#define FAIRDIAL_DATA_DIR "data/lexicons"
#endif

namespace fairdial::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBias = 3;

inline constexpr std::size_t kDefaultMaxPairs = 300000;

struct GlobalOptions {
  std::string lexicon_dir = FAIRDIAL_DATA_DIR;
  std::uint64_t seed = 0;
  std::size_t workers = default_workers();
};

struct NamedPairs {
  std::string name;
  WordPairList list;
};

// "gender" / "race" resolve to <lexicon-dir>/<name>_pairs.txt; anything else
// is a path, named after its file stem without a "_pairs" suffix.
inline NamedPairs resolve_pairs(const std::string& spec, const GlobalOptions& g) {
  namespace fs = std::filesystem;
  fs::path path(spec);
  std::string name;
  if (spec == "gender" || spec == "race") {
    name = spec;
    path = fs::path(g.lexicon_dir) / (spec + "_pairs.txt");
  } else {
    name = path.stem().string();
    if (name.ends_with("_pairs")) name.resize(name.size() - 6);
  }
  if (!fs::exists(path)) {
    throw ConfigurationError("pair list '" + path.string() + "' not found");
  }
  return {name, load_pair_list(path, name)};
}

// A lexicon name looked up in the lexicon dir, or a path.
inline AttributeLexicon resolve_lexicon(const std::string& spec,
                                        const GlobalOptions& g) {
  namespace fs = std::filesystem;
  fs::path path(spec);
  if (!fs::exists(path)) path = fs::path(g.lexicon_dir) / (spec + ".txt");
  if (!fs::exists(path)) {
    throw ConfigurationError("lexicon '" + spec + "' not found");
  }
  return load_attribute_list(path, fs::path(spec).stem().string());
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    const auto item = trim(std::string_view(s).substr(start, comma - start));
    if (!item.empty()) out.emplace_back(item);
    start = comma + 1;
  }
  return out;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// build-corpus

struct BuildCorpusOptions {
  std::string input;
  std::string output;
  std::string pairs = "gender";
  std::string mode = "context";
  std::size_t max_pairs = kDefaultMaxPairs;
};

inline int cmd_build_corpus(const BuildCorpusOptions& o, const GlobalOptions& g,
                            std::ostream& out, std::ostream& err) {
  const auto pairs = resolve_pairs(o.pairs, g);
  for (const auto& w : pairs.list.warnings()) err << "warning: " << w << '\n';
  auto in = open_input(o.input);
  UtteranceReader reader(in, o.mode == "dialogue" ? InputMode::kDialogue
                                                  : InputMode::kContext);
  const auto corpus = build_parallel_corpus(reader, pairs.list, o.max_pairs);
  auto file = open_output(o.output);
  write_corpus(file, corpus);
  file.close();
  if (!file) throw IoError("write failure on '" + o.output + "'");
  out << "built=" << corpus.stats.built
      << " skipped_no_match=" << corpus.stats.skipped_no_match
      << " skipped_mixed=" << corpus.stats.skipped_mixed << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// audit

struct AuditCliOptions {
  std::string corpus;
  std::string responder;
  std::string pairs = "gender";
  std::string format = "table";
  std::string output;
  double alpha = kDefaultAlpha;
  bool fail_on_bias = false;
  std::string offense = "unpleasant";
  std::string valence;
  std::string attributes;
  double timeout = 30.0;
  std::size_t repo_size = 0;
  std::string partial_dump;
  bool timestamp = false;
};

inline int cmd_audit(const AuditCliOptions& o, const GlobalOptions& g,
                     std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  const auto format = parse_report_format(o.format);
  check_alpha(o.alpha);
  std::string group = o.pairs;
  if (group != "gender" && group != "race") group = resolve_pairs(o.pairs, g).name;

  ParallelCorpus corpus;
  {
    auto in = open_input(o.corpus);
    corpus = read_corpus(in, group);
  }
  if (corpus.pairs.empty()) throw ValidationError("corpus '" + o.corpus + "' is empty");

  const auto timeout = std::chrono::milliseconds(
      static_cast<std::int64_t>(o.timeout * 1000.0));
  auto responder = make_responder(o.responder, g.seed, o.repo_size, timeout);

  const std::string valence_path =
      o.valence.empty() ? (fs::path(g.lexicon_dir) / "valence.txt").string()
                        : o.valence;
  const auto valence = load_valence_lexicon(valence_path);

  std::unique_ptr<OffenseDetector> detector;
  AuditOptions opt;
  if (o.offense.starts_with("external:")) {
    detector = std::make_unique<ExternalOffenseDetector>(std::make_unique<WireClient>(
        open_channel(o.offense.substr(9)), timeout));
  } else {
    std::string spec = o.offense;
    if (spec.starts_with("lexicon:")) spec = spec.substr(8);
    auto lex = resolve_lexicon(spec, g);
    opt.lexicon_notes.push_back("offense:" + lex.name() + ":" +
                                std::to_string(lex.size()));
    detector = std::make_unique<LexiconOffenseDetector>(std::move(lex));
  }

  std::vector<std::string> attr_specs = split_list(o.attributes);
  if (attr_specs.empty()) {
    if (group == "race") {
      attr_specs = {"pleasant", "unpleasant"};
    } else {
      attr_specs = {"career", "family"};
    }
  }
  for (const auto& s : attr_specs) {
    auto lex = resolve_lexicon(s, g);
    opt.lexicon_notes.push_back(lex.name() + ":" + std::to_string(lex.size()));
    opt.attributes.push_back(std::move(lex));
  }
  opt.lexicon_notes.push_back("valence:" + std::to_string(valence.size()));
  opt.alpha = o.alpha;
  opt.workers = g.workers;
  opt.valence = &valence;
  opt.offense = detector.get();
  if (o.timestamp) opt.timestamp = utc_timestamp();

  AuditReport report;
  try {
    report = run_audit(corpus, *responder, opt);
  } catch (const AuditAborted& e) {
    std::string dump = o.partial_dump;
    if (dump.empty()) {
      dump = o.output.empty() ? "fairdial-audit.partial.jsonl"
                              : o.output + ".partial.jsonl";
    }
    auto f = open_output(dump);
    write_partial_dump(f, e.partial());
    err << "error: " << e.what() << '\n';
    err << "partial results written to " << dump << '\n';
    return kExitRuntime;
  }

  const std::string text = render(report, format);
  if (o.output.empty()) {
    out << text;
  } else {
    auto f = open_output(o.output);
    f << text;
    f.close();
    if (!f) throw IoError("write failure on '" + o.output + "'");
  }
  if (o.fail_on_bias) {
    for (const auto& row : report.rows) {
      if (row.significant.value_or(false)) return kExitBias;
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ztest

struct ZtestOptions {
  std::string a;
  std::string b;
  double alpha = kDefaultAlpha;
  std::string format = "table";
};

inline int cmd_ztest(const ZtestOptions& o, std::ostream& out) {
  if (o.format != "table" && o.format != "records") {
    throw ConfigurationError("ztest format must be table or records");
  }
  std::vector<double> a;
  std::vector<double> b;
  {
    auto in = open_input(o.a);
    a = read_scores(in);
  }
  {
    auto in = open_input(o.b);
    b = read_scores(in);
  }
  const auto r = z_test(a, b, o.alpha);
  const std::string rel =
      r.relative_difference ? format_double(*r.relative_difference) : "n/a";
  if (o.format == "records") {
    nlohmann::json j;
    j["n"] = r.summary_a.n;
    j["mean_a"] = r.summary_a.mean;
    j["variance_a"] = r.summary_a.variance;
    j["mean_b"] = r.summary_b.mean;
    j["variance_b"] = r.summary_b.variance;
    j["z"] = detail::number_json(r.z);
    j["p"] = r.p_two_sided;
    j["alpha"] = r.alpha;
    j["reject_h0"] = r.reject_h0;
    j["relative_difference"] = detail::optional_json(r.relative_difference);
    j["degenerate"] = r.degenerate;
    out << j.dump() << '\n';
    return kExitOk;
  }
  out << "n=" << r.summary_a.n << '\n'
      << "mean_a=" << format_double(r.summary_a.mean)
      << " variance_a=" << format_double(r.summary_a.variance) << '\n'
      << "mean_b=" << format_double(r.summary_b.mean)
      << " variance_b=" << format_double(r.summary_b.variance) << '\n'
      << "z=" << (std::isinf(r.z) ? format_z(r.z) : format_double(r.z))
      << " p=" << format_double(r.p_two_sided)
      << " alpha=" << format_double(r.alpha)
      << " reject_h0=" << (r.reject_h0 ? "true" : "false") << '\n'
      << "relative_difference=" << rel << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// debias-cda

struct CdaOptions {
  std::string input;
  std::string output;
  std::string pairs = "gender";
};

inline int cmd_debias_cda(const CdaOptions& o, const GlobalOptions& g,
                          std::ostream& out, std::ostream& err) {
  std::vector<NamedPairs> named;
  for (const auto& spec : split_list(o.pairs)) named.push_back(resolve_pairs(spec, g));
  if (named.empty()) throw ConfigurationError("--pairs names no pair list");
  std::vector<const WordPairList*> lists;
  for (const auto& n : named) {
    for (const auto& w : n.list.warnings()) err << "warning: " << w << '\n';
    lists.push_back(&n.list);
  }
  auto in = open_input(o.input);
  auto file = open_output(o.output);
  const auto stats = cda_augment_stream(in, file, lists);
  file.close();
  if (!file) throw IoError("write failure on '" + o.output + "'");
  out << "input=" << stats.input << " augmented=" << stats.augmented
      << " output=" << stats.output() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// debias-wer

struct WerOptions {
  std::string embeddings;
  std::string output;
  std::string pairs = "gender";
  std::string report;
  WerConfig config;
  bool skip_missing = false;
};

inline int cmd_debias_wer(const WerOptions& o, const GlobalOptions& g,
                          std::ostream& out, std::ostream& err) {
  o.config.validate();
  const auto named = resolve_pairs(o.pairs, g);
  EmbeddingTable e0(1);
  {
    auto in = open_input(o.embeddings);
    e0 = load_embeddings(in);
  }
  const auto resolved = resolve_pairs(e0, named.list, o.skip_missing);
  for (const auto& w : resolved.warnings) err << "warning: " << w << '\n';
  const auto result =
      wer_optimize(e0, resolved.pairs, o.config, anchor_loss(e0));
  {
    auto file = open_output(o.output);
    save_embeddings(file, result.table);
  }
  if (!o.report.empty()) {
    std::map<std::pair<std::string, std::string>, double> before;
    for (const auto& d : pair_distance_report(e0, resolved.pairs)) {
      before[{d.a_word, d.b_word}] = d.distance;
    }
    auto file = open_output(o.report);
    file << "a\tb\tbefore\tafter\n";
    for (const auto& d : pair_distance_report(result.table, resolved.pairs)) {
      file << d.a_word << '\t' << d.b_word << '\t'
           << format_double(before[{d.a_word, d.b_word}]) << '\t'
           << format_double(d.distance) << '\n';
    }
  }
  out << "pairs=" << resolved.pairs.size() << " steps=" << result.steps
      << " converged=" << (result.converged ? "true" : "false")
      << " initial_loss=" << format_double(result.initial_loss())
      << " final_loss=" << format_double(result.final_loss()) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"fairdial: fairness audits and debiasing for dialogue systems"};
  app.set_help_all_flag("--help-all", "Print help for every subcommand");
  app.set_config("--config", "", "Read options from a TOML or INI file");
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--lexicon-dir", g.lexicon_dir,
                 "Directory holding the pair lists and lexicons")
      ->check(CLI::ExistingDirectory)
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for every random choice")
      ->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads for scoring")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  BuildCorpusOptions bc;
  auto* build = app.add_subcommand("build-corpus",
                                   "Build a parallel context corpus");
  build->add_option("--input", bc.input, "Contexts, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  build->add_option("--output", bc.output, "Corpus file to write (JSON lines)")
      ->required();
  build->add_option("--pairs", bc.pairs, "gender, race, or a pair-list file")
      ->capture_default_str();
  build->add_option("--mode", bc.mode,
                    "context: one context per line; dialogue: context<TAB>response")
      ->check(CLI::IsMember({"context", "dialogue"}))
      ->capture_default_str();
  build->add_option("--max-pairs", bc.max_pairs, "Stop after this many pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  AuditCliOptions au;
  auto* audit = app.add_subcommand("audit", "Audit a responder on a corpus");
  audit->add_option("--corpus", au.corpus, "Parallel corpus file")
      ->required()
      ->check(CLI::ExistingFile);
  audit->add_option("--responder", au.responder,
                    "echo | canned:<file> | retrieval:<file> | "
                    "external:<command or host:port>")
      ->required();
  audit->add_option("--pairs", au.pairs, "Group pair: gender, race, or a pair-list file")
      ->capture_default_str();
  audit->add_option("--format", au.format, "table | markdown | records")
      ->check(CLI::IsMember({"table", "markdown", "records"}))
      ->capture_default_str();
  audit->add_option("--output", au.output, "Report file (default: stdout)");
  audit->add_option("--alpha", au.alpha, "Significance level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  audit->add_flag("--fail-on-bias", au.fail_on_bias,
                  "Exit 3 when any measurement differs significantly");
  audit->add_option("--offense", au.offense,
                    "Offense detector: lexicon name or file, or external:<endpoint>")
      ->capture_default_str();
  audit->add_option("--valence", au.valence,
                    "Valence lexicon (default: <lexicon-dir>/valence.txt)");
  audit->add_option("--attributes", au.attributes,
                    "Comma-separated attribute lexicons (default per group pair)");
  audit->add_option("--timeout", au.timeout,
                    "Seconds to wait for an external reply")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  audit->add_option("--repo-size", au.repo_size,
                    "Sample this many retrieval candidates (0: all)")
      ->capture_default_str();
  audit->add_option("--partial-dump", au.partial_dump,
                    "Where to write partial results if the audit fails");
  audit->add_flag("--timestamp", au.timestamp,
                  "Record the run time in the report metadata");

  ZtestOptions zt;
  auto* ztest = app.add_subcommand("ztest", "Two-sample Z test on score files");
  ztest->add_option("--a", zt.a, "Group A scores, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  ztest->add_option("--b", zt.b, "Group B scores, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  ztest->add_option("--alpha", zt.alpha, "Significance level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  ztest->add_option("--format", zt.format, "table | records")
      ->check(CLI::IsMember({"table", "records"}))
      ->capture_default_str();

  CdaOptions cda;
  auto* cda_cmd = app.add_subcommand("debias-cda",
                                     "Counterpart data augmentation");
  cda_cmd->add_option("--input", cda.input, "Training pairs, context<TAB>response")
      ->required()
      ->check(CLI::ExistingFile);
  cda_cmd->add_option("--output", cda.output, "Augmented pairs to write")->required();
  cda_cmd->add_option("--pairs", cda.pairs,
                      "Comma-separated pair lists (gender, race, or files)")
      ->capture_default_str();

  WerOptions wer;
  auto* wer_cmd = app.add_subcommand("debias-wer",
                                     "Word embedding regularization");
  wer_cmd->add_option("--embeddings", wer.embeddings, "Embedding table (text)")
      ->required()
      ->check(CLI::ExistingFile);
  wer_cmd->add_option("--output", wer.output, "Optimized table to write")->required();
  wer_cmd->add_option("--pairs", wer.pairs, "gender, race, or a pair-list file")
      ->capture_default_str();
  wer_cmd->add_option("--k", wer.config.k, "Regularization coefficient")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  wer_cmd->add_option("--learning-rate", wer.config.learning_rate, "Step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  wer_cmd->add_option("--max-steps", wer.config.max_steps, "Step limit")
      ->capture_default_str();
  wer_cmd->add_option("--tolerance", wer.config.tolerance,
                      "Stop when a step lowers the loss by less than this")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  wer_cmd->add_option("--report", wer.report,
                      "Write per-pair distances before and after (TSV)");
  wer_cmd->add_flag("--skip-missing", wer.skip_missing,
                    "Skip pairs whose words have no embedding");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build) return cmd_build_corpus(bc, g, out, err);
    if (*audit) return cmd_audit(au, g, out, err);
    if (*ztest) return cmd_ztest(zt, out);
    if (*cda_cmd) return cmd_debias_cda(cda, g, out, err);
    if (*wer_cmd) return cmd_debias_wer(wer, g, out, err);
  } catch (const ConfigurationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace fairdial::cli

#endif  // FAIRDIAL_CLI_HPP_
