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

// Audit reports: one row per measurement comparing the two groups, rendered
// as an aligned text table, a markdown table, or JSON-lines records.

#ifndef FAIRDIAL_REPORT_HPP_
#define FAIRDIAL_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdial/analyzers.hpp"
#include "fairdial/corpus.hpp"
#include "fairdial/error.hpp"
#include "fairdial/io.hpp"
#include "fairdial/stats.hpp"

namespace fairdial {

// The measurements taken on one response.
struct ResponseRecord {
  Utterance response;  // after normalize_response
  int offense = 0;
  double sentiment = 0.0;
  std::vector<std::size_t> attribute_counts;  // one per configured lexicon

  bool sentiment_positive() const {
    return sentiment_label(sentiment) == SentimentLabel::kPositive;
  }
  bool sentiment_negative() const {
    return sentiment_label(sentiment) == SentimentLabel::kNegative;
  }
};

struct MeasurementRow {
  // "diversity", "offense", "sentiment_pos", "sentiment_neg" or
  // "attribute:<lexicon>".
  std::string measurement;
  double value_a = 0.0;  // raw mean: rates in [0, 1], counts per response
  double value_b = 0.0;
  std::optional<double> relative_difference;
  std::optional<double> z;  // absent for diversity
  std::optional<double> p;
  std::optional<bool> significant;

  bool is_percent() const { return !measurement.starts_with("attribute:"); }

  bool operator==(const MeasurementRow&) const = default;
};

struct ReportMetadata {
  std::size_t n = 0;
  double alpha = kDefaultAlpha;
  std::string responder;
  std::string offense_detector;
  std::vector<std::string> lexicons;  // "name:size" entries
  std::optional<std::string> timestamp;

  bool operator==(const ReportMetadata&) const = default;
};

struct AuditReport {
  std::string group_pair_name;
  std::string group_a_label;
  std::string group_b_label;
  std::vector<MeasurementRow> rows;
  ReportMetadata metadata;

  bool operator==(const AuditReport&) const = default;
};

struct GroupLabels {
  std::string a;
  std::string b;
};

inline GroupLabels labels_for(std::string_view group_pair_name) {
  if (group_pair_name == "gender") return {"Male", "Female"};
  if (group_pair_name == "race") return {"White", "Black"};
  return {"A", "B"};
}

namespace detail {

inline MeasurementRow tested_row(std::string measurement,
                                 const std::vector<double>& a,
                                 const std::vector<double>& b, double alpha) {
  const auto t = z_test(a, b, alpha);
  MeasurementRow row;
  row.measurement = std::move(measurement);
  row.value_a = t.summary_a.mean;
  row.value_b = t.summary_b.mean;
  row.relative_difference = t.relative_difference;
  row.z = t.z;
  row.p = t.p_two_sided;
  row.significant = t.reject_h0;
  return row;
}

}  // namespace detail

// Rows in order: diversity, offense, sentiment_pos, sentiment_neg, then one
// attribute row per lexicon name.
inline AuditReport build_report(std::string group_pair_name, GroupLabels labels,
                                std::span<const ResponseRecord> a,
                                std::span<const ResponseRecord> b,
                                std::span<const std::string> attribute_names,
                                ReportMetadata metadata) {
  if (a.size() != b.size()) {
    throw ContractViolation("response lists differ in length: " +
                            std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
  check_alpha(metadata.alpha);
  for (const auto* side : {&a, &b}) {
    for (const auto& r : *side) {
      if (r.attribute_counts.size() != attribute_names.size()) {
        throw ContractViolation("response scored against " +
                                std::to_string(r.attribute_counts.size()) +
                                " lexicons, expected " +
                                std::to_string(attribute_names.size()));
      }
    }
  }
  const double alpha = metadata.alpha;
  AuditReport rep;
  rep.group_pair_name = std::move(group_pair_name);
  rep.group_a_label = std::move(labels.a);
  rep.group_b_label = std::move(labels.b);
  metadata.n = a.size();
  rep.metadata = std::move(metadata);

  auto utterances = [](std::span<const ResponseRecord> side) {
    std::vector<Utterance> out;
    out.reserve(side.size());
    for (const auto& r : side) out.push_back(r.response);
    return out;
  };
  const double div_a = diversity(utterances(a)).diversity;
  const double div_b = diversity(utterances(b)).diversity;
  rep.rows.push_back({"diversity", div_a, div_b,
                      relative_difference(div_a, div_b), std::nullopt,
                      std::nullopt, std::nullopt});

  auto column = [](std::span<const ResponseRecord> side, auto f) {
    std::vector<double> out;
    out.reserve(side.size());
    for (const auto& r : side) out.push_back(static_cast<double>(f(r)));
    return out;
  };
  auto offense = [](const ResponseRecord& r) { return r.offense; };
  auto pos = [](const ResponseRecord& r) { return r.sentiment_positive() ? 1 : 0; };
  auto neg = [](const ResponseRecord& r) { return r.sentiment_negative() ? 1 : 0; };
  rep.rows.push_back(
      detail::tested_row("offense", column(a, offense), column(b, offense), alpha));
  rep.rows.push_back(
      detail::tested_row("sentiment_pos", column(a, pos), column(b, pos), alpha));
  rep.rows.push_back(
      detail::tested_row("sentiment_neg", column(a, neg), column(b, neg), alpha));
  for (std::size_t k = 0; k < attribute_names.size(); ++k) {
    auto count = [k](const ResponseRecord& r) { return r.attribute_counts[k]; };
    rep.rows.push_back(detail::tested_row("attribute:" + attribute_names[k],
                                          column(a, count), column(b, count),
                                          alpha));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Rendering

enum class ReportFormat { kTable, kMarkdown, kRecords };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "table") return ReportFormat::kTable;
  if (s == "markdown") return ReportFormat::kMarkdown;
  if (s == "records") return ReportFormat::kRecords;
  throw ConfigurationError("unknown report format '" + std::string(s) +
                           "' (expected table, markdown or records)");
}

inline std::string measurement_title(std::string_view m) {
  if (m == "diversity") return "Diversity (%)";
  if (m == "offense") return "Offense Rate (%)";
  if (m == "sentiment_pos") return "Sentiment Positive (%)";
  if (m == "sentiment_neg") return "Sentiment Negative (%)";
  if (m.starts_with("attribute:")) {
    std::string name(m.substr(10));
    if (!name.empty() && name[0] >= 'a' && name[0] <= 'z') name[0] -= 'a' - 'A';
    return "Ave. " + name + " Words per Response";
  }
  return std::string(m);
}

// Signed percentage with one decimal, "n/a" when undefined.
inline std::string format_difference(std::optional<double> rel) {
  if (!rel || !std::isfinite(*rel)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.1f%%", *rel * 100.0);
  std::string s(buf);
  if (s == "+0.0%" || s == "-0.0%") return "0.0%";
  return s;
}

inline std::string format_z(double z) {
  if (std::isinf(z)) return z > 0 ? "inf" : "-inf";
  return format_fixed(z, 3);
}

inline constexpr double kPFloor = 1e-5;

inline std::string format_p(double p) {
  if (p < kPFloor) return "<10^-5";
  return format_fixed(p, 3);
}

inline std::string format_value(const MeasurementRow& row, double v) {
  return row.is_percent() ? format_fixed(v * 100.0, 3) : format_fixed(v, 4);
}

namespace detail {

// Header plus one string cell per column for every row.
inline std::vector<std::vector<std::string>> report_cells(const AuditReport& rep) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Measurement", rep.group_a_label, rep.group_b_label,
                   "Difference", "Z", "p"});
  for (const auto& row : rep.rows) {
    std::string va = format_value(row, row.value_a);
    std::string vb = format_value(row, row.value_b);
    if (row.value_a > row.value_b) va += "*";
    if (row.value_b > row.value_a) vb += "*";
    cells.push_back({measurement_title(row.measurement), va, vb,
                     format_difference(row.relative_difference),
                     row.z ? format_z(*row.z) : "-",
                     row.p ? format_p(*row.p) : "-"});
  }
  return cells;
}

inline std::string report_caption(const AuditReport& rep) {
  return rep.group_pair_name + ": " + rep.group_a_label + " vs " +
         rep.group_b_label + " (n=" + std::to_string(rep.metadata.n) +
         ", alpha=" + format_double(rep.metadata.alpha) + ")";
}

}  // namespace detail

inline std::string render_table(const AuditReport& rep) {
  const auto cells = detail::report_cells(rep);
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& r : cells) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      width[c] = std::max(width[c], r[c].size());
    }
  }
  std::ostringstream out;
  out << detail::report_caption(rep) << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& r = cells[i];
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string pad(width[c] - r[c].size(), ' ');
      if (c == 0) {
        line += r[c] + pad;
      } else {
        line += "  " + pad + r[c];
      }
    }
    out << line << '\n';
    if (i == 0) {
      std::size_t total = width[0];
      for (std::size_t c = 1; c < width.size(); ++c) total += 2 + width[c];
      out << std::string(total, '-') << '\n';
    }
  }
  out << "responder: " << rep.metadata.responder << '\n';
  out << "offense detector: " << rep.metadata.offense_detector << '\n';
  out << "* marks the larger group value\n";
  return out.str();
}

inline std::string render_markdown(const AuditReport& rep) {
  const auto cells = detail::report_cells(rep);
  std::ostringstream out;
  out << "**" << detail::report_caption(rep) << "**\n\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out << '|';
    for (const auto& c : cells[i]) out << ' ' << c << " |";
    out << '\n';
    if (i == 0) out << "|---|---:|---:|---:|---:|---:|\n";
  }
  out << "\nresponder: `" << rep.metadata.responder << "`, offense detector: `"
      << rep.metadata.offense_detector << "`. `*` marks the larger group value.\n";
  return out.str();
}

namespace detail {

inline nlohmann::json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? number_json(*v) : nlohmann::json(nullptr);
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ValidationError("expected a number, got " + j.dump());
}

inline std::optional<double> optional_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return number_from_json(j);
}

}  // namespace detail

// First line: {"type":"meta", ...}; then one {"type":"row", ...} per row.
inline std::string render_records(const AuditReport& rep) {
  std::ostringstream out;
  nlohmann::json meta;
  meta["type"] = "meta";
  meta["group_pair"] = rep.group_pair_name;
  meta["group_a"] = rep.group_a_label;
  meta["group_b"] = rep.group_b_label;
  meta["n"] = rep.metadata.n;
  meta["alpha"] = rep.metadata.alpha;
  meta["responder"] = rep.metadata.responder;
  meta["offense_detector"] = rep.metadata.offense_detector;
  meta["lexicons"] = rep.metadata.lexicons;
  if (rep.metadata.timestamp) meta["timestamp"] = *rep.metadata.timestamp;
  out << meta.dump() << '\n';
  for (const auto& row : rep.rows) {
    nlohmann::json j;
    j["type"] = "row";
    j["measurement"] = row.measurement;
    j["value_a"] = detail::number_json(row.value_a);
    j["value_b"] = detail::number_json(row.value_b);
    j["relative_difference"] = detail::optional_json(row.relative_difference);
    j["z"] = detail::optional_json(row.z);
    j["p"] = detail::optional_json(row.p);
    j["significant"] = row.significant ? nlohmann::json(*row.significant)
                                       : nlohmann::json(nullptr);
    out << j.dump() << '\n';
  }
  return out.str();
}

inline std::string render(const AuditReport& rep, ReportFormat format) {
  if (rep.rows.empty()) throw ContractViolation("report has no rows");
  switch (format) {
    case ReportFormat::kTable: return render_table(rep);
    case ReportFormat::kMarkdown: return render_markdown(rep);
    case ReportFormat::kRecords: return render_records(rep);
  }
  throw ContractViolation("unknown report format");
}

inline AuditReport parse_records(std::istream& in) {
  AuditReport rep;
  bool have_meta = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "meta") {
        rep.group_pair_name = j.at("group_pair").get<std::string>();
        rep.group_a_label = j.at("group_a").get<std::string>();
        rep.group_b_label = j.at("group_b").get<std::string>();
        rep.metadata.n = j.at("n").get<std::size_t>();
        rep.metadata.alpha = j.at("alpha").get<double>();
        rep.metadata.responder = j.at("responder").get<std::string>();
        rep.metadata.offense_detector = j.at("offense_detector").get<std::string>();
        rep.metadata.lexicons = j.at("lexicons").get<std::vector<std::string>>();
        if (j.contains("timestamp")) {
          rep.metadata.timestamp = j.at("timestamp").get<std::string>();
        }
        have_meta = true;
      } else if (type == "row") {
        MeasurementRow row;
        row.measurement = j.at("measurement").get<std::string>();
        row.value_a = detail::number_from_json(j.at("value_a"));
        row.value_b = detail::number_from_json(j.at("value_b"));
        row.relative_difference =
            detail::optional_from_json(j.at("relative_difference"));
        row.z = detail::optional_from_json(j.at("z"));
        row.p = detail::optional_from_json(j.at("p"));
        if (!j.at("significant").is_null()) {
          row.significant = j.at("significant").get<bool>();
        }
        rep.rows.push_back(std::move(row));
      }
      // Unknown record types are skipped so newer writers stay readable.
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad report record: ") + e.what(), line_no);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!have_meta) throw ParseError("report has no meta record", line_no);
  return rep;
}

}  // namespace fairdial

#endif  // FAIRDIAL_REPORT_HPP_
