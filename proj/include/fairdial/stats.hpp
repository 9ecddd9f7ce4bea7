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

// Two-sample Z test on per-response scores of the two groups.

#ifndef FAIRDIAL_STATS_HPP_
#define FAIRDIAL_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairdial/error.hpp"
#include "fairdial/io.hpp"

namespace fairdial {

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // n - 1 denominator

  bool operator==(const SampleSummary&) const = default;
};

// Welford's one-pass update.
template <typename Range>
SampleSummary summarize(const Range& scores) {
  SampleSummary s;
  double m2 = 0.0;
  for (const double x : scores) {
    ++s.n;
    const double delta = x - s.mean;
    s.mean += delta / static_cast<double>(s.n);
    m2 += delta * (x - s.mean);
  }
  if (s.n < 2) {
    throw InsufficientSampleError("need at least 2 scores, got " +
                                  std::to_string(s.n));
  }
  s.variance = std::max(0.0, m2 / static_cast<double>(s.n - 1));
  return s;
}

inline SampleSummary summarize(std::span<const double> scores) {
  return summarize<std::span<const double>>(scores);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// P(|Z| >= |z|) for standard normal Z, computed in the tail directly so
// small p-values keep their relative precision.
inline double two_sided_p(double z) {
  if (std::isinf(z)) return 0.0;
  return std::min(1.0, std::erfc(std::fabs(z) / std::numbers::sqrt2));
}

inline constexpr double kDefaultAlpha = 0.05;

struct TestResult {
  SampleSummary summary_a;
  SampleSummary summary_b;
  double z = 0.0;
  double p_two_sided = 1.0;
  bool reject_h0 = false;
  double alpha = kDefaultAlpha;
  // (mean_a - mean_b) / mean_a; empty when mean_a is 0.
  std::optional<double> relative_difference;
  // Both variances were zero with unequal means: z is +/-infinity, p = 0.
  bool degenerate = false;
};

inline std::optional<double> relative_difference(double mean_a, double mean_b) {
  if (mean_a == 0.0) return std::nullopt;
  return (mean_a - mean_b) / mean_a;
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ContractViolation("alpha must lie in (0, 1), got " +
                            format_double(alpha));
  }
}

inline TestResult z_test(const SampleSummary& a, const SampleSummary& b,
                         double alpha = kDefaultAlpha) {
  check_alpha(alpha);
  if (a.n != b.n) {
    throw ContractViolation("z_test needs equal sample sizes, got " +
                            std::to_string(a.n) + " and " +
                            std::to_string(b.n));
  }
  if (a.n < 2) throw InsufficientSampleError("need at least 2 scores per group");
  TestResult r;
  r.summary_a = a;
  r.summary_b = b;
  r.alpha = alpha;
  r.relative_difference = relative_difference(a.mean, b.mean);
  const double n = static_cast<double>(a.n);
  const double se = std::sqrt(a.variance / n + b.variance / n);
  const double diff = a.mean - b.mean;
  if (se == 0.0) {
    if (diff == 0.0) {
      r.z = 0.0;
      r.p_two_sided = 1.0;
    } else {
      r.degenerate = true;
      r.z = diff > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
      r.p_two_sided = 0.0;
    }
  } else {
    r.z = diff / se;
    r.p_two_sided = two_sided_p(r.z);
  }
  r.reject_h0 = r.p_two_sided < alpha;
  return r;
}

inline TestResult z_test(std::span<const double> a, std::span<const double> b,
                         double alpha = kDefaultAlpha) {
  check_alpha(alpha);
  if (a.size() != b.size()) {
    throw ContractViolation("z_test needs equal sample sizes, got " +
                            std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
  }
  return z_test(summarize(a), summarize(b), alpha);
}

// One number per line; blank lines and '#' comments skipped.
inline std::vector<double> read_scores(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    double v = 0.0;
    if (!parse_double(t, v) || !std::isfinite(v)) {
      throw ParseError("expected a finite number", line_no);
    }
    out.push_back(v);
  }
  if (in.bad()) throw IoError("read failure after line " + std::to_string(line_no));
  return out;
}

}  // namespace fairdial

#endif  // FAIRDIAL_STATS_HPP_
