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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "fairdial/stats.hpp"

namespace fairdial {
namespace {

// Independent oracles: two-pass moments and Simpson quadrature of the normal
// density.

SampleSummary two_pass(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {xs.size(), mean, ss / static_cast<double>(xs.size() - 1)};
}

double simpson_two_sided_p(double z) {
  const double a = std::fabs(z);
  if (a > 12.0) return 0.0;
  const int steps = 20000;
  const double h = a / steps;
  auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
  double acc = pdf(0.0) + pdf(a);
  for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * pdf(i * h);
  return 1.0 - 2.0 * acc * h / 3.0;
}

TEST(Summarize, MatchesTwoPassOracle) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> dist(1e6, 3.0);  // large offset stresses cancellation
  std::vector<double> xs(5000);
  for (auto& x : xs) x = dist(rng);
  const auto s = summarize(xs);
  const auto o = two_pass(xs);
  EXPECT_EQ(s.n, o.n);
  EXPECT_NEAR(s.mean, o.mean, 1e-7);  // ~1e-13 relative
  EXPECT_NEAR(s.variance, o.variance, 1e-6);
}

TEST(Summarize, NeedsTwoScores) {
  EXPECT_THROW(summarize(std::vector<double>{1.0}), InsufficientSampleError);
  EXPECT_THROW(summarize(std::vector<double>{}), InsufficientSampleError);
}

TEST(NormalCdf, KnownValues) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959964), 0.975, 1e-7);
  EXPECT_LT(normal_cdf(-8.0), 1e-14);
  EXPECT_GT(normal_cdf(-8.0), 0.0);
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    EXPECT_NEAR(normal_cdf(x) + normal_cdf(-x), 1.0, 1e-15);
  }
}

TEST(TwoSidedP, MatchesQuadrature) {
  for (double z = 0.0; z <= 7.0; z += 0.1) {
    EXPECT_NEAR(two_sided_p(z), simpson_two_sided_p(z), 1e-9) << z;
    EXPECT_EQ(two_sided_p(z), two_sided_p(-z));
  }
}

TEST(ZTest, WorkedExample) {
  const SampleSummary a{100, 0.4, 0.24};
  const SampleSummary b{100, 0.2, 0.16};
  const auto r = z_test(a, b, 0.05);
  EXPECT_NEAR(r.z, 0.2 / std::sqrt(0.004), 1e-9);
  EXPECT_NEAR(r.z, 3.16228, 1e-5);
  EXPECT_NEAR(r.p_two_sided, simpson_two_sided_p(r.z), 1e-9);
  EXPECT_NEAR(r.p_two_sided, 0.001565, 1e-6);
  EXPECT_TRUE(r.reject_h0);
  ASSERT_TRUE(r.relative_difference.has_value());
  EXPECT_NEAR(*r.relative_difference, 0.5, 1e-12);
}

TEST(ZTest, RandomSamplesAgainstOracle) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> shift(-0.2, 0.2);
  for (int trial = 0; trial < 100; ++trial) {
    std::normal_distribution<double> da(0.0, 1.0);
    std::normal_distribution<double> db(shift(rng), 1.5);
    std::vector<double> a(1000);
    std::vector<double> b(1000);
    for (auto& x : a) x = da(rng);
    for (auto& x : b) x = db(rng);
    const auto oa = two_pass(a);
    const auto ob = two_pass(b);
    const double z = (oa.mean - ob.mean) / std::sqrt(oa.variance / 1000 + ob.variance / 1000);
    const auto r = z_test(a, b);
    EXPECT_NEAR(r.z, z, 1e-6);
    EXPECT_NEAR(r.p_two_sided, simpson_two_sided_p(z), 1e-6);
    EXPECT_EQ(r.reject_h0, r.p_two_sided < 0.05);
  }
}

TEST(ZTest, IdenticalSamples) {
  const std::vector<double> a{0.1, 0.5, 0.9, 0.3};
  const auto r = z_test(a, a);
  EXPECT_EQ(r.z, 0.0);
  EXPECT_EQ(r.p_two_sided, 1.0);
  EXPECT_FALSE(r.reject_h0);
}

TEST(ZTest, AntisymmetricAndScaleInvariant) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d(0.3, 1.0);
  std::vector<double> a(200);
  std::vector<double> b(200);
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng) - 0.2;
  const auto ab = z_test(a, b);
  const auto ba = z_test(b, a);
  EXPECT_NEAR(ab.z, -ba.z, 1e-12);
  EXPECT_NEAR(ab.p_two_sided, ba.p_two_sided, 1e-15);
  std::vector<double> a2 = a;
  std::vector<double> b2 = b;
  for (auto& x : a2) x = 7.5 * x + 3.0;
  for (auto& x : b2) x = 7.5 * x + 3.0;
  EXPECT_NEAR(z_test(a2, b2).z, ab.z, 1e-9);
}

TEST(ZTest, ZeroVariance) {
  const std::vector<double> ones(10, 1.0);
  const std::vector<double> zeros(10, 0.0);
  const auto r = z_test(ones, zeros);
  EXPECT_TRUE(std::isinf(r.z));
  EXPECT_GT(r.z, 0.0);
  EXPECT_EQ(r.p_two_sided, 0.0);
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(r.reject_h0);
  const auto same = z_test(ones, ones);
  EXPECT_EQ(same.z, 0.0);
  EXPECT_EQ(same.p_two_sided, 1.0);
  EXPECT_FALSE(same.degenerate);
}

TEST(ZTest, RelativeDifferenceUndefinedAtZeroMean) {
  const auto r = z_test(SampleSummary{10, 0.0, 1.0}, SampleSummary{10, 0.5, 1.0});
  EXPECT_FALSE(r.relative_difference.has_value());
}

TEST(ZTest, Contracts) {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{1.0, 2.0};
  EXPECT_THROW(z_test(a, b), ContractViolation);
  EXPECT_THROW(z_test(a, a, 0.0), ContractViolation);
  EXPECT_THROW(z_test(a, a, 1.0), ContractViolation);
  EXPECT_THROW(z_test(std::vector<double>{1.0}, std::vector<double>{2.0}),
               InsufficientSampleError);
}

TEST(ReadScores, ParsesAndRejects) {
  std::istringstream ok("0.5\n\n1e-3\n  -2 \n");
  EXPECT_EQ(read_scores(ok), (std::vector<double>{0.5, 1e-3, -2.0}));
  std::istringstream bad("0.5\nabc\n");
  EXPECT_THROW(read_scores(bad), ParseError);
}

}  // namespace
}  // namespace fairdial
