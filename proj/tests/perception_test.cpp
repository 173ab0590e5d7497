// Copyright 2026 The AMSS Authors. All Rights Reserved.
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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "amss/perception.hpp"

namespace amss {
namespace {

double DirectIsopl(int pl, int ev, int ch, int vi, int un, int ca, int an, int mo) {
  (void)ev;
  (void)un;
  return (2.0 * (pl - an) + std::sqrt(2.0) * (ca - ch + vi - mo)) / (8.0 + 8.0 * std::sqrt(2.0));
}

double DirectIsoev(int pl, int ev, int ch, int vi, int un, int ca, int an, int mo) {
  (void)pl;
  (void)an;
  return (2.0 * (ev - un) + std::sqrt(2.0) * (ch - ca + vi - mo)) / (8.0 + 8.0 * std::sqrt(2.0));
}

TEST(IsoplTest, NeutralRatingsGiveZero) {
  EXPECT_NEAR(ComputeIsopl(PaqRatings{}).value(), 0.0, 1e-15);
  EXPECT_NEAR(ComputeIsoev(PaqRatings{}).value(), 0.0, 1e-15);
}

TEST(IsoplTest, ExtremesReachUnitBounds) {
  // pleasant, eventful, chaotic, vibrant, uneventful, calm, annoying, monotonous
  const PaqRatings best{5, 3, 1, 5, 3, 5, 1, 1};
  const PaqRatings worst{1, 3, 5, 1, 3, 1, 5, 5};
  EXPECT_NEAR(ComputeIsopl(best).value(), 1.0, 1e-12);
  EXPECT_NEAR(ComputeIsopl(worst).value(), -1.0, 1e-12);
  const PaqRatings lively{3, 5, 5, 5, 1, 1, 3, 1};
  EXPECT_NEAR(ComputeIsoev(lively).value(), 1.0, 1e-12);
}

TEST(IsoplTest, RejectsOutOfRangeItems) {
  PaqRatings r;
  r.calm = 6;
  EXPECT_THROW(ComputeIsopl(r), ValidationError);
  r.calm = 0;
  EXPECT_THROW(ComputeIsoev(r), ValidationError);
}

// Every combination of the six items that enter each index.
TEST(IsoplTest, ExhaustiveAgainstDirectFormula) {
  int at_upper = 0, at_lower = 0;
  for (int pl = 1; pl <= 5; ++pl)
    for (int ch = 1; ch <= 5; ++ch)
      for (int vi = 1; vi <= 5; ++vi)
        for (int ca = 1; ca <= 5; ++ca)
          for (int an = 1; an <= 5; ++an)
            for (int mo = 1; mo <= 5; ++mo) {
              const PaqRatings r{pl, 3, ch, vi, 3, ca, an, mo};
              const double v = ComputeIsopl(r).value();
              ASSERT_NEAR(v, DirectIsopl(pl, 3, ch, vi, 3, ca, an, mo), 1e-12);
              ASSERT_GE(v, -1.0);
              ASSERT_LE(v, 1.0);
              at_upper += v > 1.0 - 1e-12;
              at_lower += v < -1.0 + 1e-12;
            }
  EXPECT_EQ(at_upper, 1);
  EXPECT_EQ(at_lower, 1);
}

TEST(IsoevTest, ExhaustiveAgainstDirectFormula) {
  for (int ev = 1; ev <= 5; ++ev)
    for (int ch = 1; ch <= 5; ++ch)
      for (int vi = 1; vi <= 5; ++vi)
        for (int un = 1; un <= 5; ++un)
          for (int ca = 1; ca <= 5; ++ca)
            for (int mo = 1; mo <= 5; ++mo) {
              const PaqRatings r{3, ev, ch, vi, un, ca, 3, mo};
              ASSERT_NEAR(ComputeIsoev(r).value(), DirectIsoev(3, ev, ch, vi, un, ca, 3, mo), 1e-12);
            }
}

TEST(IsoplTest, AntisymmetricUnderScaleReversal) {
  // Reversing every rating (x -> 6 - x) negates both indices.
  for (int seed = 0; seed < 200; ++seed) {
    const int a = 1 + seed % 5, b = 1 + (seed / 5) % 5, c = 1 + (seed / 25) % 5;
    const PaqRatings r{a, b, c, a, c, b, c, a};
    const PaqRatings rev{6 - a, 6 - b, 6 - c, 6 - a, 6 - c, 6 - b, 6 - c, 6 - a};
    EXPECT_NEAR(ComputeIsopl(r).value(), -ComputeIsopl(rev).value(), 1e-12);
    EXPECT_NEAR(ComputeIsoev(r).value(), -ComputeIsoev(rev).value(), 1e-12);
  }
}

TEST(NormalizeScaleTest, WorkedValues) {
  EXPECT_DOUBLE_EQ(NormalizeScale(1, 1, 5).value(), -1.0);
  EXPECT_DOUBLE_EQ(NormalizeScale(5, 1, 5).value(), 1.0);
  EXPECT_DOUBLE_EQ(NormalizeScale(3, 1, 5).value(), 0.0);
  EXPECT_DOUBLE_EQ(NormalizeScale(4, 1, 7).value(), 0.0);
  EXPECT_NEAR(NormalizeScale(16.0 / 3.0, 1, 7).value(), 0.4444444444444444, 1e-15);
}

TEST(NormalizeScaleTest, Errors) {
  EXPECT_THROW(NormalizeScale(3, 5, 5), ArgumentError);
  EXPECT_THROW(NormalizeScale(3, 5, 1), ArgumentError);
  EXPECT_THROW(NormalizeScale(0.5, 1, 5), RangeError);
  EXPECT_THROW(NormalizeScale(std::nan(""), 1, 5), RangeError);
}

TEST(NormalizeScaleTest, MonotoneAndAffine) {
  double prev = -2.0;
  for (double x = 1.0; x <= 7.0; x += 0.25) {
    const double v = NormalizeScale(x, 1, 7).value();
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(NormalizedScoreTest, RejectsValuesOutsideUnitRange) {
  EXPECT_THROW(NormalizedScore(1.5), RangeError);
  EXPECT_THROW(NormalizedScore(std::numeric_limits<double>::quiet_NaN()), RangeError);
  EXPECT_DOUBLE_EQ(NormalizedScore(1.0 + 1e-13).value(), 1.0);
}

TEST(PanasTest, SumAndMeanAgree) {
  PanasResponses p;
  p.positive_items = {5, 4, 3, 2, 4};
  p.negative_items = {1, 1, 2, 1, 1};
  const auto s = PanasScores(p, PanasAggregation::kSum);
  const auto m = PanasScores(p, PanasAggregation::kMean);
  EXPECT_NEAR(s.positive.value(), m.positive.value(), 1e-15);
  EXPECT_NEAR(s.negative.value(), m.negative.value(), 1e-15);
  // (18 - 5) * 2 / 20 - 1
  EXPECT_NEAR(s.positive.value(), 0.3, 1e-15);
  EXPECT_NEAR(s.negative.value(), -0.9, 1e-15);
}

TEST(PanasTest, RejectsOutOfRange) {
  PanasResponses p;
  p.negative_items[2] = 6;
  EXPECT_THROW(PanasScores(p), ValidationError);
}

TEST(PrssTest, DimensionMeans) {
  PrssResponses p;
  p.items[PrssDimension::kFascination] = {7, 7, 2};
  p.items[PrssDimension::kBeingAway] = {4};
  const auto d = PrssDimensions(p);
  EXPECT_NEAR(d.at(PrssDimension::kFascination).value(), 0.4444444444444444, 1e-15);
  EXPECT_NEAR(d.at(PrssDimension::kBeingAway).value(), 0.0, 1e-15);
  EXPECT_FALSE(d.contains(PrssDimension::kExtentScope));
}

TEST(PrssTest, Errors) {
  PrssResponses p;
  p.items[PrssDimension::kCompatibility] = {};
  EXPECT_THROW(PrssDimensions(p), ValidationError);
  p.items[PrssDimension::kCompatibility] = {8};
  EXPECT_THROW(PrssDimensions(p), ValidationError);
  EXPECT_THROW(PrssDimensionFromCode("xx"), ValidationError);
  EXPECT_EQ(PrssDimensionFromCode("ec"), PrssDimension::kExtentCoherence);
}

TEST(PercentScaleChangeTest, HalfTheDifference) {
  EXPECT_NEAR(PercentScaleChange(NormalizedScore(-0.19), NormalizedScore(0.10)), 14.5, 1e-12);
  EXPECT_NEAR(PercentScaleChange(NormalizedScore(-1.0), NormalizedScore(1.0)), 100.0, 1e-12);
  EXPECT_NEAR(PercentScaleChange(NormalizedScore(0.3), NormalizedScore(0.3)), 0.0, 1e-15);
}

}  // namespace
}  // namespace amss
