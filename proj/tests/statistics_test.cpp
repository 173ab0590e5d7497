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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "amss/rng.hpp"
#include "amss/statistics.hpp"

namespace amss {
namespace {

// sup |F_x - F_y| by direct ECDF evaluation at every pooled point.
double EcdfSup(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pts(x);
  pts.insert(pts.end(), y.begin(), y.end());
  double d = 0.0;
  for (double t : pts) {
    const double fx = static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return v <= t; })) / x.size();
    const double fy = static_cast<double>(std::count_if(y.begin(), y.end(), [&](double v) { return v <= t; })) / y.size();
    d = std::max(d, std::abs(fx - fy));
  }
  return d;
}

// Permutation p-value by enumerating every split of the pooled sample.
double PermutationP(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled(x);
  pooled.insert(pooled.end(), y.begin(), y.end());
  const size_t n = x.size(), total = pooled.size();
  const double observed = EcdfSup(x, y);
  int hits = 0, count = 0;
  for (uint32_t mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<size_t>(__builtin_popcount(mask)) != n) continue;
    std::vector<double> a, b;
    for (size_t i = 0; i < total; ++i) ((mask >> i) & 1 ? a : b).push_back(pooled[i]);
    ++count;
    hits += EcdfSup(a, b) >= observed - 1e-12;
  }
  return static_cast<double>(hits) / count;
}

TEST(KsTest, WorkedValues) {
  const auto a = KsTwoSample(std::vector<double>{1, 2, 3}, std::vector<double>{1.5, 2.5, 3.5});
  EXPECT_NEAR(a.statistic, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.p_value, 1.0, 1e-12);
  EXPECT_TRUE(a.exact);
  const auto b = KsTwoSample(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{6, 7, 8, 9, 10, 11});
  EXPECT_DOUBLE_EQ(b.statistic, 1.0);
  EXPECT_NEAR(b.p_value, 0.004329004329004329, 1e-12);
  const std::vector<double> x = {0.1, 0.5, 0.9, 1.3, 2.0, 2.2, 3.1, 3.3, 4.0, 5.5};
  const std::vector<double> y = {0.2, 0.3, 1.0, 1.4, 1.8, 2.5, 3.0, 3.2};
  const auto c = KsTwoSample(x, y);
  EXPECT_NEAR(c.statistic, 0.3, 1e-12);
  EXPECT_NEAR(c.p_value, 0.7227478403948991, 1e-9);
}

TEST(KsTest, ExactMatchesPermutationEnumeration) {
  Rng rng(123);
  for (int n = 1; n <= 6; ++n) {
    for (int m = 1; m <= 6; ++m) {
      for (int rep = 0; rep < 3; ++rep) {
        std::vector<double> x(n), y(m);
        // rep 0: continuous; rep 1-2: coarse grid with ties.
        const double grid = rep == 0 ? 0.0 : (rep == 1 ? 4.0 : 2.0);
        auto draw = [&] { return grid == 0.0 ? rng.Uniform() : std::floor(rng.Uniform() * grid); };
        for (double& v : x) v = draw();
        for (double& v : y) v = draw() + (rep == 0 ? 0.2 : 0.0);
        const KsResult r = KsTwoSample(x, y);
        ASSERT_TRUE(r.exact);
        ASSERT_NEAR(r.statistic, EcdfSup(x, y), 1e-12) << n << "," << m << "," << rep;
        ASSERT_NEAR(r.p_value, PermutationP(x, y), 1e-9) << n << "," << m << "," << rep;
      }
    }
  }
}

TEST(KsTest, StatisticMatchesEcdfOnLargerSamples) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(40 + t), y(30);
    for (double& v : x) v = std::round(rng.StandardNormal() * 4) / 4;
    for (double& v : y) v = std::round((rng.StandardNormal() + 0.3) * 4) / 4;
    EXPECT_NEAR(KsTwoSample(x, y).statistic, EcdfSup(x, y), 1e-12);
  }
}

TEST(KsTest, KolmogorovSurvivalValues) {
  const struct {
    double lambda, sf;
  } cases[] = {{0.3, 0.9999906941986655}, {0.5, 0.9639452436648751}, {0.8, 0.5441424115741981},
               {0.99, 0.2808738392255489}, {1.0, 0.26999967167735456}, {1.36, 0.049485876755377876},
               {2.0, 0.0006709252557796953}, {3.0, 3.045995948942526e-08}};
  for (const auto& c : cases) EXPECT_NEAR(internal::KolmogorovSurvival(c.lambda), c.sf, 1e-12) << c.lambda;
  EXPECT_DOUBLE_EQ(internal::KolmogorovSurvival(0.0), 1.0);
  EXPECT_NEAR(internal::KolmogorovSurvival(std::sqrt(200.0 * 150.0 / 350.0) * 0.055), 0.9577530396948642, 1e-12);
}

TEST(KsTest, AsymptoticAboveThreshold) {
  std::vector<double> x(200), y(150);
  Rng rng(4);
  for (double& v : x) v = rng.StandardNormal();
  for (double& v : y) v = rng.StandardNormal();
  const KsResult asym = KsTwoSample(x, y);
  EXPECT_FALSE(asym.exact);
  const double en = 200.0 * 150.0 / 350.0;
  EXPECT_NEAR(asym.p_value, internal::KolmogorovSurvival(std::sqrt(en) * asym.statistic), 1e-15);
  // The exact value on the same data is close to the limit at this size.
  const KsResult exact = KsTwoSample(x, y, {100000});
  EXPECT_TRUE(exact.exact);
  EXPECT_NEAR(exact.p_value, asym.p_value, 0.05);
}

TEST(KsTest, Errors) {
  EXPECT_THROW(KsTwoSample(std::vector<double>{}, std::vector<double>{1}), ArgumentError);
  EXPECT_THROW(KsTwoSample(std::vector<double>{std::nan("")}, std::vector<double>{1}), ValidationError);
}

TEST(AdjustTest, WorkedValues) {
  const auto bh = BhAdjust(std::vector<double>{0.01, 0.02, 0.03, 0.04});
  for (double v : bh) EXPECT_NEAR(v, 0.04, 1e-15);
  EXPECT_EQ(HolmAdjust(std::vector<double>{0.01, 0.04}), (std::vector<double>{0.02, 0.04}));
  EXPECT_EQ(HolmAdjust(std::vector<double>{0.5, 0.6}), (std::vector<double>{1.0, 1.0}));
  // Original order is preserved.
  const auto holm = HolmAdjust(std::vector<double>{0.04, 0.01, 0.03});
  EXPECT_NEAR(holm[0], 0.06, 1e-15);
  EXPECT_NEAR(holm[1], 0.03, 1e-15);
  EXPECT_NEAR(holm[2], 0.06, 1e-15);
  const auto bh2 = BhAdjust(std::vector<double>{0.04, 0.01, 0.03});
  EXPECT_NEAR(bh2[0], 0.04, 1e-15);
  EXPECT_NEAR(bh2[1], 0.03, 1e-15);
  EXPECT_NEAR(bh2[2], 0.04, 1e-15);
  EXPECT_TRUE(BhAdjust(std::vector<double>{}).empty());
  EXPECT_THROW(HolmAdjust(std::vector<double>{1.2}), RangeError);
  EXPECT_THROW(BhAdjust(std::vector<double>{-0.1}), RangeError);
}

TEST(AdjustTest, Properties) {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(1 + t % 15);
    for (double& v : p) v = rng.Uniform() * (t % 2 ? 1.0 : 0.1);
    const auto bh = BhAdjust(p), holm = HolmAdjust(p);
    for (size_t i = 0; i < p.size(); ++i) {
      EXPECT_GE(bh[i], p[i] - 1e-15);
      EXPECT_GE(holm[i], p[i] - 1e-15);
      EXPECT_LE(bh[i], 1.0);
      EXPECT_LE(holm[i], 1.0);
      EXPECT_LE(bh[i], holm[i] + 1e-15);
      for (size_t j = 0; j < p.size(); ++j) {
        if (p[i] < p[j]) {
          EXPECT_LE(bh[i], bh[j] + 1e-15);
          EXPECT_LE(holm[i], holm[j] + 1e-15);
        }
      }
    }
  }
}

TEST(KendallTest, WorkedValues) {
  const auto a = KendallTauB(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4});
  EXPECT_NEAR(a.tau, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(a.p_value, 0.17423138824802498, 1e-12);
  const auto b = KendallTauB(std::vector<double>{1, 1, 2, 3, 3, 4, 5}, std::vector<double>{2, 1, 1, 3, 4, 4, 6});
  EXPECT_NEAR(b.tau, 0.7894736842105262, 1e-12);
  EXPECT_NEAR(b.p_value, 0.018456509657472746, 1e-12);
}

TEST(KendallTest, Properties) {
  const std::vector<double> x = {3, 1, 4, 1, 5, 9, 2, 6};
  std::vector<double> neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
  EXPECT_NEAR(KendallTauB(x, x).tau, 1.0, 1e-12);
  EXPECT_NEAR(KendallTauB(x, neg).tau, -1.0, 1e-12);
  const std::vector<double> y = {2, 7, 1, 8, 2, 8, 1, 8};
  EXPECT_NEAR(KendallTauB(x, y).tau, KendallTauB(y, x).tau, 1e-15);
  EXPECT_NEAR(KendallTauB(x, y).p_value, KendallTauB(y, x).p_value, 1e-15);
  // Monotone transforms leave tau unchanged.
  std::vector<double> cubed(x.size());
  std::transform(x.begin(), x.end(), cubed.begin(), [](double v) { return v * v * v; });
  EXPECT_NEAR(KendallTauB(cubed, y).tau, KendallTauB(x, y).tau, 1e-15);
}

TEST(KendallTest, UndefinedAndErrors) {
  const auto r = KendallTauB(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3});
  EXPECT_FALSE(r.defined);
  EXPECT_THROW(KendallTauB(std::vector<double>{1, 2}, std::vector<double>{1}), ArgumentError);
  EXPECT_THROW(KendallTauB(std::vector<double>{1}, std::vector<double>{1}), ArgumentError);
}

}  // namespace
}  // namespace amss
