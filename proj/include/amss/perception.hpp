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

// Perceptual indices over questionnaire responses: ISO 12913-3 Pleasantness
// and Eventfulness from the eight circumplex (PAQ) ratings, affine scale
// normalization to [-1, 1], PANAS affect scores, PRSS dimension scores and
// percent-of-scale changes between two normalized means.

#ifndef AMSS_PERCEPTION_HPP_
#define AMSS_PERCEPTION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amss/common.hpp"

namespace amss {

// Circumplex ratings on the 1..5 agreement scale.
struct PaqRatings {
  int pleasant = 3;
  int eventful = 3;
  int chaotic = 3;
  int vibrant = 3;
  int uneventful = 3;
  int calm = 3;
  int annoying = 3;
  int monotonous = 3;
};

// A real value on the common [-1, 1] analysis scale.
class NormalizedScore {
 public:
  constexpr NormalizedScore() = default;
  explicit NormalizedScore(double value) : value_(value) {
    // Tolerate rounding at the endpoints, reject anything else.
    if (!(value >= -1.0 - 1e-12 && value <= 1.0 + 1e-12)) {
      throw RangeError("normalized score outside [-1, 1]: " +
                       std::to_string(value));
    }
    value_ = std::clamp(value, -1.0, 1.0);
  }

  constexpr double value() const { return value_; }
  friend constexpr bool operator==(NormalizedScore, NormalizedScore) = default;

 private:
  double value_ = 0.0;
};

inline constexpr int kPaqMin = 1;
inline constexpr int kPaqMax = 5;
inline constexpr int kPanasMin = 1;
inline constexpr int kPanasMax = 5;
inline constexpr int kPrssMin = 1;
inline constexpr int kPrssMax = 7;

namespace internal {

inline void CheckItem(int value, int lo, int hi, std::string_view name) {
  if (value < lo || value > hi) {
    throw ValidationError(std::string(name) + " = " + std::to_string(value) +
                          " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  }
}

// 8 + 8*sqrt(2): the largest possible magnitude of either numerator.
inline const double kCircumplexDenominator = 8.0 + 8.0 * std::sqrt(2.0);

}  // namespace internal

inline void Validate(const PaqRatings& r) {
  using internal::CheckItem;
  CheckItem(r.pleasant, kPaqMin, kPaqMax, "pleasant");
  CheckItem(r.eventful, kPaqMin, kPaqMax, "eventful");
  CheckItem(r.chaotic, kPaqMin, kPaqMax, "chaotic");
  CheckItem(r.vibrant, kPaqMin, kPaqMax, "vibrant");
  CheckItem(r.uneventful, kPaqMin, kPaqMax, "uneventful");
  CheckItem(r.calm, kPaqMin, kPaqMax, "calm");
  CheckItem(r.annoying, kPaqMin, kPaqMax, "annoying");
  CheckItem(r.monotonous, kPaqMin, kPaqMax, "monotonous");
}

// ISO Pleasantness: projection of the ratings on the pleasant-annoying axis,
// with the calm/chaotic and vibrant/monotonous diagonals weighted by cos 45.
inline NormalizedScore ComputeIsopl(const PaqRatings& r) {
  Validate(r);
  const double numerator =
      2.0 * (r.pleasant - r.annoying) +
      std::sqrt(2.0) * (r.calm - r.chaotic + r.vibrant - r.monotonous);
  return NormalizedScore(numerator / internal::kCircumplexDenominator);
}

// ISO Eventfulness, the orthogonal eventful-uneventful axis.
inline NormalizedScore ComputeIsoev(const PaqRatings& r) {
  Validate(r);
  const double numerator =
      2.0 * (r.eventful - r.uneventful) +
      std::sqrt(2.0) * (r.chaotic - r.calm + r.vibrant - r.monotonous);
  return NormalizedScore(numerator / internal::kCircumplexDenominator);
}

// Maps [lo, hi] affinely onto [-1, 1].
inline NormalizedScore NormalizeScale(double x, double lo, double hi) {
  if (!(lo < hi)) {
    throw ArgumentError("normalize_scale requires lo < hi");
  }
  if (!(x >= lo && x <= hi)) {
    throw RangeError("value " + std::to_string(x) + " outside [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return NormalizedScore(2.0 * (x - lo) / (hi - lo) - 1.0);
}

struct PanasResponses {
  std::array<int, 5> positive_items{3, 3, 3, 3, 3};
  std::array<int, 5> negative_items{3, 3, 3, 3, 3};
};

struct AffectScores {
  NormalizedScore positive;
  NormalizedScore negative;
};

enum class PanasAggregation { kSum, kMean };

// Positive and negative affect. Sum over the five items, then normalize the
// sum's range [5, 25]; the mean over [1, 5] gives the same normalized value.
inline AffectScores PanasScores(const PanasResponses& p,
                                PanasAggregation aggregation =
                                    PanasAggregation::kSum) {
  auto score = [&](const std::array<int, 5>& items, std::string_view what) {
    for (int v : items) internal::CheckItem(v, kPanasMin, kPanasMax, what);
    const double sum = std::accumulate(items.begin(), items.end(), 0.0);
    const double n = static_cast<double>(items.size());
    if (aggregation == PanasAggregation::kMean) {
      return NormalizeScale(sum / n, kPanasMin, kPanasMax);
    }
    return NormalizeScale(sum, kPanasMin * n, kPanasMax * n);
  };
  return {score(p.positive_items, "panas positive item"),
          score(p.negative_items, "panas negative item")};
}

enum class PrssDimension {
  kFascination,
  kBeingAway,
  kCompatibility,
  kExtentCoherence,
  kExtentScope,
};

inline std::string_view PrssDimensionCode(PrssDimension d) {
  switch (d) {
    case PrssDimension::kFascination:
      return "fas";
    case PrssDimension::kBeingAway:
      return "ba";
    case PrssDimension::kCompatibility:
      return "com";
    case PrssDimension::kExtentCoherence:
      return "ec";
    case PrssDimension::kExtentScope:
      return "es";
  }
  return "?";
}

inline PrssDimension PrssDimensionFromCode(std::string_view code) {
  for (auto d : {PrssDimension::kFascination, PrssDimension::kBeingAway,
                 PrssDimension::kCompatibility, PrssDimension::kExtentCoherence,
                 PrssDimension::kExtentScope}) {
    if (PrssDimensionCode(d) == code) return d;
  }
  throw ValidationError("unknown PRSS dimension '" + std::string(code) + "'");
}

// Item scores grouped by dimension; a std::map key makes the one-dimension-
// per-item assignment structural.
struct PrssResponses {
  std::map<PrssDimension, std::vector<int>> items;
};

// Mean of each dimension's items, normalized from the 7-point scale.
inline std::map<PrssDimension, NormalizedScore> PrssDimensions(
    const PrssResponses& p) {
  std::map<PrssDimension, NormalizedScore> out;
  for (const auto& [dim, items] : p.items) {
    if (items.empty()) {
      throw ValidationError("PRSS dimension '" +
                            std::string(PrssDimensionCode(dim)) +
                            "' has no items");
    }
    for (int v : items) internal::CheckItem(v, kPrssMin, kPrssMax, "prss item");
    const double mean = std::accumulate(items.begin(), items.end(), 0.0) /
                        static_cast<double>(items.size());
    out.emplace(dim, NormalizeScale(mean, kPrssMin, kPrssMax));
  }
  return out;
}

// Change between two normalized means as a percentage of the full [-1, 1]
// range (width 2).
inline double PercentScaleChange(NormalizedScore before, NormalizedScore after) {
  return 100.0 * (after.value() - before.value()) / 2.0;
}

}  // namespace amss

#endif  // AMSS_PERCEPTION_HPP_
