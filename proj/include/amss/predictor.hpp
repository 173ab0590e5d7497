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

// ISOPL prediction for candidate augmentations.
//
// A Predictor returns, for one ambient window, a predicted ISOPL
// distribution for the unaugmented ambient (the baseline) and one per
// candidate (masker, gain) pair. The bundled SurrogatePredictor is a closed
// form stand-in for a learned model; RemotePredictor (remote_predictor.hpp)
// talks to an inference service and falls back to the surrogate.

#ifndef AMSS_PREDICTOR_HPP_
#define AMSS_PREDICTOR_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amss/acoustics.hpp"
#include "amss/common.hpp"
#include "amss/features.hpp"
#include "amss/masker_bank.hpp"

namespace amss {

struct CandidateAugmentation {
  std::string masker_id;
  MaskerClass masker_class = MaskerClass::kBird;
  double digital_gain = 0.0;
  // Masker level at the listener minus ambient LAeq, dB.
  double smr = 0.0;
};

// Normal distribution on the ISOPL scale.
struct IsoplDistribution {
  double mean = 0.0;
  double std = 0.0;

  friend bool operator==(const IsoplDistribution&, const IsoplDistribution&) = default;
};

enum class BackendKind { kSurrogate, kRemote, kRemoteFallback };

inline std::string_view BackendName(BackendKind b) {
  switch (b) {
    case BackendKind::kSurrogate:
      return "surrogate";
    case BackendKind::kRemote:
      return "remote";
    case BackendKind::kRemoteFallback:
      return "remote-fallback";
  }
  return "?";
}

inline BackendKind BackendFromName(std::string_view name) {
  for (auto b : {BackendKind::kSurrogate, BackendKind::kRemote, BackendKind::kRemoteFallback}) {
    if (BackendName(b) == name) return b;
  }
  throw ValidationError("unknown backend '" + std::string(name) + "'");
}

struct PredictionBatch {
  IsoplDistribution baseline;
  std::vector<IsoplDistribution> candidates;
  BackendKind backend = BackendKind::kSurrogate;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string_view name() const = 0;
  // Throws ArgumentError on an empty candidate list, BackendError when the
  // backend cannot produce a prediction.
  virtual PredictionBatch Predict(const AmbientFeatures& ambient,
                                  std::span<const CandidateAugmentation> candidates) const = 0;
};

struct SurrogateParams {
  double a0 = 0.0;
  double a1 = 0.5;
  double a2 = 0.4;
  double a3 = 0.6;
  double s0 = 0.1;
  double reference_level = 65.0;
  double preferred_smr = -3.0;
  // Indexed by MaskerClass.
  std::array<double, 5> naturalness = {1.0, 1.0, 1.0, 0.0, 0.0};

  double Naturalness(MaskerClass c) const { return naturalness[static_cast<size_t>(c)]; }
};

// mean = tanh(a0 + a1 (L_ref - L_mix)/10 + a2 nat(class) - a3 |smr - smr*|/10)
// with L_mix the energetic sum of ambient and masker; std = s0.
inline IsoplDistribution SurrogatePredict(const AmbientFeatures& ambient,
                                          const CandidateAugmentation& candidate,
                                          const SurrogateParams& p = {}) {
  if (!std::isfinite(candidate.smr)) throw ArgumentError("candidate SMR must be finite");
  const double masker_level = ambient.laeq + candidate.smr;
  const double mix = EnergeticCombine({ambient.laeq, masker_level});
  const double x = p.a0 + p.a1 * (p.reference_level - mix) / 10.0 +
                   p.a2 * p.Naturalness(candidate.masker_class) -
                   p.a3 * std::abs(candidate.smr - p.preferred_smr) / 10.0;
  return {std::clamp(std::tanh(x), -1.0, 1.0), p.s0};
}

// The unaugmented ambient: level term only.
inline IsoplDistribution SurrogateBaseline(const AmbientFeatures& ambient,
                                           const SurrogateParams& p = {}) {
  const double x = p.a0 + p.a1 * (p.reference_level - ambient.laeq) / 10.0;
  return {std::clamp(std::tanh(x), -1.0, 1.0), p.s0};
}

class SurrogatePredictor : public Predictor {
 public:
  explicit SurrogatePredictor(SurrogateParams params = {}) : params_(params) {}

  std::string_view name() const override { return "surrogate"; }
  const SurrogateParams& params() const { return params_; }

  PredictionBatch Predict(const AmbientFeatures& ambient,
                          std::span<const CandidateAugmentation> candidates) const override {
    if (candidates.empty()) throw ArgumentError("predict needs at least one candidate");
    PredictionBatch batch;
    batch.backend = BackendKind::kSurrogate;
    batch.baseline = SurrogateBaseline(ambient, params_);
    batch.candidates.reserve(candidates.size());
    for (const auto& c : candidates) batch.candidates.push_back(SurrogatePredict(ambient, c, params_));
    return batch;
  }

 private:
  SurrogateParams params_;
};

enum class RankCriterion { kMeanImprovement, kProbabilityOfImprovement };

inline std::string_view RankCriterionName(RankCriterion c) {
  return c == RankCriterion::kMeanImprovement ? "mean-improvement" : "probability-of-improvement";
}

inline RankCriterion RankCriterionFromName(std::string_view name) {
  if (name == "mean-improvement") return RankCriterion::kMeanImprovement;
  if (name == "probability-of-improvement") return RankCriterion::kProbabilityOfImprovement;
  throw ValidationError("unknown rank criterion '" + std::string(name) + "'");
}

inline double NormalCdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// P(X_candidate > X_baseline) for independent normals.
inline double ProbabilityOfImprovement(const IsoplDistribution& candidate,
                                       const IsoplDistribution& baseline) {
  const double diff = candidate.mean - baseline.mean;
  const double sd = std::sqrt(candidate.std * candidate.std + baseline.std * baseline.std);
  if (sd == 0.0) return diff > 0.0 ? 1.0 : diff < 0.0 ? 0.0 : 0.5;
  return NormalCdf(diff / sd);
}

// Candidate indices, best first. Equal scores fall back to lower gain, then
// masker id, then input position, so the order is total.
inline std::vector<size_t> RankCandidates(std::span<const IsoplDistribution> dists,
                                          const IsoplDistribution& baseline,
                                          std::span<const CandidateAugmentation> candidates,
                                          RankCriterion criterion = RankCriterion::kMeanImprovement) {
  if (dists.size() != candidates.size()) {
    throw ArgumentError("rank_candidates: distributions and candidates differ in length");
  }
  std::vector<double> score(dists.size());
  for (size_t i = 0; i < dists.size(); ++i) {
    // Mean improvement orders like the candidate mean itself; comparing
    // means avoids a rounding step.
    score[i] = criterion == RankCriterion::kMeanImprovement
                   ? dists[i].mean
                   : ProbabilityOfImprovement(dists[i], baseline);
  }
  std::vector<size_t> order(dists.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    if (candidates[a].digital_gain != candidates[b].digital_gain) {
      return candidates[a].digital_gain < candidates[b].digital_gain;
    }
    if (candidates[a].masker_id != candidates[b].masker_id) {
      return candidates[a].masker_id < candidates[b].masker_id;
    }
    return a < b;
  });
  return order;
}

}  // namespace amss

#endif  // AMSS_PREDICTOR_HPP_
