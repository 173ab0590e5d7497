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

// Offline rendering of an augmented session at the listener position.
//
// Each logged interval plays its masker from the start of the interval
// (looping if shorter), scaled so that its A-weighted Leq in the ambient's
// calibration equals the logged listener level. Neighbouring intervals are
// joined by equal-power crossfades centred on the boundary.

#ifndef AMSS_SIMULATOR_HPP_
#define AMSS_SIMULATOR_HPP_

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amss/acoustics.hpp"
#include "amss/common.hpp"
#include "amss/masker_bank.hpp"
#include "amss/selection.hpp"

namespace amss {

struct MixOptions {
  // Total crossfade length in seconds; 0 gives hard switches.
  double crossfade = 0.5;
};

// Linear-interpolation resampling.
inline std::vector<double> Resample(const std::vector<double>& x, double from_rate, double to_rate) {
  if (!(from_rate > 0.0) || !(to_rate > 0.0) || !std::isfinite(from_rate) || !std::isfinite(to_rate)) {
    throw ArgumentError("cannot resample between rates " + std::to_string(from_rate) + " and " +
                        std::to_string(to_rate));
  }
  if (from_rate == to_rate || x.empty()) return x;
  const auto n = static_cast<size_t>(std::floor(static_cast<double>(x.size()) * to_rate / from_rate));
  std::vector<double> y(n);
  const double ratio = from_rate / to_rate;
  for (size_t i = 0; i < n; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    const auto k = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    const double a = x[std::min(k, x.size() - 1)];
    const double b = x[std::min(k + 1, x.size() - 1)];
    y[i] = a + frac * (b - a);
  }
  return y;
}

inline bool MaskerAudible(const SelectionLogEntry& e) {
  return e.status == IntervalStatus::kOk && !e.masker_id.empty() && e.digital_gain > 0.0;
}

inline Waveform MixSession(const Waveform& ambient, const SessionLog& log, const MaskerBank& bank,
                           const MixOptions& options = {}) {
  Validate(ambient);
  if (!(options.crossfade >= 0.0)) throw ArgumentError("crossfade must be >= 0");
  const double fs = ambient.sample_rate;
  const double interval = log.policy.interval;
  const auto total = static_cast<std::ptrdiff_t>(ambient.samples.size());
  const auto coverage = static_cast<std::ptrdiff_t>(
      std::llround(interval * fs * static_cast<double>(log.entries.size())));
  if (coverage > total) throw ArgumentError("ambient shorter than the session log coverage");

  // Prepared (resampled, unit-scaled) masker audio plus its A-weighted Leq in
  // the ambient's calibration.
  struct Prepared {
    std::vector<double> samples;
    double laeq = 0.0;
  };
  std::map<std::string, Prepared> prepared;
  for (const auto& e : log.entries) {
    if (!MaskerAudible(e) || prepared.contains(e.masker_id)) continue;
    const MaskerEntry& m = bank.Get(e.masker_id);
    if (m.track.audio.samples.empty()) {
      throw ValidationError("masker '" + e.masker_id + "' has no audio");
    }
    Prepared p;
    p.samples = Resample(m.track.audio.samples, m.track.audio.sample_rate, fs);
    if (p.samples.empty()) throw ValidationError("masker '" + e.masker_id + "' resampled to nothing");
    p.laeq = Leq(Waveform{p.samples, fs, ambient.calibration_db}, Weighting::kA);
    if (p.laeq <= ambient.calibration_db - kLevelFloorBelowCalibration) {
      throw ValidationError("masker '" + e.masker_id + "' is silent");
    }
    prepared.emplace(e.masker_id, std::move(p));
  }

  Waveform out = ambient;
  const auto half_fade = static_cast<std::ptrdiff_t>(std::llround(options.crossfade * fs / 2.0));
  const double pi_2 = std::numbers::pi / 2.0;
  for (size_t i = 0; i < log.entries.size(); ++i) {
    const auto& e = log.entries[i];
    if (!MaskerAudible(e)) continue;
    const Prepared& p = prepared.at(e.masker_id);
    const double scale = std::pow(10.0, (e.achieved_spl - p.laeq) / 20.0);
    const auto start = static_cast<std::ptrdiff_t>(std::llround(interval * fs * static_cast<double>(i)));
    const auto end = static_cast<std::ptrdiff_t>(std::llround(interval * fs * static_cast<double>(i + 1)));
    // No fade at the very start of the session or at the end of the ambient.
    const bool fade_in = i > 0 && half_fade > 0;
    const bool fade_out = end < total && half_fade > 0;
    const std::ptrdiff_t from = fade_in ? start - half_fade : start;
    const std::ptrdiff_t to = std::min(total, fade_out ? end + half_fade : end);
    const auto len = static_cast<std::ptrdiff_t>(p.samples.size());
    for (std::ptrdiff_t n = std::max<std::ptrdiff_t>(0, from); n < to; ++n) {
      double env = 1.0;
      if (fade_in && n < start + half_fade) {
        const double x = static_cast<double>(n - (start - half_fade)) / static_cast<double>(2 * half_fade);
        env = std::sin(pi_2 * x);
      } else if (fade_out && n >= end - half_fade) {
        const double x = static_cast<double>(n - (end - half_fade)) / static_cast<double>(2 * half_fade);
        env = std::cos(pi_2 * x);
      }
      std::ptrdiff_t k = (n - start) % len;
      if (k < 0) k += len;
      out.samples[n] += env * scale * p.samples[k];
    }
  }
  return out;
}

struct SessionReport {
  MetricsReport ambient;
  MetricsReport augmented;
  double delta_laeq = 0.0;
  double delta_lceq = 0.0;
  double delta_n95 = 0.0;
};

inline SessionReport MakeSessionReport(const Waveform& ambient, const Waveform& augmented,
                                       const MetricsOptions& options = {}) {
  SessionReport r;
  r.ambient = ComputeMetrics(ambient, options);
  r.augmented = ComputeMetrics(augmented, options);
  r.delta_laeq = r.augmented.laeq - r.ambient.laeq;
  r.delta_lceq = r.augmented.lceq - r.ambient.lceq;
  r.delta_n95 = r.augmented.n95 - r.ambient.n95;
  return r;
}

inline nlohmann::json ToJson(const SessionReport& r) {
  auto summary = [](const MetricsReport& m) {
    nlohmann::json j = ToJson(m);
    j.erase("laf_series");
    return j;
  };
  return {{"ambient", summary(r.ambient)},
          {"augmented", summary(r.augmented)},
          {"delta_laeq", r.delta_laeq},
          {"delta_lceq", r.delta_lceq},
          {"delta_n95", r.delta_n95}};
}

}  // namespace amss

#endif  // AMSS_SIMULATOR_HPP_
