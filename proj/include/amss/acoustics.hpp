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

// Objective level metrics over calibrated waveforms.
//
// Calibration convention: a waveform carries `calibration_db`, the sound
// pressure level that a full-scale (amplitude 1.0) sine reads. Levels are
// therefore 10*log10(mean(x^2) / 0.5) + calibration_db, floored at
// calibration_db - 120 dB so that silence stays finite.

#ifndef AMSS_ACOUSTICS_HPP_
#define AMSS_ACOUSTICS_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "amss/common.hpp"

namespace amss {

struct Waveform {
  std::vector<double> samples;
  double sample_rate = 48000.0;
  double calibration_db = 94.0;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

inline void Validate(const Waveform& w) {
  if (!(w.sample_rate > 0.0) || !std::isfinite(w.sample_rate)) {
    throw ValidationError("waveform sample rate must be positive");
  }
  if (!std::isfinite(w.calibration_db)) {
    throw ValidationError("waveform calibration must be finite");
  }
  for (double x : w.samples) {
    if (!std::isfinite(x)) throw ValidationError("waveform has non-finite samples");
  }
}

enum class Weighting { kA, kC, kZ };

inline std::string_view WeightingName(Weighting w) {
  switch (w) {
    case Weighting::kA:
      return "A";
    case Weighting::kC:
      return "C";
    case Weighting::kZ:
      return "Z";
  }
  return "?";
}

enum class TimeWeighting { kFast, kNone };

struct LevelSeries {
  std::vector<double> times;
  std::vector<double> levels;
  Weighting weighting = Weighting::kA;
  TimeWeighting time_weighting = TimeWeighting::kFast;
};

inline constexpr double kLevelFloorBelowCalibration = 120.0;
inline constexpr double kFastTimeConstant = 0.125;

// Pole frequencies of the IEC 61672 A and C weighting prototypes.
inline constexpr double kWeightingF1 = 20.598997;
inline constexpr double kWeightingF2 = 107.65265;
inline constexpr double kWeightingF3 = 737.86223;
inline constexpr double kWeightingF4 = 12194.217;

namespace internal {

inline double WeightingMagnitude(double f, Weighting curve) {
  const double f2 = f * f;
  const double p1 = f2 + kWeightingF1 * kWeightingF1;
  const double p4 = f2 + kWeightingF4 * kWeightingF4;
  const double k4 = kWeightingF4 * kWeightingF4;
  switch (curve) {
    case Weighting::kA:
      return k4 * f2 * f2 /
             (p1 *
              std::sqrt((f2 + kWeightingF2 * kWeightingF2) *
                        (f2 + kWeightingF3 * kWeightingF3)) *
              p4);
    case Weighting::kC:
      return k4 * f2 / (p1 * p4);
    case Weighting::kZ:
      return 1.0;
  }
  return 1.0;
}

}  // namespace internal

// Analytic weighting magnitude in dB, 0 dB at 1 kHz.
inline double WeightingGainDb(double frequency_hz, Weighting curve) {
  if (!(frequency_hz > 0.0)) throw ArgumentError("frequency must be positive");
  return 20.0 * std::log10(internal::WeightingMagnitude(frequency_hz, curve) /
                           internal::WeightingMagnitude(1000.0, curve));
}

// Digital realization of a weighting curve.
//
// The DC zeros and the low poles (f1 twice, and f2, f3 for A) become
// first-order high-pass sections via the bilinear transform prewarped at
// 1 kHz. The double pole at f4 is a magnitude-only low-pass whose bilinear
// image droops badly towards Nyquist, so it is realized as a linear-phase FIR
// fitted to f4^2 / (f^2 + f4^2) and the FIR group delay is removed from the
// output. The cascade is scaled to unity gain at 1 kHz.
class WeightingFilter {
 public:
  static constexpr int kFirHalfLength = 16;

  WeightingFilter(Weighting curve, double sample_rate)
      : curve_(curve), sample_rate_(sample_rate) {
    if (curve == Weighting::kZ) return;
    if (!(sample_rate > 2.0 * kWeightingF4)) {
      throw ArgumentError("sample rate " + std::to_string(sample_rate) +
                          " Hz too low for " + std::string(WeightingName(curve)) +
                          "-weighting (needs > " +
                          std::to_string(2.0 * kWeightingF4) + " Hz)");
    }
    const double pi = std::numbers::pi;
    const double k = 2.0 * pi * 1000.0 / std::tan(pi * 1000.0 / sample_rate);
    std::vector<double> corners = {kWeightingF1, kWeightingF1};
    if (curve == Weighting::kA) {
      corners.push_back(kWeightingF2);
      corners.push_back(kWeightingF3);
    }
    for (double fc : corners) {
      const double w = 2.0 * pi * fc;
      poles_.push_back((k - w) / (k + w));
    }

    // Cosine-series least-squares fit of the high-frequency roll-off.
    constexpr int kGrid = 4096;
    std::vector<double> c(kFirHalfLength + 1, 0.0);
    for (int i = 0; i < kGrid; ++i) {
      const double omega = pi * (i + 0.5) / kGrid;
      const double f = omega * sample_rate / (2.0 * pi);
      const double target =
          kWeightingF4 * kWeightingF4 / (f * f + kWeightingF4 * kWeightingF4);
      for (int m = 0; m <= kFirHalfLength; ++m) {
        c[m] += target * std::cos(m * omega);
      }
    }
    fir_.assign(2 * kFirHalfLength + 1, 0.0);
    fir_[kFirHalfLength] = c[0] / kGrid;
    for (int m = 1; m <= kFirHalfLength; ++m) {
      fir_[kFirHalfLength + m] = fir_[kFirHalfLength - m] = c[m] / kGrid;
    }

    gain_ = 1.0 / std::abs(ResponseUnscaled(1000.0));
  }

  // Complex frequency response of the realized cascade, delay removed.
  std::complex<double> Response(double frequency_hz) const {
    if (curve_ == Weighting::kZ) return 1.0;
    return gain_ * ResponseUnscaled(frequency_hz);
  }

  std::vector<double> Process(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    if (curve_ == Weighting::kZ) return y;
    for (double p : poles_) {
      double x_prev = 0.0, y_prev = 0.0;
      for (double& v : y) {
        const double in = v;
        y_prev = (in - x_prev) + p * y_prev;
        x_prev = in;
        v = y_prev;
      }
    }
    const auto n = static_cast<std::ptrdiff_t>(y.size());
    std::vector<double> out(y.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int m = -kFirHalfLength; m <= kFirHalfLength; ++m) {
        const std::ptrdiff_t j = i + m;
        if (j >= 0 && j < n) acc += fir_[kFirHalfLength + m] * y[j];
      }
      out[i] = gain_ * acc;
    }
    return out;
  }

 private:
  std::complex<double> ResponseUnscaled(double frequency_hz) const {
    const double omega = 2.0 * std::numbers::pi * frequency_hz / sample_rate_;
    const std::complex<double> zinv = std::polar(1.0, -omega);
    std::complex<double> h = 1.0;
    for (double p : poles_) h *= (1.0 - zinv) / (1.0 - p * zinv);
    double fir = fir_[kFirHalfLength];
    for (int m = 1; m <= kFirHalfLength; ++m) {
      fir += 2.0 * fir_[kFirHalfLength + m] * std::cos(m * omega);
    }
    return h * fir;
  }

  Weighting curve_;
  double sample_rate_;
  std::vector<double> poles_;
  std::vector<double> fir_;
  double gain_ = 1.0;
};

inline Waveform ApplyWeighting(const Waveform& w, Weighting curve) {
  Validate(w);
  Waveform out = w;
  out.samples = WeightingFilter(curve, w.sample_rate).Process(w.samples);
  return out;
}

namespace internal {

inline double LevelFromMeanSquare(double mean_square, double calibration_db) {
  const double floor = calibration_db - kLevelFloorBelowCalibration;
  if (!(mean_square > 0.0)) return floor;
  return std::max(floor, 10.0 * std::log10(mean_square / 0.5) + calibration_db);
}

}  // namespace internal

inline double LevelFloor(const Waveform& w) {
  return w.calibration_db - kLevelFloorBelowCalibration;
}

// Equivalent continuous level of the waveform after frequency weighting.
inline double Leq(const Waveform& w, Weighting weighting = Weighting::kZ) {
  Validate(w);
  if (w.samples.empty()) throw ArgumentError("leq of an empty waveform");
  const std::vector<double> y =
      weighting == Weighting::kZ ? w.samples
                                 : WeightingFilter(weighting, w.sample_rate).Process(w.samples);
  double acc = 0.0;
  for (double v : y) acc += v * v;
  return internal::LevelFromMeanSquare(acc / static_cast<double>(y.size()),
                                       w.calibration_db);
}

// Exponentially time-weighted level (125 ms, "Fast"), read every `step`
// seconds at t = step, 2*step, ... up to the end of the signal.
inline LevelSeries FastLevelSeries(const Waveform& w,
                                   Weighting weighting = Weighting::kA,
                                   double step = 0.1) {
  Validate(w);
  if (!(step > 0.0)) throw ArgumentError("level series step must be positive");
  const std::vector<double> y =
      weighting == Weighting::kZ ? w.samples
                                 : WeightingFilter(weighting, w.sample_rate).Process(w.samples);
  LevelSeries series;
  series.weighting = weighting;
  series.time_weighting = TimeWeighting::kFast;
  const double alpha = 1.0 - std::exp(-1.0 / (kFastTimeConstant * w.sample_rate));
  double state = 0.0;
  size_t next_index = 1;
  auto next_sample = [&](size_t k) {
    return static_cast<size_t>(std::llround(static_cast<double>(k) * step * w.sample_rate));
  };
  size_t boundary = next_sample(next_index);
  for (size_t n = 0; n < y.size(); ++n) {
    state += alpha * (y[n] * y[n] - state);
    while (n + 1 == boundary) {
      series.times.push_back(static_cast<double>(next_index) * step);
      series.levels.push_back(internal::LevelFromMeanSquare(state, w.calibration_db));
      boundary = next_sample(++next_index);
    }
  }
  return series;
}

// Value exceeded `percent` % of the time: the (100 - percent)th percentile
// with linear interpolation between order statistics.
inline double Exceedance(std::span<const double> values, double percent) {
  if (values.empty()) throw ArgumentError("exceedance of an empty series");
  if (!(percent >= 0.0 && percent <= 100.0)) {
    throw RangeError("exceedance percent outside [0, 100]");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = (100.0 - percent) / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Incoherent (energy) sum of levels.
inline double EnergeticCombine(std::span<const double> levels_db) {
  if (levels_db.empty()) throw ArgumentError("energetic combine of no levels");
  double acc = 0.0;
  for (double l : levels_db) acc += std::pow(10.0, l / 10.0);
  return 10.0 * std::log10(acc);
}

inline double EnergeticCombine(std::initializer_list<double> levels_db) {
  return EnergeticCombine(std::span<const double>(levels_db.begin(), levels_db.size()));
}

inline double EnergeticMean(std::span<const double> levels_db) {
  return EnergeticCombine(levels_db) - 10.0 * std::log10(static_cast<double>(levels_db.size()));
}

inline double EnergeticMean(std::initializer_list<double> levels_db) {
  return EnergeticMean(std::span<const double>(levels_db.begin(), levels_db.size()));
}

// Loudness in sone per time frame. The reference backend is an approximation
// of ISO 532-1; a full Zwicker implementation can be dropped in here.
class LoudnessBackend {
 public:
  virtual ~LoudnessBackend() = default;
  virtual std::string_view name() const = 0;
  virtual std::vector<double> Series(const Waveform& w) const = 0;
};

// Stevens-style power law on the Fast A-weighted level: 1 sone at 40 dBA,
// doubling every 10 dB.
inline double SoneFromLevel(double level_dba) {
  return std::exp2((level_dba - 40.0) / 10.0);
}

class StevensLoudness : public LoudnessBackend {
 public:
  explicit StevensLoudness(double frame_step = 0.1) : frame_step_(frame_step) {}

  std::string_view name() const override { return "stevens-laf"; }

  std::vector<double> Series(const Waveform& w) const override {
    const LevelSeries laf = FastLevelSeries(w, Weighting::kA, frame_step_);
    std::vector<double> sones;
    sones.reserve(laf.levels.size());
    for (double l : laf.levels) sones.push_back(SoneFromLevel(l));
    return sones;
  }

 private:
  double frame_step_;
};

struct MetricsReport {
  double laeq = 0.0;
  double lceq = 0.0;
  double n95 = 0.0;
  LevelSeries laf_series;
  double duration = 0.0;
  // Channel the report was taken from when several were supplied.
  int channel = 0;
  std::string loudness_backend;
};

struct MetricsOptions {
  double laf_step = 0.1;
  double loudness_exceedance_percent = 95.0;
};

inline MetricsReport ComputeMetrics(const Waveform& w,
                                    const LoudnessBackend& loudness,
                                    const MetricsOptions& options = {}) {
  Validate(w);
  if (w.samples.empty()) throw ArgumentError("metrics of an empty waveform");
  MetricsReport r;
  r.laeq = Leq(w, Weighting::kA);
  r.lceq = Leq(w, Weighting::kC);
  r.laf_series = FastLevelSeries(w, Weighting::kA, options.laf_step);
  const std::vector<double> sones = loudness.Series(w);
  r.n95 = sones.empty() ? 0.0 : Exceedance(sones, options.loudness_exceedance_percent);
  r.duration = w.duration();
  r.loudness_backend = std::string(loudness.name());
  return r;
}

inline MetricsReport ComputeMetrics(const Waveform& w, const MetricsOptions& options = {}) {
  return ComputeMetrics(w, StevensLoudness(options.laf_step), options);
}

// Binaural / multichannel input: metrics per channel, report the channel with
// the highest LAeq.
inline MetricsReport ComputeMetrics(std::span<const Waveform> channels,
                                    const LoudnessBackend& loudness,
                                    const MetricsOptions& options = {}) {
  if (channels.empty()) throw ArgumentError("no channels supplied");
  MetricsReport best;
  for (size_t c = 0; c < channels.size(); ++c) {
    MetricsReport r = ComputeMetrics(channels[c], loudness, options);
    r.channel = static_cast<int>(c);
    if (c == 0 || r.laeq > best.laeq) best = std::move(r);
  }
  return best;
}

inline std::string LevelSeriesCsv(const LevelSeries& s) {
  std::ostringstream out;
  out.precision(10);
  out << "t_seconds,level_db\n";
  for (size_t i = 0; i < s.times.size(); ++i) {
    out << s.times[i] << ',' << s.levels[i] << '\n';
  }
  return out.str();
}

inline nlohmann::json ToJson(const MetricsReport& r) {
  return nlohmann::json{
      {"laeq", r.laeq},
      {"lceq", r.lceq},
      {"n95", r.n95},
      {"duration", r.duration},
      {"channel", r.channel},
      {"loudness_backend", r.loudness_backend},
      {"laf_series",
       {{"weighting", WeightingName(r.laf_series.weighting)},
        {"time_weighting", r.laf_series.time_weighting == TimeWeighting::kFast ? "F" : "none"},
        {"times", r.laf_series.times},
        {"levels", r.laf_series.levels}}},
  };
}

}  // namespace amss

#endif  // AMSS_ACOUSTICS_HPP_
