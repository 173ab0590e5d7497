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

#ifndef AMSS_FEATURES_HPP_
#define AMSS_FEATURES_HPP_

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "amss/acoustics.hpp"
#include "amss/common.hpp"

namespace amss {

// Summary of a 30 s ambient window handed to the predictor.
struct AmbientFeatures {
  // [frames][bands] natural-log band energies.
  std::vector<std::vector<double>> band_energies;
  double frame_hop = 0.1;
  double laeq = 0.0;
};

struct FeatureOptions {
  int bands = 64;
  double frame_hop = 0.1;
  double min_frequency = 20.0;
  // 0 means Nyquist.
  double max_frequency = 0.0;
};

namespace internal {

inline double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// FFTW's planner is not thread-safe; execution on distinct plans is.
inline std::mutex& FftwPlannerMutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T, FftwFree>;

class FftwPlan {
 public:
  FftwPlan(double* in, fftw_complex* out, size_t n) {
    std::lock_guard lock(FftwPlannerMutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  ~FftwPlan() {
    std::lock_guard lock(FftwPlannerMutex());
    fftw_destroy_plan(plan_);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;

  void Execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace internal

// Log-mel spectrogram over Hann-windowed frames spaced `frame_hop` apart,
// each twice the hop in length (zero-padded to a power of two), plus the
// window's LAeq.
inline AmbientFeatures ExtractAmbientFeatures(const Waveform& w,
                                              const FeatureOptions& options = {}) {
  Validate(w);
  if (w.samples.empty()) throw ArgumentError("feature extraction on empty window");
  if (options.bands < 1 || !(options.frame_hop > 0.0)) {
    throw ArgumentError("feature options need bands >= 1 and frame_hop > 0");
  }
  const double fs = w.sample_rate;
  const auto hop = std::max<size_t>(1, static_cast<size_t>(std::llround(options.frame_hop * fs)));
  const size_t frame_len = 2 * hop;
  size_t fft_len = 1;
  while (fft_len < frame_len) fft_len <<= 1;
  const size_t bins = fft_len / 2 + 1;

  // Triangular mel filters.
  const double f_max = options.max_frequency > 0.0 ? std::min(options.max_frequency, fs / 2)
                                                   : fs / 2;
  const double mel_lo = internal::HzToMel(options.min_frequency);
  const double mel_hi = internal::HzToMel(f_max);
  std::vector<double> edges(options.bands + 2);
  for (int i = 0; i < options.bands + 2; ++i) {
    edges[i] = internal::MelToHz(mel_lo + (mel_hi - mel_lo) * i / (options.bands + 1));
  }
  struct Filter {
    size_t first = 0;
    std::vector<double> weights;
  };
  std::vector<Filter> filters(options.bands);
  for (int b = 0; b < options.bands; ++b) {
    std::vector<double> dense(bins, 0.0);
    for (size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * fs / static_cast<double>(fft_len);
      double v = 0.0;
      if (f > edges[b] && f <= edges[b + 1]) {
        v = (f - edges[b]) / (edges[b + 1] - edges[b]);
      } else if (f > edges[b + 1] && f < edges[b + 2]) {
        v = (edges[b + 2] - f) / (edges[b + 2] - edges[b + 1]);
      }
      dense[k] = v;
    }
    auto nz = [](double x) { return x != 0.0; };
    const auto first = std::find_if(dense.begin(), dense.end(), nz);
    const auto last = std::find_if(dense.rbegin(), dense.rend(), nz).base();
    if (first < last) {
      filters[b].first = static_cast<size_t>(first - dense.begin());
      filters[b].weights.assign(first, last);
    }
  }

  std::vector<double> window(frame_len);
  for (size_t i = 0; i < frame_len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / frame_len);
  }

  internal::FftwBuffer<double> in_buf(fftw_alloc_real(fft_len));
  internal::FftwBuffer<fftw_complex> out_buf(fftw_alloc_complex(bins));
  double* in = in_buf.get();
  fftw_complex* out = out_buf.get();
  internal::FftwPlan plan(in, out, fft_len);

  AmbientFeatures features;
  features.frame_hop = static_cast<double>(hop) / fs;
  const size_t n = w.samples.size();
  const size_t frames = std::max<size_t>(1, n / hop);
  features.band_energies.reserve(frames);
  std::vector<double> power(bins);
  for (size_t f = 0; f < frames; ++f) {
    const size_t start = f * hop;
    std::fill(in, in + fft_len, 0.0);
    for (size_t i = 0; i < frame_len && start + i < n; ++i) {
      in[i] = w.samples[start + i] * window[i];
    }
    plan.Execute();
    for (size_t k = 0; k < bins; ++k) power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    std::vector<double> row(options.bands);
    for (int b = 0; b < options.bands; ++b) {
      double e = 0.0;
      const Filter& filt = filters[b];
      for (size_t k = 0; k < filt.weights.size(); ++k) {
        e += filt.weights[k] * power[filt.first + k];
      }
      row[b] = std::log(e + 1e-12);
    }
    features.band_energies.push_back(std::move(row));
  }


  features.laeq = Leq(w, Weighting::kA);
  return features;
}

}  // namespace amss

#endif  // AMSS_FEATURES_HPP_
