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

// Synthetic fixtures shared by the unit tests, the acceptance suite and the
// fixture generator used by the CLI test.

#ifndef AMSS_TESTS_TEST_SUPPORT_HPP_
#define AMSS_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "amss.hpp"

namespace amss::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "amss") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> Sine(double freq, double fs, double seconds, double amplitude = 1.0) {
  std::vector<double> x(static_cast<size_t>(std::llround(fs * seconds)));
  for (size_t n = 0; n < x.size(); ++n) {
    x[n] = amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(n) / fs);
  }
  return x;
}

// Scales x so its A-weighted Leq is `laeq` under `calibration_db`.
inline std::vector<double> ScaleToLaeq(std::vector<double> x, double fs, double laeq,
                                       double calibration_db = 94.0) {
  const double now = Leq(Waveform{x, fs, calibration_db}, Weighting::kA);
  const double g = std::pow(10.0, (laeq - now) / 20.0);
  for (double& v : x) v *= g;
  return x;
}

// Coloured noise from two one-pole lowpass stages; `cutoff` in Hz.
inline std::vector<double> ColouredNoise(double fs, double seconds, double cutoff, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(static_cast<size_t>(std::llround(fs * seconds)));
  const double a = std::exp(-2.0 * std::numbers::pi * cutoff / fs);
  double s1 = 0.0, s2 = 0.0;
  for (double& v : x) {
    s1 = a * s1 + (1.0 - a) * rng.StandardNormal();
    s2 = a * s2 + (1.0 - a) * s1;
    v = s2;
  }
  return x;
}

// Masker-like material per class. Content only has to be deterministic and
// audible; the surrogate keys on class, not on timbre.
inline std::vector<double> MaskerSignal(MaskerClass c, double fs, double seconds, uint64_t seed) {
  switch (c) {
    case MaskerClass::kBird: {
      Rng rng(seed);
      std::vector<double> x(static_cast<size_t>(std::llround(fs * seconds)), 0.0);
      // Short upward chirps every ~0.4 s.
      for (double t0 = 0.05; t0 + 0.15 < seconds; t0 += 0.3 + 0.2 * rng.Uniform()) {
        const double f0 = 2500.0 + 1500.0 * rng.Uniform();
        const auto start = static_cast<size_t>(t0 * fs);
        const auto len = static_cast<size_t>(0.12 * fs);
        double phase = 0.0;
        for (size_t k = 0; k < len && start + k < x.size(); ++k) {
          const double u = static_cast<double>(k) / static_cast<double>(len);
          phase += 2.0 * std::numbers::pi * f0 * (1.0 + 0.5 * u) / fs;
          x[start + k] += std::sin(std::numbers::pi * u) * std::sin(phase);
        }
      }
      return x;
    }
    case MaskerClass::kWater:
      return ColouredNoise(fs, seconds, 3000.0, seed);
    case MaskerClass::kWind: {
      auto x = ColouredNoise(fs, seconds, 400.0, seed);
      for (size_t n = 0; n < x.size(); ++n) {
        x[n] *= 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * 0.2 * static_cast<double>(n) / fs);
      }
      return x;
    }
    case MaskerClass::kTraffic:
      return ColouredNoise(fs, seconds, 150.0, seed);
    case MaskerClass::kConstruction: {
      auto x = ColouredNoise(fs, seconds, 2000.0, seed);
      for (size_t n = 0; n < x.size(); ++n) {
        const double t = static_cast<double>(n) / fs;
        x[n] *= std::fmod(t, 0.5) < 0.1 ? 1.0 : 0.1;
      }
      return x;
    }
  }
  return {};
}

// Ambient with a slowly varying level around `laeq`.
inline Waveform SyntheticAmbient(double fs, double seconds, double laeq = 65.0, uint64_t seed = 7) {
  auto x = ColouredNoise(fs, seconds, 800.0, seed);
  for (size_t n = 0; n < x.size(); ++n) {
    x[n] *= 1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * static_cast<double>(n) / fs / 47.0);
  }
  return Waveform{ScaleToLaeq(std::move(x), fs, laeq), fs, 94.0};
}

struct BankSpec {
  std::string id;
  MaskerClass masker_class;
};

inline std::vector<BankSpec> MixedBankSpec() {
  return {{"bird01", MaskerClass::kBird},         {"water01", MaskerClass::kWater},
          {"wind01", MaskerClass::kWind},         {"traffic01", MaskerClass::kTraffic},
          {"construction01", MaskerClass::kConstruction}};
}

inline MaskerBank MakeBank(double fs, double seconds = 30.0,
                           const std::vector<BankSpec>& spec = MixedBankSpec()) {
  MaskerBank bank;
  uint64_t seed = 100;
  for (const auto& s : spec) {
    Waveform audio{ScaleToLaeq(MaskerSignal(s.masker_class, fs, seconds, seed++), fs, 70.0), fs, 94.0};
    bank.Add({s.id, s.masker_class, std::move(audio)}, SyntheticCalibration(s.id));
  }
  return bank;
}

inline std::string CalibrationCsv(const CalibrationTable& t) {
  std::string out = "digital_gain,spl_dba_1m\n";
  char buf[64];
  for (const auto& p : t.points()) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.digital_gain, p.spl_at_1m);
    out += buf;
  }
  return out;
}

// Writes maskers, calibration tables and manifest.csv under dir; returns the
// manifest path.
inline std::filesystem::path WriteBank(const std::filesystem::path& dir, double fs,
                                       double seconds = 30.0,
                                       const std::vector<BankSpec>& spec = MixedBankSpec()) {
  std::filesystem::create_directories(dir);
  const MaskerBank bank = MakeBank(fs, seconds, spec);
  std::string manifest = "id,class,audio_path,calib_path\n";
  for (const auto& e : bank.entries()) {
    const std::string wav = e.track.id + ".wav";
    const std::string cal = e.track.id + ".calib.csv";
    WriteWav(dir / wav, AudioFile{fs, {e.track.audio.samples}});
    WriteFileAtomic(dir / cal, CalibrationCsv(*e.calibration));
    manifest += e.track.id + "," + std::string(MaskerClassName(e.track.masker_class)) + "," + wav +
                "," + cal + "\n";
  }
  WriteFileAtomic(dir / "manifest.csv", manifest);
  return dir / "manifest.csv";
}

}  // namespace amss::testing

#endif  // AMSS_TESTS_TEST_SUPPORT_HPP_
