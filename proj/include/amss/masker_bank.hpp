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

// Masker inventory and the playback level chain.
//
// Each masker has a calibration table of (digital gain, SPL at 1 m) points
// measured on one loudspeaker. A desired level at the listener is turned into
// a per-speaker level by undoing the inverse-square distance loss and the
// incoherent sum over speakers, then into a digital gain by interpolating the
// table with energy linear in gain squared.

#ifndef AMSS_MASKER_BANK_HPP_
#define AMSS_MASKER_BANK_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <spdlog/spdlog.h>

#include "amss/acoustics.hpp"
#include "amss/common.hpp"
#include "amss/io.hpp"

namespace amss {

enum class MaskerClass { kBird, kWater, kWind, kTraffic, kConstruction };

inline std::string_view MaskerClassName(MaskerClass c) {
  switch (c) {
    case MaskerClass::kBird:
      return "bird";
    case MaskerClass::kWater:
      return "water";
    case MaskerClass::kWind:
      return "wind";
    case MaskerClass::kTraffic:
      return "traffic";
    case MaskerClass::kConstruction:
      return "construction";
  }
  return "?";
}

inline MaskerClass MaskerClassFromName(std::string_view name) {
  for (auto c : {MaskerClass::kBird, MaskerClass::kWater, MaskerClass::kWind,
                 MaskerClass::kTraffic, MaskerClass::kConstruction}) {
    if (MaskerClassName(c) == name) return c;
  }
  throw ValidationError("unknown masker class '" + std::string(name) + "'");
}

inline bool IsNatural(MaskerClass c) {
  return c == MaskerClass::kBird || c == MaskerClass::kWater || c == MaskerClass::kWind;
}

struct CalibrationPoint {
  double digital_gain = 0.0;
  double spl_at_1m = 0.0;
};

// Result of a gain lookup; `clamped` is set when the requested level was
// outside the table and the nearest endpoint was used instead.
struct GainLookup {
  double gain = 0.0;
  bool clamped = false;
};

class CalibrationTable {
 public:
  CalibrationTable(std::string masker_id, std::vector<CalibrationPoint> points)
      : masker_id_(std::move(masker_id)), points_(std::move(points)) {
    if (points_.size() < 2) {
      throw ValidationError("calibration for '" + masker_id_ + "' needs at least 2 points");
    }
    std::sort(points_.begin(), points_.end(),
              [](const auto& a, const auto& b) { return a.digital_gain < b.digital_gain; });
    for (size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      if (!(p.digital_gain > 0.0) || !std::isfinite(p.digital_gain) ||
          !std::isfinite(p.spl_at_1m)) {
        throw ValidationError("calibration for '" + masker_id_ +
                              "' has a non-positive or non-finite point");
      }
      if (i > 0 && !(p.spl_at_1m > points_[i - 1].spl_at_1m &&
                     p.digital_gain > points_[i - 1].digital_gain)) {
        throw ValidationError("calibration for '" + masker_id_ +
                              "' is not strictly increasing in SPL with gain");
      }
    }
  }

  const std::string& masker_id() const { return masker_id_; }
  const std::vector<CalibrationPoint>& points() const { return points_; }
  double min_spl() const { return points_.front().spl_at_1m; }
  double max_spl() const { return points_.back().spl_at_1m; }

  // Forward interpolation: SPL at 1 m for a digital gain. Outside the table
  // the nearest endpoint is extended with energy proportional to gain^2.
  double SplForGain(double gain) const {
    if (!(gain > 0.0)) throw ArgumentError("gain must be positive");
    if (gain <= points_.front().digital_gain) {
      return points_.front().spl_at_1m + 20.0 * std::log10(gain / points_.front().digital_gain);
    }
    if (gain >= points_.back().digital_gain) {
      return points_.back().spl_at_1m + 20.0 * std::log10(gain / points_.back().digital_gain);
    }
    const double g2 = gain * gain;
    for (size_t i = 1; i < points_.size(); ++i) {
      if (gain <= points_[i].digital_gain) {
        const auto& a = points_[i - 1];
        const auto& b = points_[i];
        const double ga2 = a.digital_gain * a.digital_gain;
        const double gb2 = b.digital_gain * b.digital_gain;
        const double ea = Energy(a.spl_at_1m);
        const double eb = Energy(b.spl_at_1m);
        return 10.0 * std::log10(ea + (g2 - ga2) / (gb2 - ga2) * (eb - ea));
      }
    }
    return points_.back().spl_at_1m;
  }

  // Digital gain producing `target_spl` at 1 m; out-of-range targets clamp to
  // the nearest table endpoint with a logged warning.
  GainLookup GainForTargetSpl(double target_spl) const {
    if (!std::isfinite(target_spl)) throw ArgumentError("target SPL must be finite");
    if (target_spl < min_spl() || target_spl > max_spl()) {
      spdlog::warn("masker '{}': target {:.2f} dBA outside calibrated range [{:.2f}, {:.2f}], "
                   "clamping",
                   masker_id_, target_spl, min_spl(), max_spl());
      return {target_spl < min_spl() ? points_.front().digital_gain : points_.back().digital_gain,
              true};
    }
    const double et = Energy(target_spl);
    for (size_t i = 1; i < points_.size(); ++i) {
      if (target_spl <= points_[i].spl_at_1m) {
        const auto& a = points_[i - 1];
        const auto& b = points_[i];
        const double ga2 = a.digital_gain * a.digital_gain;
        const double gb2 = b.digital_gain * b.digital_gain;
        const double ea = Energy(a.spl_at_1m);
        const double eb = Energy(b.spl_at_1m);
        return {std::sqrt(ga2 + (et - ea) / (eb - ea) * (gb2 - ga2)), false};
      }
    }
    return {points_.back().digital_gain, false};
  }

 private:
  static double Energy(double spl) { return std::pow(10.0, spl / 10.0); }

  std::string masker_id_;
  std::vector<CalibrationPoint> points_;
};

// Table of an ideal linear playback chain, SPL = reference_spl +
// 20*log10(gain / reference_gain), sampled from lo to hi dBA in `step` steps.
inline CalibrationTable SyntheticCalibration(std::string masker_id, double reference_spl = 65.0,
                                             double reference_gain = 1.0, double lo = 46.0,
                                             double hi = 83.0, double step = 3.0) {
  std::vector<CalibrationPoint> points;
  for (double spl = lo; spl <= hi + 1e-9; spl += step) {
    points.push_back({reference_gain * std::pow(10.0, (spl - reference_spl) / 20.0), spl});
  }
  if (points.back().spl_at_1m < hi - 1e-9) {
    points.push_back({reference_gain * std::pow(10.0, (hi - reference_spl) / 20.0), hi});
  }
  return CalibrationTable(std::move(masker_id), std::move(points));
}

inline CalibrationTable LoadCalibration(const std::filesystem::path& path,
                                        std::string masker_id) {
  const CsvTable csv = ReadCsv(path);
  const int gain_col = csv.RequireColumn("digital_gain");
  const int spl_col = csv.RequireColumn("spl_dba_1m");
  std::vector<CalibrationPoint> points;
  for (size_t r = 0; r < csv.rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(csv.line_numbers[r]);
    points.push_back({ParseDouble(csv.rows[r][gain_col], where + " digital_gain"),
                      ParseDouble(csv.rows[r][spl_col], where + " spl_dba_1m")});
  }
  return CalibrationTable(std::move(masker_id), std::move(points));
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double Distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

struct SpeakerLayout {
  std::vector<Vec3> speakers;
  Vec3 listener;

  // `count` speakers at `mount_height`, evenly spaced on the circle through
  // the corners of a square of side `square_side` centred on the origin
  // (exactly the corners when count == 4).
  static SpeakerLayout Square(int count = 4, double square_side = 2.2,
                              double mount_height = 2.5, Vec3 listener = {0.0, 0.0, 1.5}) {
    if (count < 1) throw ArgumentError("speaker count must be >= 1");
    if (!(square_side > 0.0) || !(mount_height > 0.0)) {
      throw ArgumentError("speaker layout dimensions must be positive");
    }
    SpeakerLayout layout;
    layout.listener = listener;
    const double radius = square_side / std::numbers::sqrt2;
    for (int i = 0; i < count; ++i) {
      const double angle = std::numbers::pi / 4.0 + 2.0 * std::numbers::pi * i / count;
      layout.speakers.push_back({radius * std::cos(angle), radius * std::sin(angle), mount_height});
    }
    return layout;
  }

  // `count` speakers all `distance` metres from the listener.
  static SpeakerLayout Equidistant(int count, double distance) {
    if (count < 1) throw ArgumentError("speaker count must be >= 1");
    if (!(distance > 0.0)) throw ArgumentError("speaker distance must be positive");
    SpeakerLayout layout;
    for (int i = 0; i < count; ++i) {
      const double angle = 2.0 * std::numbers::pi * i / count;
      layout.speakers.push_back({distance * std::cos(angle), distance * std::sin(angle), 0.0});
    }
    return layout;
  }
};

namespace internal {

// 10*log10(sum_i d_i^-2): the level gain from 1 m per-speaker SPL to the
// incoherent sum at the listener.
inline double LayoutGainDb(const SpeakerLayout& layout) {
  if (layout.speakers.empty()) throw ArgumentError("speaker layout has no speakers");
  double acc = 0.0;
  for (const auto& s : layout.speakers) {
    const double d = Distance(s, layout.listener);
    if (!(d > 1e-6)) throw ArgumentError("speaker coincides with listener");
    acc += 1.0 / (d * d);
  }
  return 10.0 * std::log10(acc);
}

}  // namespace internal

// Level at the listener when every speaker plays at `spl_at_1m`.
inline double ListenerSpl(double spl_at_1m, const SpeakerLayout& layout) {
  std::vector<double> levels;
  levels.reserve(layout.speakers.size());
  for (const auto& s : layout.speakers) {
    const double d = Distance(s, layout.listener);
    if (!(d > 1e-6)) throw ArgumentError("speaker coincides with listener");
    levels.push_back(spl_at_1m - 20.0 * std::log10(d));
  }
  if (levels.empty()) throw ArgumentError("speaker layout has no speakers");
  return EnergeticCombine(levels);
}

// Per-speaker SPL at 1 m needed for `listener_spl` at the listener.
inline double RequiredSplAt1m(double listener_spl, const SpeakerLayout& layout) {
  return listener_spl - internal::LayoutGainDb(layout);
}

// Digital gain that makes all speakers together reach `desired_listener_spl`.
inline GainLookup TargetChain(const CalibrationTable& table, const SpeakerLayout& layout,
                              double desired_listener_spl) {
  return table.GainForTargetSpl(RequiredSplAt1m(desired_listener_spl, layout));
}

struct MaskerTrack {
  std::string id;
  MaskerClass masker_class = MaskerClass::kBird;
  Waveform audio;
};

struct MaskerEntry {
  MaskerTrack track;
  // Maskers without a calibration table stay in the bank but are never
  // offered for selection.
  std::optional<CalibrationTable> calibration;
};

class MaskerBank {
 public:
  void Add(MaskerTrack track, std::optional<CalibrationTable> calibration) {
    if (track.id.empty()) throw ValidationError("masker id must not be empty");
    if (index_.contains(track.id)) {
      throw ValidationError("duplicate masker id '" + track.id + "'");
    }
    if (calibration && calibration->masker_id() != track.id) {
      calibration = CalibrationTable(track.id, calibration->points());
    }
    index_.emplace(track.id, entries_.size());
    entries_.push_back({std::move(track), std::move(calibration)});
  }

  const std::vector<MaskerEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  const MaskerEntry* Find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  const MaskerEntry& Get(std::string_view id) const {
    const MaskerEntry* e = Find(id);
    if (e == nullptr) throw ValidationError("unknown masker id '" + std::string(id) + "'");
    return *e;
  }

 private:
  std::vector<MaskerEntry> entries_;
  std::map<std::string, size_t> index_;
};

struct ManifestOptions {
  double nominal_duration = 30.0;
  double duration_tolerance = 0.5;
  // Loaded audio is tagged with this calibration (dB for full-scale sine).
  double audio_calibration_db = 94.0;
};

// Reads a manifest CSV (id, class, audio_path, calib_path); relative paths are
// resolved against the manifest's directory. A row with an empty or missing
// calibration file is kept but excluded from selection, with a warning.
inline MaskerBank LoadManifest(const std::filesystem::path& path,
                               const ManifestOptions& options = {}) {
  const CsvTable csv = ReadCsv(path);
  const int id_col = csv.RequireColumn("id");
  const int class_col = csv.RequireColumn("class");
  const int audio_col = csv.RequireColumn("audio_path");
  const int calib_col = csv.RequireColumn("calib_path");
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  MaskerBank bank;
  for (size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const std::string where =
        path.string() + " row " + std::to_string(csv.line_numbers[r]) + " ('" + row[id_col] + "')";
    try {
      MaskerTrack track;
      track.id = row[id_col];
      track.masker_class = MaskerClassFromName(row[class_col]);
      const AudioFile audio = ReadWav(resolve(row[audio_col]));
      if (audio.channels.size() != 1) {
        throw ValidationError("masker audio must be mono, got " +
                              std::to_string(audio.channels.size()) + " channels");
      }
      track.audio.samples = audio.channels.front();
      track.audio.sample_rate = audio.sample_rate;
      track.audio.calibration_db = options.audio_calibration_db;
      if (std::abs(track.audio.duration() - options.nominal_duration) >
          options.duration_tolerance) {
        throw ValidationError("masker duration " + std::to_string(track.audio.duration()) +
                              " s outside " + std::to_string(options.nominal_duration) +
                              " +- " + std::to_string(options.duration_tolerance) + " s");
      }
      std::optional<CalibrationTable> calibration;
      const std::string& calib = row[calib_col];
      if (calib.empty() || !std::filesystem::exists(resolve(calib))) {
        spdlog::warn("{}: no calibration table, masker excluded from selection", where);
      } else {
        calibration = LoadCalibration(resolve(calib), track.id);
      }
      bank.Add(std::move(track), std::move(calibration));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const IoError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return bank;
}

}  // namespace amss

#endif  // AMSS_MASKER_BANK_HPP_
