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

// The masker selection loop.
//
// Every interval the engine summarises the ambient window, draws log-normal
// digital gains for every eligible masker, converts each (masker, gain) into
// a playback level through the calibration chain, asks the predictor for the
// ISOPL distribution of each candidate, and keeps the top-ranked one.
//
// A digital gain g stands for the listener level reference_spl + 20 log10 g
// (gain 1.0 <-> 65 dBA by default).

#ifndef AMSS_SELECTION_HPP_
#define AMSS_SELECTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "amss/acoustics.hpp"
#include "amss/common.hpp"
#include "amss/features.hpp"
#include "amss/masker_bank.hpp"
#include "amss/predictor.hpp"
#include "amss/rng.hpp"

namespace amss {

struct SelectionPolicy {
  double interval = 30.0;
  int gains_per_masker = 5;
  double log_gain_mean = -2.0;
  double log_gain_std = 1.5;
  // Empty lists allow everything.
  std::vector<std::string> allowed_ids;
  std::vector<MaskerClass> allowed_classes;
  uint64_t rng_seed = 0;
  RankCriterion criterion = RankCriterion::kMeanImprovement;
  double reference_spl = 65.0;
  FeatureOptions features;
};

inline void Validate(const SelectionPolicy& p) {
  if (!(p.interval > 0.0)) throw ValidationError("policy interval must be > 0");
  if (p.gains_per_masker < 1) throw ValidationError("policy gains_per_masker must be >= 1");
  if (!(p.log_gain_std >= 0.0)) throw ValidationError("policy log_gain_std must be >= 0");
  if (!std::isfinite(p.log_gain_mean)) throw ValidationError("policy log_gain_mean must be finite");
}

// i.i.d. g = exp(z), z ~ N(log_gain_mean, log_gain_std).
inline std::vector<double> SampleGains(const SelectionPolicy& policy, Rng& rng) {
  Validate(policy);
  std::vector<double> gains(policy.gains_per_masker);
  for (double& g : gains) g = std::exp(rng.Normal(policy.log_gain_mean, policy.log_gain_std));
  return gains;
}

enum class IntervalStatus { kOk, kFailed };

struct SelectionLogEntry {
  int interval_index = 0;
  double window_start = 0.0;
  IntervalStatus status = IntervalStatus::kOk;
  std::string masker_id;
  double digital_gain = 0.0;
  // Gain sent to the loudspeakers after the calibration chain.
  double playback_gain = 0.0;
  bool clamped = false;
  IsoplDistribution predicted;
  IsoplDistribution baseline;
  BackendKind backend = BackendKind::kSurrogate;
  double ambient_laeq = 0.0;
  double achieved_spl = 0.0;
  double smr = 0.0;
  int candidate_count = 0;
  std::string error;

  friend bool operator==(const SelectionLogEntry&, const SelectionLogEntry&) = default;
};

struct SessionLog {
  std::string session_id;
  std::string site;
  std::string condition;
  SelectionPolicy policy;
  std::vector<SelectionLogEntry> entries;

  bool used_fallback() const {
    return std::any_of(entries.begin(), entries.end(), [](const auto& e) {
      return e.backend == BackendKind::kRemoteFallback;
    });
  }
};

inline std::vector<const MaskerEntry*> EligibleMaskers(const MaskerBank& bank,
                                                       const SelectionPolicy& policy) {
  std::vector<const MaskerEntry*> out;
  for (const auto& e : bank.entries()) {
    if (!e.calibration) continue;
    if (!policy.allowed_ids.empty() &&
        std::find(policy.allowed_ids.begin(), policy.allowed_ids.end(), e.track.id) ==
            policy.allowed_ids.end()) {
      continue;
    }
    if (!policy.allowed_classes.empty() &&
        std::find(policy.allowed_classes.begin(), policy.allowed_classes.end(),
                  e.track.masker_class) == policy.allowed_classes.end()) {
      continue;
    }
    out.push_back(&e);
  }
  return out;
}

// Listener level reached by a digital gain once pushed through the
// calibration chain, with the playback gain that realizes it.
struct PlaybackLevel {
  double playback_gain = 0.0;
  double listener_spl = 0.0;
  bool clamped = false;
};

inline PlaybackLevel ResolvePlayback(const CalibrationTable& table, const SpeakerLayout& layout,
                                     double digital_gain, double reference_spl) {
  const double desired = reference_spl + 20.0 * std::log10(digital_gain);
  const double per_speaker = RequiredSplAt1m(desired, layout);
  PlaybackLevel out;
  out.clamped = per_speaker < table.min_spl() || per_speaker > table.max_spl();
  if (out.clamped) {
    out.playback_gain = per_speaker < table.min_spl() ? table.points().front().digital_gain
                                                      : table.points().back().digital_gain;
  } else {
    out.playback_gain = table.GainForTargetSpl(per_speaker).gain;
  }
  out.listener_spl = ListenerSpl(table.SplForGain(out.playback_gain), layout);
  return out;
}

class SelectionEngine {
 public:
  SelectionEngine(const MaskerBank& bank, SelectionPolicy policy, const Predictor& predictor,
                  SpeakerLayout layout = SpeakerLayout::Square())
      : bank_(bank),
        policy_(std::move(policy)),
        predictor_(predictor),
        layout_(std::move(layout)),
        rng_(policy_.rng_seed) {
    Validate(policy_);
  }

  const SelectionPolicy& policy() const { return policy_; }

  // One selection from the ambient window preceding the interval.
  SelectionLogEntry RunInterval(int interval_index, double window_start, const Waveform& window) {
    const auto eligible = EligibleMaskers(bank_, policy_);
    if (eligible.empty()) throw ValidationError("no eligible maskers in bank");

    SelectionLogEntry entry;
    entry.interval_index = interval_index;
    entry.window_start = window_start;

    const AmbientFeatures features = ExtractAmbientFeatures(window, policy_.features);
    entry.ambient_laeq = features.laeq;

    std::vector<CandidateAugmentation> candidates;
    std::vector<PlaybackLevel> playback;
    int clamped = 0;
    for (const MaskerEntry* m : eligible) {
      for (double g : SampleGains(policy_, rng_)) {
        const PlaybackLevel level =
            ResolvePlayback(*m->calibration, layout_, g, policy_.reference_spl);
        clamped += level.clamped ? 1 : 0;
        candidates.push_back(
            {m->track.id, m->track.masker_class, g, level.listener_spl - features.laeq});
        playback.push_back(level);
      }
    }
    if (clamped > 0) {
      spdlog::warn("interval {}: {} of {} candidate gains clamped to the calibrated range",
                   interval_index, clamped, candidates.size());
    }
    entry.candidate_count = static_cast<int>(candidates.size());

    PredictionBatch batch;
    try {
      batch = predictor_.Predict(features, candidates);
      if (batch.candidates.size() != candidates.size()) {
        throw BackendError(std::string(predictor_.name()), "wrong number of predictions");
      }
    } catch (const std::exception& e) {
      spdlog::error("interval {}: prediction failed: {}", interval_index, e.what());
      entry.status = IntervalStatus::kFailed;
      entry.error = e.what();
      return entry;
    }

    const auto order = RankCandidates(batch.candidates, batch.baseline, candidates, policy_.criterion);
    const size_t best = order.front();
    entry.masker_id = candidates[best].masker_id;
    entry.digital_gain = candidates[best].digital_gain;
    entry.playback_gain = playback[best].playback_gain;
    entry.clamped = playback[best].clamped;
    entry.achieved_spl = playback[best].listener_spl;
    entry.smr = candidates[best].smr;
    entry.predicted = batch.candidates[best];
    entry.baseline = batch.baseline;
    entry.backend = batch.backend;
    return entry;
  }

  // floor(duration / interval) selections. Interval k > 0 uses the ambient in
  // [(k-1) T, k T); interval 0 has no history and uses [0, T).
  SessionLog RunSession(const Waveform& ambient, double duration, std::string session_id = "session",
                        std::string site = "", std::string condition = "AMSS") {
    Validate(ambient);
    if (!(duration >= 0.0)) throw ArgumentError("duration must be >= 0");
    const auto count = static_cast<int>(std::floor(duration / policy_.interval + 1e-9));
    const auto window_len = static_cast<size_t>(std::llround(policy_.interval * ambient.sample_rate));
    if (ambient.samples.size() < window_len * static_cast<size_t>(count)) {
      throw ArgumentError("ambient recording shorter than the session");
    }
    SessionLog log;
    log.session_id = std::move(session_id);
    log.site = std::move(site);
    log.condition = std::move(condition);
    log.policy = policy_;
    for (int k = 0; k < count; ++k) {
      const size_t window_index = k == 0 ? 0 : static_cast<size_t>(k - 1);
      Waveform window;
      window.sample_rate = ambient.sample_rate;
      window.calibration_db = ambient.calibration_db;
      const auto begin = ambient.samples.begin() + static_cast<std::ptrdiff_t>(window_index * window_len);
      window.samples.assign(begin, begin + static_cast<std::ptrdiff_t>(window_len));
      log.entries.push_back(RunInterval(k, k * policy_.interval, window));
    }
    return log;
  }

 private:
  const MaskerBank& bank_;
  SelectionPolicy policy_;
  const Predictor& predictor_;
  SpeakerLayout layout_;
  Rng rng_;
};

// Share of completed intervals in which each masker was chosen, in percent.
inline std::map<std::string, double> SelectionFrequencyReport(std::span<const SessionLog> logs) {
  std::map<std::string, int> counts;
  int total = 0;
  for (const auto& log : logs) {
    for (const auto& e : log.entries) {
      if (e.status != IntervalStatus::kOk) continue;
      ++counts[e.masker_id];
      ++total;
    }
  }
  std::map<std::string, double> out;
  for (const auto& [id, n] : counts) out[id] = 100.0 * n / total;
  return out;
}

// ---------------------------------------------------------------------------
// JSON-lines serialization: one header object, then one object per entry.

inline nlohmann::json ToJson(const SelectionPolicy& p) {
  std::vector<std::string> classes;
  for (auto c : p.allowed_classes) classes.emplace_back(MaskerClassName(c));
  return {{"interval", p.interval},
          {"gains_per_masker", p.gains_per_masker},
          {"log_gain_mean", p.log_gain_mean},
          {"log_gain_std", p.log_gain_std},
          {"allowed_ids", p.allowed_ids},
          {"allowed_classes", classes},
          {"rng_seed", p.rng_seed},
          {"criterion", RankCriterionName(p.criterion)},
          {"reference_spl", p.reference_spl},
          {"feature_bands", p.features.bands},
          {"feature_frame_hop", p.features.frame_hop}};
}

// Applies any keys present in `j` on top of `p`.
inline void ApplyJson(const nlohmann::json& j, SelectionPolicy& p) {
  if (!j.is_object()) throw ValidationError("policy must be a JSON object");
  try {
    if (j.contains("interval")) p.interval = j.at("interval").get<double>();
    if (j.contains("gains_per_masker")) p.gains_per_masker = j.at("gains_per_masker").get<int>();
    if (j.contains("log_gain_mean")) p.log_gain_mean = j.at("log_gain_mean").get<double>();
    if (j.contains("log_gain_std")) p.log_gain_std = j.at("log_gain_std").get<double>();
    if (j.contains("allowed_ids")) p.allowed_ids = j.at("allowed_ids").get<std::vector<std::string>>();
    if (j.contains("allowed_classes")) {
      p.allowed_classes.clear();
      for (const auto& c : j.at("allowed_classes")) {
        p.allowed_classes.push_back(MaskerClassFromName(c.get<std::string>()));
      }
    }
    if (j.contains("rng_seed")) p.rng_seed = j.at("rng_seed").get<uint64_t>();
    if (j.contains("criterion")) p.criterion = RankCriterionFromName(j.at("criterion").get<std::string>());
    if (j.contains("reference_spl")) p.reference_spl = j.at("reference_spl").get<double>();
    if (j.contains("feature_bands")) p.features.bands = j.at("feature_bands").get<int>();
    if (j.contains("feature_frame_hop")) p.features.frame_hop = j.at("feature_frame_hop").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("policy: ") + e.what());
  }
  Validate(p);
}

inline nlohmann::json ToJson(const SelectionLogEntry& e) {
  return {{"type", "entry"},
          {"interval_index", e.interval_index},
          {"window_start", e.window_start},
          {"status", e.status == IntervalStatus::kOk ? "ok" : "failed"},
          {"masker_id", e.masker_id},
          {"digital_gain", e.digital_gain},
          {"playback_gain", e.playback_gain},
          {"clamped", e.clamped},
          {"predicted_mean", e.predicted.mean},
          {"predicted_std", e.predicted.std},
          {"baseline_mean", e.baseline.mean},
          {"baseline_std", e.baseline.std},
          {"backend", BackendName(e.backend)},
          {"ambient_laeq", e.ambient_laeq},
          {"achieved_spl", e.achieved_spl},
          {"smr", e.smr},
          {"candidate_count", e.candidate_count},
          {"error", e.error}};
}

inline SelectionLogEntry EntryFromJson(const nlohmann::json& j) {
  try {
    SelectionLogEntry e;
    e.interval_index = j.at("interval_index").get<int>();
    e.window_start = j.at("window_start").get<double>();
    const auto status = j.at("status").get<std::string>();
    if (status != "ok" && status != "failed") throw ValidationError("bad status '" + status + "'");
    e.status = status == "ok" ? IntervalStatus::kOk : IntervalStatus::kFailed;
    e.masker_id = j.at("masker_id").get<std::string>();
    e.digital_gain = j.at("digital_gain").get<double>();
    e.playback_gain = j.at("playback_gain").get<double>();
    e.clamped = j.at("clamped").get<bool>();
    e.predicted = {j.at("predicted_mean").get<double>(), j.at("predicted_std").get<double>()};
    e.baseline = {j.at("baseline_mean").get<double>(), j.at("baseline_std").get<double>()};
    e.backend = BackendFromName(j.at("backend").get<std::string>());
    e.ambient_laeq = j.at("ambient_laeq").get<double>();
    e.achieved_spl = j.at("achieved_spl").get<double>();
    e.smr = j.at("smr").get<double>();
    e.candidate_count = j.at("candidate_count").get<int>();
    e.error = j.value("error", "");
    if (e.interval_index < 0) throw ValidationError("negative interval_index");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("session log entry: ") + ex.what());
  }
}

inline std::string SerializeSessionLog(const SessionLog& log) {
  std::string out = nlohmann::json{{"type", "header"},
                                   {"session_id", log.session_id},
                                   {"site", log.site},
                                   {"condition", log.condition},
                                   {"entry_count", log.entries.size()},
                                   {"policy", ToJson(log.policy)}}
                        .dump();
  out += '\n';
  for (const auto& e : log.entries) {
    out += ToJson(e).dump();
    out += '\n';
  }
  return out;
}

inline SessionLog ParseSessionLog(std::string_view text) {
  SessionLog log;
  bool have_header = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw ValidationError("session log line " + std::to_string(line_number) + ": not a JSON object");
    }
    const std::string type = j.value("type", "");
    if (!have_header) {
      if (type != "header") throw ValidationError("session log must start with a header line");
      log.session_id = j.value("session_id", "");
      log.site = j.value("site", "");
      log.condition = j.value("condition", "");
      if (j.contains("policy")) ApplyJson(j.at("policy"), log.policy);
      have_header = true;
    } else if (type == "entry") {
      try {
        log.entries.push_back(EntryFromJson(j));
      } catch (const ValidationError& e) {
        throw ValidationError("session log line " + std::to_string(line_number) + ": " + e.what());
      }
    } else {
      throw ValidationError("session log line " + std::to_string(line_number) + ": unexpected type '" +
                            type + "'");
    }
  }
  if (!have_header) throw ValidationError("empty session log");
  return log;
}

}  // namespace amss

#endif  // AMSS_SELECTION_HPP_
