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

// JSON run configuration. Every section and key is optional; absent keys keep
// library defaults.
//
//   {
//     "policy":    { ...SelectionPolicy keys... },
//     "surrogate": { "a0", "a1", "a2", "a3", "s0", "reference_level",
//                    "preferred_smr", "naturalness": { "<class>": x } },
//     "layout":    { "speakers": 4, "square_side": 2.2, "speaker_height": 2.5,
//                    "listener": [x, y, z] },
//     "mix":       { "crossfade": 0.5 },
//     "remote":    { "timeout_seconds": 5 },
//     "metrics":   { "laf_step": 0.1 }
//   }

#ifndef AMSS_CONFIG_HPP_
#define AMSS_CONFIG_HPP_

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "amss/acoustics.hpp"
#include "amss/common.hpp"
#include "amss/io.hpp"
#include "amss/masker_bank.hpp"
#include "amss/predictor.hpp"
#include "amss/selection.hpp"
#include "amss/simulator.hpp"

namespace amss {

struct RunConfig {
  SelectionPolicy policy;
  SurrogateParams surrogate;
  SpeakerLayout layout = SpeakerLayout::Square();
  MixOptions mix;
  MetricsOptions metrics;
  double remote_timeout_seconds = 5.0;
};

namespace internal {

inline void CheckKeys(const nlohmann::json& j, std::string_view section,
                      std::initializer_list<std::string_view> known) {
  if (!j.is_object()) throw ValidationError("config: '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("config: unknown key '" + key + "' in '" + std::string(section) + "'");
    }
  }
}

}  // namespace internal

inline void ApplyJson(const nlohmann::json& j, SurrogateParams& p) {
  internal::CheckKeys(j, "surrogate",
                      {"a0", "a1", "a2", "a3", "s0", "reference_level", "preferred_smr", "naturalness"});
  try {
    if (j.contains("a0")) p.a0 = j.at("a0").get<double>();
    if (j.contains("a1")) p.a1 = j.at("a1").get<double>();
    if (j.contains("a2")) p.a2 = j.at("a2").get<double>();
    if (j.contains("a3")) p.a3 = j.at("a3").get<double>();
    if (j.contains("s0")) p.s0 = j.at("s0").get<double>();
    if (j.contains("reference_level")) p.reference_level = j.at("reference_level").get<double>();
    if (j.contains("preferred_smr")) p.preferred_smr = j.at("preferred_smr").get<double>();
    if (j.contains("naturalness")) {
      for (const auto& [name, v] : j.at("naturalness").items()) {
        p.naturalness[static_cast<size_t>(MaskerClassFromName(name))] = v.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config surrogate: ") + e.what());
  }
  if (!(p.s0 >= 0.0)) throw ValidationError("config surrogate: s0 must be >= 0");
}

inline RunConfig ParseRunConfig(const nlohmann::json& j) {
  internal::CheckKeys(j, "config", {"policy", "surrogate", "layout", "mix", "remote", "metrics"});
  RunConfig c;
  if (j.contains("policy")) {
    internal::CheckKeys(j.at("policy"), "policy",
                        {"interval", "gains_per_masker", "log_gain_mean", "log_gain_std", "allowed_ids",
                         "allowed_classes", "rng_seed", "criterion", "reference_spl", "feature_bands",
                         "feature_frame_hop"});
    ApplyJson(j.at("policy"), c.policy);
  }
  if (j.contains("surrogate")) ApplyJson(j.at("surrogate"), c.surrogate);
  try {
    if (j.contains("layout")) {
      const auto& l = j.at("layout");
      internal::CheckKeys(l, "layout", {"speakers", "square_side", "speaker_height", "listener"});
      Vec3 listener{0.0, 0.0, 1.5};
      if (l.contains("listener")) {
        const auto v = l.at("listener").get<std::vector<double>>();
        if (v.size() != 3) throw ValidationError("config layout: listener needs 3 coordinates");
        listener = {v[0], v[1], v[2]};
      }
      c.layout = SpeakerLayout::Square(l.value("speakers", 4), l.value("square_side", 2.2),
                                       l.value("speaker_height", 2.5), listener);
    }
    if (j.contains("mix")) {
      internal::CheckKeys(j.at("mix"), "mix", {"crossfade"});
      c.mix.crossfade = j.at("mix").value("crossfade", c.mix.crossfade);
      if (!(c.mix.crossfade >= 0.0)) throw ValidationError("config mix: crossfade must be >= 0");
    }
    if (j.contains("remote")) {
      internal::CheckKeys(j.at("remote"), "remote", {"timeout_seconds"});
      c.remote_timeout_seconds = j.at("remote").value("timeout_seconds", c.remote_timeout_seconds);
      if (!(c.remote_timeout_seconds > 0.0)) throw ValidationError("config remote: timeout must be > 0");
    }
    if (j.contains("metrics")) {
      internal::CheckKeys(j.at("metrics"), "metrics", {"laf_step"});
      c.metrics.laf_step = j.at("metrics").value("laf_step", c.metrics.laf_step);
      if (!(c.metrics.laf_step > 0.0)) throw ValidationError("config metrics: laf_step must be > 0");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

inline RunConfig LoadRunConfig(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(ReadFile(path), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ValidationError("config " + path.string() + ": malformed JSON");
  return ParseRunConfig(j);
}

}  // namespace amss

#endif  // AMSS_CONFIG_HPP_
