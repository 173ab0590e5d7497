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

// JSON encoding of the prediction protocol (POST /v1/predict).
//
//   request:  {"ambient": {"laeq", "band_energies", "frame_hop"},
//              "candidates": [{"masker_id", "class", "gain", "smr"}]}
//   response: {"baseline": {"mean", "std"},
//              "candidates": [{"masker_id", "gain", "mean", "std"}]}
//
// Objects serialize with sorted keys and shortest round-trip doubles, so equal
// messages are byte-identical and every double survives a round trip.

#ifndef AMSS_WIRE_HPP_
#define AMSS_WIRE_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "amss/common.hpp"
#include "amss/features.hpp"
#include "amss/predictor.hpp"

namespace amss::wire {

inline constexpr const char* kPredictPath = "/v1/predict";
inline constexpr const char* kHealthPath = "/v1/health";

struct PredictRequest {
  AmbientFeatures ambient;
  std::vector<CandidateAugmentation> candidates;
};

// One candidate entry of a response; the id and gain echo the request so a
// client can check alignment.
struct CandidatePrediction {
  std::string masker_id;
  double gain = 0.0;
  IsoplDistribution distribution;
};

struct PredictResponse {
  IsoplDistribution baseline;
  std::vector<CandidatePrediction> candidates;
};

inline nlohmann::json EncodeRequest(const AmbientFeatures& ambient,
                                    std::span<const CandidateAugmentation> candidates) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : candidates) {
    cands.push_back({{"masker_id", c.masker_id},
                     {"class", MaskerClassName(c.masker_class)},
                     {"gain", c.digital_gain},
                     {"smr", c.smr}});
  }
  return {{"ambient",
           {{"laeq", ambient.laeq},
            {"band_energies", ambient.band_energies},
            {"frame_hop", ambient.frame_hop}}},
          {"candidates", std::move(cands)}};
}

namespace internal {

inline double FiniteNumber(const nlohmann::json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ValidationError(std::string("field '") + key + "' missing or not a number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ValidationError(std::string("field '") + key + "' not finite");
  return v;
}

inline std::string String(const nlohmann::json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ValidationError(std::string("field '") + key + "' missing or not a string");
  }
  return it->get<std::string>();
}

inline const nlohmann::json& Member(const nlohmann::json& obj, const char* key,
                                    nlohmann::json::value_t type) {
  if (!obj.is_object()) throw ValidationError("expected a JSON object");
  const auto it = obj.find(key);
  if (it == obj.end() || it->type() != type) {
    throw ValidationError(std::string("field '") + key + "' missing or of wrong type");
  }
  return *it;
}

inline IsoplDistribution DecodeDistribution(const nlohmann::json& obj) {
  if (!obj.is_object()) throw ValidationError("distribution must be an object");
  IsoplDistribution d{FiniteNumber(obj, "mean"), FiniteNumber(obj, "std")};
  if (d.std < 0.0) throw ValidationError("distribution std must be >= 0");
  d.mean = std::clamp(d.mean, -1.0, 1.0);
  return d;
}

}  // namespace internal

// Throws ValidationError on any schema violation.
inline PredictRequest DecodeRequest(const nlohmann::json& body) {
  using internal::FiniteNumber;
  using internal::Member;
  using nlohmann::json;
  PredictRequest req;
  const json& ambient = Member(body, "ambient", json::value_t::object);
  req.ambient.laeq = FiniteNumber(ambient, "laeq");
  req.ambient.frame_hop = FiniteNumber(ambient, "frame_hop");
  const json& bands = Member(ambient, "band_energies", json::value_t::array);
  for (const auto& row : bands) {
    if (!row.is_array()) throw ValidationError("band_energies rows must be arrays");
    std::vector<double> r;
    r.reserve(row.size());
    for (const auto& v : row) {
      if (!v.is_number()) throw ValidationError("band_energies entries must be numbers");
      r.push_back(v.get<double>());
    }
    req.ambient.band_energies.push_back(std::move(r));
  }
  const json& cands = Member(body, "candidates", json::value_t::array);
  if (cands.empty()) throw ValidationError("candidates must not be empty");
  for (const auto& c : cands) {
    if (!c.is_object()) throw ValidationError("candidate must be an object");
    CandidateAugmentation cand;
    cand.masker_id = internal::String(c, "masker_id");
    cand.masker_class = MaskerClassFromName(internal::String(c, "class"));
    cand.digital_gain = FiniteNumber(c, "gain");
    cand.smr = FiniteNumber(c, "smr");
    if (!(cand.digital_gain > 0.0)) throw ValidationError("candidate gain must be > 0");
    req.candidates.push_back(std::move(cand));
  }
  return req;
}

inline nlohmann::json EncodeResponse(const PredictResponse& r) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : r.candidates) {
    cands.push_back({{"masker_id", c.masker_id},
                     {"gain", c.gain},
                     {"mean", c.distribution.mean},
                     {"std", c.distribution.std}});
  }
  return {{"baseline", {{"mean", r.baseline.mean}, {"std", r.baseline.std}}},
          {"candidates", std::move(cands)}};
}

inline PredictResponse DecodeResponse(const nlohmann::json& body) {
  using nlohmann::json;
  PredictResponse r;
  r.baseline = internal::DecodeDistribution(internal::Member(body, "baseline", json::value_t::object));
  for (const auto& c : internal::Member(body, "candidates", json::value_t::array)) {
    if (!c.is_object()) throw ValidationError("candidate must be an object");
    r.candidates.push_back({internal::String(c, "masker_id"), internal::FiniteNumber(c, "gain"),
                            internal::DecodeDistribution(c)});
  }
  return r;
}

// Canonical text form: sorted keys, no whitespace.
inline std::string Canonical(const nlohmann::json& j) { return j.dump(); }

}  // namespace amss::wire

#endif  // AMSS_WIRE_HPP_
