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

#ifndef AMSS_REMOTE_PREDICTOR_HPP_
#define AMSS_REMOTE_PREDICTOR_HPP_

#include <atomic>
#include <chrono>
#include <cmath>
#include <span>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "amss/predictor.hpp"
#include "amss/wire.hpp"

namespace amss {

struct RemoteOptions {
  // Base URL, e.g. "http://127.0.0.1:8080".
  std::string endpoint;
  double timeout_seconds = 5.0;
};

// HTTP client for an inference service. One POST per call; any transport
// failure, non-200 status or response that does not match the request
// candidate-for-candidate discards the whole batch and answers from the local
// surrogate instead, tagged kRemoteFallback.
class RemotePredictor : public Predictor {
 public:
  RemotePredictor(RemoteOptions options, SurrogatePredictor fallback = SurrogatePredictor())
      : options_(std::move(options)), fallback_(std::move(fallback)) {
    if (options_.endpoint.empty()) throw ArgumentError("remote predictor needs an endpoint");
    if (!(options_.timeout_seconds > 0.0)) throw ArgumentError("timeout must be positive");
  }

  std::string_view name() const override { return "remote"; }
  const RemoteOptions& options() const { return options_; }
  int fallback_count() const { return fallbacks_.load(); }

  PredictionBatch Predict(const AmbientFeatures& ambient,
                          std::span<const CandidateAugmentation> candidates) const override {
    if (candidates.empty()) throw ArgumentError("predict needs at least one candidate");
    std::string failure;
    try {
      if (auto batch = TryRemote(ambient, candidates, failure)) return *std::move(batch);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    ++fallbacks_;
    spdlog::warn("remote predictor {} failed ({}); using local surrogate", options_.endpoint,
                 failure);
    PredictionBatch batch = fallback_.Predict(ambient, candidates);
    batch.backend = BackendKind::kRemoteFallback;
    return batch;
  }

 private:
  std::optional<PredictionBatch> TryRemote(const AmbientFeatures& ambient,
                                           std::span<const CandidateAugmentation> candidates,
                                           std::string& failure) const {
    httplib::Client client(options_.endpoint);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(options_.timeout_seconds));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    const std::string body = wire::Canonical(wire::EncodeRequest(ambient, candidates));
    const auto res = client.Post(wire::kPredictPath, body, "application/json");
    if (!res) {
      failure = "transport error: " + httplib::to_string(res.error());
      return std::nullopt;
    }
    if (res->status != 200) {
      failure = "HTTP status " + std::to_string(res->status);
      return std::nullopt;
    }
    const auto parsed = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      failure = "protocol error: response is not JSON";
      return std::nullopt;
    }
    wire::PredictResponse response;
    try {
      response = wire::DecodeResponse(parsed);
    } catch (const ValidationError& e) {
      failure = std::string("protocol error: ") + e.what();
      return std::nullopt;
    }
    if (response.candidates.size() != candidates.size()) {
      failure = "protocol error: expected " + std::to_string(candidates.size()) +
                " candidates, got " + std::to_string(response.candidates.size());
      return std::nullopt;
    }
    PredictionBatch batch;
    batch.backend = BackendKind::kRemote;
    batch.baseline = response.baseline;
    for (size_t i = 0; i < candidates.size(); ++i) {
      const auto& got = response.candidates[i];
      if (got.masker_id != candidates[i].masker_id || got.gain != candidates[i].digital_gain) {
        failure = "protocol error: candidate " + std::to_string(i) + " does not match request";
        return std::nullopt;
      }
      batch.candidates.push_back(got.distribution);
    }
    return batch;
  }

  RemoteOptions options_;
  SurrogatePredictor fallback_;
  mutable std::atomic<int> fallbacks_{0};
};

}  // namespace amss

#endif  // AMSS_REMOTE_PREDICTOR_HPP_
