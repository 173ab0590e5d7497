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

// Stateless HTTP front end for a Predictor (the surrogate by default).
//
//   GET  /v1/health   -> 200 "ok"
//   POST /v1/predict  -> 200 response JSON | 400 {"error": ...}
//   anything else     -> 404 {"error": "not found"}

#ifndef AMSS_INFERENCE_SERVICE_HPP_
#define AMSS_INFERENCE_SERVICE_HPP_

#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "amss/predictor.hpp"
#include "amss/wire.hpp"

namespace amss {

struct ServiceReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class InferenceService {
 public:
  explicit InferenceService(SurrogateParams params = {})
      : predictor_(std::make_shared<SurrogatePredictor>(params)) {
    Install();
  }
  explicit InferenceService(std::shared_ptr<const Predictor> predictor)
      : predictor_(std::move(predictor)) {
    Install();
  }

  ~InferenceService() { Stop(); }
  InferenceService(const InferenceService&) = delete;
  InferenceService& operator=(const InferenceService&) = delete;

  // Request handling without the transport, for tests and embedding.
  ServiceReply Handle(std::string_view method, std::string_view path,
                      std::string_view body) const {
    if (path == wire::kHealthPath && method == "GET") return {200, "ok", "text/plain"};
    if (path == wire::kPredictPath && method == "POST") return HandlePredict(body);
    return Error(404, "not found");
  }

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port; throws IoError if binding fails.
  int Start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
      bound = server_.bind_to_any_port(host);
    } else if (!server_.bind_to_port(host, port)) {
      bound = -1;
    }
    if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return bound;
  }

  // Binds and serves on the calling thread until Stop() is called.
  void Run(const std::string& host, int port) {
    if (!server_.listen(host, port)) throw IoError("cannot serve on " + host + ":" + std::to_string(port));
  }

  void Stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  static ServiceReply Error(int status, const std::string& message) {
    return {status, wire::Canonical(nlohmann::json{{"error", message}})};
  }

  ServiceReply HandlePredict(std::string_view body) const {
    const auto parsed = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) return Error(400, "malformed JSON");
    wire::PredictRequest req;
    try {
      req = wire::DecodeRequest(parsed);
    } catch (const ValidationError& e) {
      return Error(400, e.what());
    }
    PredictionBatch batch;
    try {
      batch = predictor_->Predict(req.ambient, req.candidates);
    } catch (const std::exception& e) {
      return Error(500, e.what());
    }
    wire::PredictResponse resp;
    resp.baseline = batch.baseline;
    for (size_t i = 0; i < req.candidates.size(); ++i) {
      resp.candidates.push_back(
          {req.candidates[i].masker_id, req.candidates[i].digital_gain, batch.candidates[i]});
    }
    return {200, wire::Canonical(wire::EncodeResponse(resp))};
  }

  void Install() {
    auto reply = [](httplib::Response& res, const ServiceReply& r) {
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server_.Get(wire::kHealthPath, [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, Handle("GET", req.path, req.body));
    });
    server_.Post(wire::kPredictPath, [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, Handle("POST", req.path, req.body));
    });
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.status == 404) {
        res.set_content(wire::Canonical(nlohmann::json{{"error", "not found"}}), "application/json");
      }
    });
  }

  std::shared_ptr<const Predictor> predictor_;
  httplib::Server server_;
  std::thread thread_;
};

}  // namespace amss

#endif  // AMSS_INFERENCE_SERVICE_HPP_
