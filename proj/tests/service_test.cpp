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

#include <chrono>
#include <functional>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "amss/inference_service.hpp"
#include "amss/remote_predictor.hpp"
#include "amss/wire.hpp"
#include "test_support.hpp"

namespace amss {
namespace {

using nlohmann::json;

AmbientFeatures SomeAmbient() {
  AmbientFeatures a;
  a.laeq = 66.25;
  a.frame_hop = 0.1;
  a.band_energies = {{-1.5, 0.25, 3.0}, {-2.0, 0.5, 1.0 / 3.0}};
  return a;
}

std::vector<CandidateAugmentation> SomeCandidates() {
  return {{"bird01", MaskerClass::kBird, 0.1353352832366127, -16.7},
          {"traffic01", MaskerClass::kTraffic, 1.0 / 7.0, -3.3},
          {"water01", MaskerClass::kWater, 0.5, 2.0}};
}

TEST(WireTest, RequestRoundTripIsExact) {
  const auto cands = SomeCandidates();
  const json j = json::parse(wire::Canonical(wire::EncodeRequest(SomeAmbient(), cands)));
  const wire::PredictRequest r = wire::DecodeRequest(j);
  EXPECT_EQ(r.ambient.laeq, 66.25);
  EXPECT_EQ(r.ambient.band_energies, SomeAmbient().band_energies);
  ASSERT_EQ(r.candidates.size(), 3u);
  for (size_t i = 0; i < cands.size(); ++i) {
    EXPECT_EQ(r.candidates[i].masker_id, cands[i].masker_id);
    EXPECT_EQ(r.candidates[i].masker_class, cands[i].masker_class);
    EXPECT_EQ(r.candidates[i].digital_gain, cands[i].digital_gain);  // bitwise
    EXPECT_EQ(r.candidates[i].smr, cands[i].smr);
  }
}

TEST(WireTest, CanonicalFormSortsKeys) {
  EXPECT_EQ(wire::Canonical(json{{"b", 1}, {"a", 2}}), R"({"a":2,"b":1})");
}

TEST(WireTest, RequestValidation) {
  const json good = wire::EncodeRequest(SomeAmbient(), SomeCandidates());
  auto broken = [&](auto mutate) {
    json j = good;
    mutate(j);
    return j;
  };
  EXPECT_THROW(wire::DecodeRequest(json::array()), ValidationError);
  EXPECT_THROW(wire::DecodeRequest(broken([](json& j) { j.erase("ambient"); })), ValidationError);
  EXPECT_THROW(wire::DecodeRequest(broken([](json& j) { j["candidates"] = json::array(); })), ValidationError);
  EXPECT_THROW(wire::DecodeRequest(broken([](json& j) { j["candidates"][0]["gain"] = -1; })), ValidationError);
  EXPECT_THROW(wire::DecodeRequest(broken([](json& j) { j["candidates"][0]["gain"] = "x"; })), ValidationError);
  EXPECT_THROW(wire::DecodeRequest(broken([](json& j) { j["candidates"][0]["class"] = "cicada"; })), ValidationError);
  EXPECT_THROW(wire::DecodeRequest(broken([](json& j) { j["ambient"]["band_energies"][0][0] = "x"; })),
               ValidationError);
  EXPECT_THROW(wire::DecodeRequest(broken([](json& j) { j["candidates"][1].erase("masker_id"); })),
               ValidationError);
}

TEST(WireTest, ResponseValidationAndClamp) {
  json r = {{"baseline", {{"mean", 1.5}, {"std", 0.1}}},
            {"candidates", {{{"masker_id", "a"}, {"gain", 0.1}, {"mean", -0.2}, {"std", 0.0}}}}};
  const auto d = wire::DecodeResponse(r);
  EXPECT_DOUBLE_EQ(d.baseline.mean, 1.0);
  r["candidates"][0]["std"] = -0.1;
  EXPECT_THROW(wire::DecodeResponse(r), ValidationError);
  r.erase("baseline");
  EXPECT_THROW(wire::DecodeResponse(r), ValidationError);
}

TEST(ServiceHandleTest, Routes) {
  const InferenceService svc;
  const auto health = svc.Handle("GET", "/v1/health", "");
  EXPECT_EQ(health.status, 200);
  EXPECT_EQ(health.body, "ok");
  EXPECT_EQ(svc.Handle("GET", "/v2/other", "").status, 404);
  EXPECT_EQ(json::parse(svc.Handle("GET", "/v2/other", "").body)["error"], "not found");
  EXPECT_EQ(svc.Handle("POST", "/v1/predict", "{not json").status, 400);
  const auto bad = svc.Handle("POST", "/v1/predict", R"({"ambient":{},"candidates":[]})");
  EXPECT_EQ(bad.status, 400);
  EXPECT_TRUE(json::parse(bad.body).contains("error"));
}

TEST(ServiceHandleTest, PredictMatchesLocalSurrogate) {
  const InferenceService svc;
  const auto cands = SomeCandidates();
  const auto reply =
      svc.Handle("POST", "/v1/predict", wire::Canonical(wire::EncodeRequest(SomeAmbient(), cands)));
  ASSERT_EQ(reply.status, 200);
  const auto resp = wire::DecodeResponse(json::parse(reply.body));
  const PredictionBatch local = SurrogatePredictor().Predict(SomeAmbient(), cands);
  EXPECT_EQ(resp.baseline, local.baseline);
  ASSERT_EQ(resp.candidates.size(), cands.size());
  for (size_t i = 0; i < cands.size(); ++i) {
    EXPECT_EQ(resp.candidates[i].distribution, local.candidates[i]);
    EXPECT_EQ(resp.candidates[i].masker_id, cands[i].masker_id);
  }
}

class ThrowingPredictor : public Predictor {
 public:
  std::string_view name() const override { return "throwing"; }
  PredictionBatch Predict(const AmbientFeatures&, std::span<const CandidateAugmentation>) const override {
    throw BackendError("throwing", "model unavailable");
  }
};

TEST(ServiceHandleTest, PredictorFailureIs500) {
  const InferenceService svc(std::make_shared<ThrowingPredictor>());
  const auto reply = svc.Handle("POST", "/v1/predict",
                                wire::Canonical(wire::EncodeRequest(SomeAmbient(), SomeCandidates())));
  EXPECT_EQ(reply.status, 500);
}

std::string Url(int port) { return "http://127.0.0.1:" + std::to_string(port); }

TEST(RemotePredictorTest, ParityWithLocalOverHttp) {
  InferenceService svc;
  const int port = svc.Start("127.0.0.1", 0);
  const RemotePredictor remote({Url(port), 5.0});
  const auto cands = SomeCandidates();
  const PredictionBatch got = remote.Predict(SomeAmbient(), cands);
  const PredictionBatch want = SurrogatePredictor().Predict(SomeAmbient(), cands);
  EXPECT_EQ(got.backend, BackendKind::kRemote);
  EXPECT_EQ(got.baseline, want.baseline);
  EXPECT_EQ(got.candidates, want.candidates);
  EXPECT_EQ(remote.fallback_count(), 0);

  httplib::Client client(Url(port));
  auto h = client.Get("/v1/health");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->status, 200);
  auto nf = client.Get("/nothing");
  ASSERT_TRUE(nf);
  EXPECT_EQ(nf->status, 404);
  EXPECT_EQ(json::parse(nf->body)["error"], "not found");
  svc.Stop();
}

TEST(RemotePredictorTest, ConcurrentClients) {
  InferenceService svc;
  const int port = svc.Start("127.0.0.1", 0);
  const RemotePredictor remote({Url(port), 5.0});
  const auto want = SurrogatePredictor().Predict(SomeAmbient(), SomeCandidates());
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 5; ++i) {
        const auto got = remote.Predict(SomeAmbient(), SomeCandidates());
        if (got.candidates != want.candidates || got.backend != BackendKind::kRemote) ++mismatches;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
  svc.Stop();
}

TEST(RemotePredictorTest, DeadEndpointFallsBack) {
  int port = 0;
  {
    InferenceService svc;
    port = svc.Start("127.0.0.1", 0);
    svc.Stop();
  }
  const RemotePredictor remote({Url(port), 1.0});
  const auto got = remote.Predict(SomeAmbient(), SomeCandidates());
  EXPECT_EQ(got.backend, BackendKind::kRemoteFallback);
  EXPECT_EQ(got.candidates, SurrogatePredictor().Predict(SomeAmbient(), SomeCandidates()).candidates);
  EXPECT_EQ(remote.fallback_count(), 1);
}

// A raw server answering every predict call with a canned reply.
class CannedServer {
 public:
  explicit CannedServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/predict", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~CannedServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return Url(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

void ExpectFallback(const std::function<void(const httplib::Request&, httplib::Response&)>& handler,
                    double timeout = 2.0) {
  CannedServer server(handler);
  const RemotePredictor remote({server.url(), timeout});
  const auto got = remote.Predict(SomeAmbient(), SomeCandidates());
  EXPECT_EQ(got.backend, BackendKind::kRemoteFallback);
  EXPECT_EQ(remote.fallback_count(), 1);
}

TEST(RemotePredictorTest, FallsBackOnBadResponses) {
  ExpectFallback([](const auto&, auto& res) {
    res.status = 503;
    res.set_content("{}", "application/json");
  });
  ExpectFallback([](const auto&, auto& res) { res.set_content("<html>", "text/html"); });
  ExpectFallback([](const auto&, auto& res) {
    res.set_content(R"({"baseline":{"mean":0,"std":0.1},"candidates":[]})", "application/json");
  });
  // Right count, wrong alignment.
  ExpectFallback([](const httplib::Request& req, httplib::Response& res) {
    json in = json::parse(req.body);
    json out = {{"baseline", {{"mean", 0}, {"std", 0.1}}}, {"candidates", json::array()}};
    for (const auto& c : in["candidates"]) {
      out["candidates"].push_back({{"masker_id", "other"}, {"gain", c["gain"]}, {"mean", 0}, {"std", 0.1}});
    }
    res.set_content(out.dump(), "application/json");
  });
}

TEST(RemotePredictorTest, FallsBackOnTimeout) {
  const auto start = std::chrono::steady_clock::now();
  ExpectFallback(
      [](const auto&, auto& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1500));
        res.set_content("{}", "application/json");
      },
      0.3);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(RemotePredictorTest, ConstructorValidation) {
  EXPECT_THROW(RemotePredictor({"", 1.0}), ArgumentError);
  EXPECT_THROW(RemotePredictor({"http://x", 0.0}), ArgumentError);
  const RemotePredictor r({"http://127.0.0.1:1", 1.0});
  EXPECT_THROW(r.Predict(SomeAmbient(), std::vector<CandidateAugmentation>{}), ArgumentError);
}

}  // namespace
}  // namespace amss
