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

// amss: command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 data or validation error,
// 3 simulate finished but the remote predictor fell back to the surrogate.

#include <glob.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "amss.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitFallback = 3;

void WriteJson(const fs::path& path, const json& j) { amss::WriteFileAtomic(path, j.dump(2) + "\n"); }

amss::RunConfig LoadConfig(const std::string& path) {
  return path.empty() ? amss::RunConfig{} : amss::LoadRunConfig(path);
}

amss::Waveform ToWaveform(const amss::AudioFile& audio, size_t channel, double calibration_db) {
  amss::Waveform w;
  w.samples = audio.channels.at(channel);
  w.sample_rate = audio.sample_rate;
  w.calibration_db = calibration_db;
  return w;
}

// The loudest channel by LAeq, as a single waveform.
amss::Waveform LoudestChannel(const amss::AudioFile& audio, double calibration_db) {
  if (audio.channels.empty()) throw amss::ValidationError("audio has no channels");
  size_t best = 0;
  double best_level = -1e300;
  for (size_t c = 0; c < audio.channels.size(); ++c) {
    const double l = amss::Leq(ToWaveform(audio, c, calibration_db), amss::Weighting::kA);
    if (l > best_level) {
      best_level = l;
      best = c;
    }
  }
  if (audio.channels.size() > 1) {
    spdlog::info("using channel {} of {} (highest LAeq)", best, audio.channels.size());
  }
  return ToWaveform(audio, best, calibration_db);
}

amss::AudioFile ToAudio(const amss::Waveform& w) { return {w.sample_rate, {w.samples}}; }

struct SimulateArgs {
  std::string manifest;
  std::string ambient;
  double duration = 600.0;
  uint64_t seed = 0;
  std::string predictor;
  std::string out = ".";
  std::string config;
  std::string session_id;
  std::string site;
  std::string condition = "AMSS";
  double calibration = 94.0;
};

int Simulate(const SimulateArgs& a) {
  amss::RunConfig cfg = LoadConfig(a.config);
  cfg.policy.rng_seed = a.seed;

  std::string endpoint = a.predictor;
  if (endpoint.empty()) {
    const char* env = std::getenv("AMSS_PREDICTOR_URL");
    endpoint = env != nullptr && *env != '\0' ? env : "local";
  }
  std::unique_ptr<amss::Predictor> predictor;
  const amss::SurrogatePredictor surrogate(cfg.surrogate);
  if (endpoint == "local") {
    predictor = std::make_unique<amss::SurrogatePredictor>(cfg.surrogate);
  } else {
    predictor = std::make_unique<amss::RemotePredictor>(
        amss::RemoteOptions{endpoint, cfg.remote_timeout_seconds}, surrogate);
  }

  amss::ManifestOptions manifest_options;
  manifest_options.nominal_duration = cfg.policy.interval;
  const amss::MaskerBank bank = amss::LoadManifest(a.manifest, manifest_options);
  amss::Waveform ambient = LoudestChannel(amss::ReadWav(a.ambient), a.calibration);

  const std::string id = a.session_id.empty() ? "session-" + std::to_string(a.seed) : a.session_id;
  amss::SelectionEngine engine(bank, cfg.policy, *predictor, cfg.layout);
  const amss::SessionLog log = engine.RunSession(ambient, a.duration, id, a.site, a.condition);

  // Render only the span the log covers.
  const auto covered = static_cast<size_t>(
      std::llround(cfg.policy.interval * ambient.sample_rate * static_cast<double>(log.entries.size())));
  ambient.samples.resize(std::min(ambient.samples.size(), covered));
  const amss::Waveform augmented = amss::MixSession(ambient, log, bank, cfg.mix);
  const amss::SessionReport report = amss::MakeSessionReport(ambient, augmented, cfg.metrics);

  const fs::path out(a.out);
  fs::create_directories(out);
  amss::WriteFileAtomic(out / (id + ".jsonl"), amss::SerializeSessionLog(log));
  amss::WriteWav(out / (id + ".amb.wav"), ToAudio(ambient));
  amss::WriteWav(out / (id + ".amss.wav"), ToAudio(augmented));
  amss::WriteFileAtomic(out / (id + ".amb.laf.csv"), amss::LevelSeriesCsv(report.ambient.laf_series));
  amss::WriteFileAtomic(out / (id + ".amss.laf.csv"), amss::LevelSeriesCsv(report.augmented.laf_series));
  json rj = amss::ToJson(report);
  rj["session_id"] = id;
  rj["predictor"] = endpoint;
  rj["entries"] = log.entries.size();
  rj["fallback"] = log.used_fallback();
  rj["selection_frequency"] = amss::SelectionFrequencyReport(std::span(&log, 1));
  WriteJson(out / (id + ".report.json"), rj);

  std::cout << rj.dump(2) << "\n";
  if (log.used_fallback()) {
    spdlog::warn("remote predictor fell back to the local surrogate during the session");
    return kExitFallback;
  }
  return kExitOk;
}

int Metrics(const std::string& in, double calibration, const std::string& out, const std::string& config) {
  const amss::RunConfig cfg = LoadConfig(config);
  const amss::AudioFile audio = amss::ReadWav(in);
  std::vector<amss::Waveform> channels;
  for (size_t c = 0; c < audio.channels.size(); ++c) channels.push_back(ToWaveform(audio, c, calibration));
  const amss::StevensLoudness loudness(cfg.metrics.laf_step);
  const amss::MetricsReport report = amss::ComputeMetrics(channels, loudness, cfg.metrics);
  const json j = amss::ToJson(report);
  if (!out.empty()) {
    const fs::path dir(out);
    fs::create_directories(dir);
    const std::string stem = fs::path(in).stem().string();
    WriteJson(dir / (stem + ".metrics.json"), j);
    amss::WriteFileAtomic(dir / (stem + ".laf.csv"), amss::LevelSeriesCsv(report.laf_series));
  }
  json summary = j;
  summary.erase("laf_series");
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

int AnalyzeSurvey(const std::string& csv, const std::string& out) {
  const auto records = amss::ReadSurveyCsv(csv);
  const auto table = amss::MakeContrastTable(records);
  const std::string contrasts = amss::ContrastsCsv(table);
  if (!out.empty()) {
    const fs::path dir(out);
    fs::create_directories(dir);
    amss::WriteFileAtomic(dir / "survey_cells.csv", amss::CellsCsv(table));
    amss::WriteFileAtomic(dir / "survey_contrasts.csv", contrasts);
    amss::WriteFileAtomic(dir / "survey_long.csv", amss::LongFormatCsv(records));
    amss::WriteFileAtomic(dir / "survey_kendall.csv", amss::CorrelationCsv(amss::KendallMatrix(records)));
  }
  std::cout << contrasts;
  return kExitOk;
}

std::vector<std::string> Glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> paths;
  if (rc == 0) {
    for (size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  if (rc != 0 && rc != GLOB_NOMATCH) throw amss::IoError("glob failed for '" + pattern + "'");
  return paths;
}

int AnalyzeLogs(const std::string& pattern, const std::string& out) {
  const auto paths = Glob(pattern);
  if (paths.empty()) throw amss::ValidationError("no session logs match '" + pattern + "'");
  std::vector<amss::SessionLog> logs;
  for (const auto& p : paths) {
    try {
      logs.push_back(amss::ParseSessionLog(amss::ReadFile(p)));
    } catch (const amss::ValidationError& e) {
      throw amss::ValidationError(p + ": " + e.what());
    }
  }
  int intervals = 0, failed = 0, fallback = 0;
  for (const auto& log : logs) {
    for (const auto& e : log.entries) {
      ++intervals;
      failed += e.status == amss::IntervalStatus::kFailed ? 1 : 0;
      fallback += e.backend == amss::BackendKind::kRemoteFallback ? 1 : 0;
    }
  }
  const json j = {{"sessions", logs.size()},
                  {"intervals", intervals},
                  {"failed_intervals", failed},
                  {"fallback_intervals", fallback},
                  {"selection_frequency_percent", amss::SelectionFrequencyReport(logs)}};
  if (!out.empty()) WriteJson(out, j);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int CalibCheck(const std::string& table_path, double step, double tolerance) {
  if (!(step > 0.0)) throw amss::ValidationError("--step must be > 0");
  const amss::CalibrationTable table = amss::LoadCalibration(table_path, fs::path(table_path).stem().string());
  json rows = json::array();
  double worst = 0.0;
  for (double target = table.min_spl(); target <= table.max_spl() + 1e-9; target += step) {
    const amss::GainLookup g = table.GainForTargetSpl(target);
    const double achieved = table.SplForGain(g.gain);
    worst = std::max(worst, std::abs(achieved - target));
    rows.push_back({{"target_spl", target}, {"gain", g.gain}, {"achieved_spl", achieved}});
  }
  const json j = {{"table", table_path},
                  {"min_spl", table.min_spl()},
                  {"max_spl", table.max_spl()},
                  {"max_abs_error_db", worst},
                  {"tolerance_db", tolerance},
                  {"pass", worst < tolerance},
                  {"points", rows}};
  std::cout << j.dump(2) << "\n";
  return worst < tolerance ? kExitOk : kExitData;
}

int Serve(const std::string& bind, const std::string& config) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--bind", "expected HOST:PORT");
  const std::string host = bind.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--bind", "bad port in '" + bind + "'");
  }
  amss::InferenceService service(LoadConfig(config).surrogate);
  spdlog::info("serving on {}:{}", host, port);
  service.Run(host, port);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic masker selection: simulation, metrics and analysis"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a seeded selection session and render it");
  simulate->add_option("--manifest", sim.manifest, "Masker manifest CSV")->required()->check(CLI::ExistingFile);
  simulate->add_option("--ambient", sim.ambient, "Ambient recording (WAV)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--duration", sim.duration, "Session length in seconds")->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--predictor", sim.predictor,
                       "'local' or a service URL (default: $AMSS_PREDICTOR_URL, else local)");
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_option("--config", sim.config, "JSON config")->check(CLI::ExistingFile);
  simulate->add_option("--session-id", sim.session_id, "Session id (default session-<seed>)");
  simulate->add_option("--site", sim.site, "Site label");
  simulate->add_option("--condition", sim.condition, "Condition label");
  simulate->add_option("--calibration", sim.calibration, "dB SPL of a full-scale RMS of 1/sqrt(2)");

  std::string metrics_in, metrics_out, metrics_config;
  double metrics_cal = 94.0;
  auto* metrics = app.add_subcommand("metrics", "LAeq, LCeq, N95 and the LAF series of a recording");
  metrics->add_option("--in", metrics_in, "Input WAV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--calibration", metrics_cal, "dB SPL of a full-scale sine");
  metrics->add_option("--out", metrics_out, "Directory for <stem>.metrics.json and <stem>.laf.csv");
  metrics->add_option("--config", metrics_config, "JSON config")->check(CLI::ExistingFile);

  auto* analyze = app.add_subcommand("analyze", "Survey and selection-log analysis");
  analyze->require_subcommand(1);
  std::string survey_csv, survey_out;
  auto* survey = analyze->add_subcommand("survey", "Per-cell means and percent-of-scale contrasts");
  survey->add_option("--csv", survey_csv, "Survey CSV")->required()->check(CLI::ExistingFile);
  survey->add_option("--out", survey_out, "Directory for the CSV tables");
  std::string logs_glob, logs_out;
  auto* logs = analyze->add_subcommand("logs", "Selection frequency over session logs");
  logs->add_option("--glob", logs_glob, "Glob of session-log JSONL files")->required();
  logs->add_option("--out", logs_out, "Write the report JSON here");

  auto* calib = app.add_subcommand("calib", "Calibration tables");
  calib->require_subcommand(1);
  std::string calib_table;
  double calib_step = 0.5, calib_tol = 0.05;
  auto* check = calib->add_subcommand("check", "Round-trip interpolation report");
  check->add_option("--table", calib_table, "Calibration CSV")->required()->check(CLI::ExistingFile);
  check->add_option("--step", calib_step, "Target step in dB");
  check->add_option("--tolerance", calib_tol, "Maximum allowed error in dB");

  std::string bind = "127.0.0.1:8080", serve_config;
  auto* serve = app.add_subcommand("serve", "Serve the surrogate predictor over HTTP");
  serve->add_option("--bind", bind, "HOST:PORT");
  serve->add_option("--config", serve_config, "JSON config")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("amss"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*simulate) return Simulate(sim);
    if (*metrics) return Metrics(metrics_in, metrics_cal, metrics_out, metrics_config);
    if (*survey) return AnalyzeSurvey(survey_csv, survey_out);
    if (*logs) return AnalyzeLogs(logs_glob, logs_out);
    if (*check) return CalibCheck(calib_table, calib_step, calib_tol);
    if (*serve) return Serve(bind, serve_config);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
