// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command-line front end: offline and streaming enhancement, latency and
// causality reports, metrics, benchmarks and weight initialization.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tcnse/error.h"
#include "tcnse/features.h"
#include "tcnse/io.h"
#include "tcnse/losses.h"
#include "tcnse/model.h"
#include "tcnse/streaming.h"

namespace {

using tcnse::AudioSignal;

struct Paths {
  std::string config;
  std::string weights;
  std::string in;
  std::string out_speech;
  std::string out_noise;
};

std::shared_ptr<const tcnse::Model> LoadModel(const Paths &p) {
  const tcnse::RunConfig rc = tcnse::LoadRunConfig(p.config);
  const tcnse::ModelWeights w = tcnse::LoadWeights(p.weights, rc.model);
  return std::make_shared<const tcnse::Model>(rc.model, w);
}

void WriteOutputs(const Paths &p, const std::vector<AudioSignal> &outputs) {
  std::size_t clipped = tcnse::WriteWav(p.out_speech, outputs[0]);
  if (!p.out_noise.empty()) {
    if (outputs.size() < 2) {
      tcnse::Fail(tcnse::ErrorCode::kInvalidConfig,
                  "--out-noise needs a model with two sources");
    }
    clipped += tcnse::WriteWav(p.out_noise, outputs[1]);
  }
  std::printf("samples=%lld\n", static_cast<long long>(outputs[0].size()));
  std::printf("sources=%zu\n", outputs.size());
  std::printf("clipped=%zu\n", clipped);
}

void RunEnhance(const Paths &p) {
  auto model = LoadModel(p);
  const AudioSignal x = tcnse::ReadWav(p.in);
  WriteOutputs(p, model->EnhanceOffline(x));
}

void RunStream(const Paths &p) {
  auto model = LoadModel(p);
  const AudioSignal x = tcnse::ReadWav(p.in);
  tcnse::StreamState state(model);
  const int hop = state.hop();
  const int k = model->config().num_sources();
  std::vector<std::vector<double>> acc(k);
  auto append = [&](const std::vector<Eigen::VectorXd> &chunk) {
    for (std::size_t s = 0; s < chunk.size(); ++s) {
      acc[s].insert(acc[s].end(), chunk[s].data(), chunk[s].data() + chunk[s].size());
    }
  };
  // The last partial hop is zero padded; the padding falls inside the
  // trailing frame offline processing pads anyway, so trimming afterwards
  // gives the same samples.
  std::vector<double> chunk(hop, 0.0);
  for (Eigen::Index start = 0; start < x.size(); start += hop) {
    std::fill(chunk.begin(), chunk.end(), 0.0);
    const Eigen::Index n = std::min<Eigen::Index>(hop, x.size() - start);
    std::copy_n(x.samples.data() + start, n, chunk.begin());
    append(state.Push(chunk));
  }
  append(state.Flush());
  std::vector<AudioSignal> outputs(k);
  for (int s = 0; s < k; ++s) {
    if (acc[s].size() < static_cast<std::size_t>(x.size())) {
      tcnse::Fail(tcnse::ErrorCode::kShapeMismatch, "stream produced fewer samples than it consumed");
    }
    outputs[s].sample_rate = x.sample_rate;
    outputs[s].samples = Eigen::Map<const Eigen::VectorXd>(acc[s].data(), x.size());
  }
  WriteOutputs(p, outputs);
}

void RunLatency(const std::string &config_path) {
  const tcnse::RunConfig rc = tcnse::LoadRunConfig(config_path);
  const tcnse::LatencyReport r = tcnse::AnalyzeLatency(rc.model);
  std::printf("future_frames=%d\n", r.future_frames);
  std::printf("conv_frames=%d\n", r.conv_frames);
  std::printf("framing_frames=%d\n", r.framing_frames);
  std::printf("framing_convention=%s\n", r.framing_convention.c_str());
  std::printf("frames_per_window=%d\n", r.frames_per_window);
  std::printf("hop_samples=%d\n", r.hop_samples);
  std::printf("hop_ms=%.3f\n", r.hop_ms);
  std::printf("lookahead_ms=%.3f\n", r.lookahead_ms);
  std::printf("dependence_samples=%lld\n", static_cast<long long>(r.dependence_samples));
  std::printf("emission_delay_frames=%d\n", r.emission_delay_frames);
}

void RunProbe(const Paths &p) {
  auto model = LoadModel(p);
  const tcnse::ProbeResult r = tcnse::ProbeCausality(*model);
  const tcnse::LatencyReport declared = tcnse::AnalyzeLatency(model->config());
  std::printf("measured_frames=%d\n", r.measured_frames);
  std::printf("measured_conv_frames=%d\n", r.conv_frames);
  std::printf("dependence_samples=%lld\n", static_cast<long long>(r.dependence_samples));
  std::printf("declared_frames=%d\n", declared.future_frames);
  std::printf("positions=%d\n", r.positions);
}

void RunMetrics(const std::string &clean_path, const std::string &est_path,
                const std::string &loss_name, const std::string &config_path) {
  const AudioSignal clean = tcnse::ReadWav(clean_path);
  const AudioSignal est = tcnse::ReadWav(est_path);
  tcnse::LossConfig loss_config;
  if (!config_path.empty()) loss_config = tcnse::LoadRunConfig(config_path).loss;
  const tcnse::LossKind kind = tcnse::ParseLossKind(loss_name);
  const tcnse::LogFilterbankExtractor extractor;
  const tcnse::LossReport loss =
      tcnse::ComputeLoss(kind, {clean}, {est}, loss_config, extractor);
  std::printf("si_snr_db=%.6f\n", tcnse::SiSnrMetric(clean, est));
  std::printf("ssnr_db=%.6f\n", tcnse::SsnrMetric(clean, est));
  std::printf("loss_kind=%s\n", tcnse::LossKindName(kind).c_str());
  std::printf("loss=%.9g\n", loss.value);
  std::printf("status=%s\n",
              loss.status == tcnse::LossStatus::kPerfectEstimate ? "PerfectEstimate" : "Ok");
}

void RunBench(const Paths &p, double seconds, std::uint64_t seed) {
  auto model = LoadModel(p);
  AudioSignal x;
  if (!p.in.empty()) {
    x = tcnse::ReadWav(p.in);
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.1);
    x.sample_rate = model->config().sample_rate;
    x.samples.resize(static_cast<Eigen::Index>(seconds * x.sample_rate));
    for (double &v : x.samples) v = noise(rng);
  }
  const tcnse::BenchReport r = tcnse::BenchPerFrame(model, x);
  std::printf("hop_ms=%.3f\n", r.hop_ms);
  std::printf("mean_ms=%.4f\n", r.mean_ms);
  std::printf("std_ms=%.4f\n", r.std_ms);
  std::printf("p50_ms=%.4f\n", r.p50_ms);
  std::printf("p95_ms=%.4f\n", r.p95_ms);
  std::printf("frames=%lld\n", static_cast<long long>(r.frames));
}

void RunInitWeights(const std::string &config_path, std::optional<std::uint64_t> seed,
                    const std::string &out) {
  const tcnse::RunConfig rc = tcnse::LoadRunConfig(config_path);
  const std::uint64_t s = seed.value_or(rc.seed);
  const tcnse::ModelWeights w = tcnse::InitRandom(rc.model, s);
  tcnse::SaveWeights(out, w);
  std::printf("tensors=%zu\n", w.tensors().size());
  std::printf("parameters=%zu\n", w.NumParameters());
  std::printf("seed=%llu\n", static_cast<unsigned long long>(s));
}

void AddModelFlags(CLI::App *cmd, Paths &p) {
  cmd->add_option("--config", p.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--weights", p.weights, "weight container")->required()->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"tcnse: streaming TCN speech enhancement"};
  app.require_subcommand(1);

  Paths paths;
  auto *enhance = app.add_subcommand("enhance", "enhance a WAV file offline");
  auto *stream = app.add_subcommand("stream", "enhance a WAV file hop by hop");
  for (CLI::App *cmd : {enhance, stream}) {
    AddModelFlags(cmd, paths);
    cmd->add_option("--in", paths.in, "16 kHz mono PCM16 input")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out-speech", paths.out_speech, "speech estimate")->required();
    cmd->add_option("--out-noise", paths.out_noise, "noise estimate (two-source models)");
  }

  std::string latency_config;
  auto *latency = app.add_subcommand("latency", "print the look-ahead breakdown");
  latency->add_option("--config", latency_config)->required()->check(CLI::ExistingFile);

  auto *probe = app.add_subcommand("probe", "measure future dependence by perturbation");
  AddModelFlags(probe, paths);

  std::string clean_path, est_path, loss_name = "sisnr", metrics_config;
  auto *metrics = app.add_subcommand("metrics", "quality metrics and loss values");
  metrics->add_option("--clean", clean_path)->required()->check(CLI::ExistingFile);
  metrics->add_option("--est", est_path)->required()->check(CLI::ExistingFile);
  metrics->add_option("--loss", loss_name, "sisnr|snr|pcmse|pasemse")
      ->check(CLI::IsMember({"sisnr", "snr", "pcmse", "pasemse"}));
  metrics->add_option("--config", metrics_config, "loss settings")->check(CLI::ExistingFile);

  double bench_seconds = 2.0;
  std::uint64_t bench_seed = 1;
  auto *bench = app.add_subcommand("bench", "per-hop streaming compute time");
  AddModelFlags(bench, paths);
  bench->add_option("--in", paths.in, "input WAV (default: seeded noise)")->check(CLI::ExistingFile);
  bench->add_option("--seconds", bench_seconds, "length of generated noise");
  bench->add_option("--seed", bench_seed, "noise seed");

  std::string init_config, init_out;
  std::optional<std::uint64_t> init_seed;
  auto *init = app.add_subcommand("init-weights", "write seeded random weights");
  init->add_option("--config", init_config)->required()->check(CLI::ExistingFile);
  init->add_option("--seed", init_seed, "overrides the config seed");
  init->add_option("--out", init_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::fprintf(stderr, "error=Usage message=%s\n", e.what());
    return 64;
  }

  try {
    if (*enhance) RunEnhance(paths);
    if (*stream) RunStream(paths);
    if (*latency) RunLatency(latency_config);
    if (*probe) RunProbe(paths);
    if (*metrics) RunMetrics(clean_path, est_path, loss_name, metrics_config);
    if (*bench) RunBench(paths, bench_seconds, bench_seed);
    if (*init) RunInitWeights(init_config, init_seed, init_out);
  } catch (const tcnse::Error &e) {
    std::fprintf(stderr, "error=%s message=%s\n",
                 std::string(tcnse::ErrorCodeName(e.code())).c_str(), e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error=Internal message=%s\n", e.what());
    return 3;
  }
  return 0;
}
