// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tcnse/streaming.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "tcnse/error.h"

namespace tcnse {

LatencyReport AnalyzeLatency(const ModelConfig &config) {
  config.Validate();
  LatencyReport r;
  r.frames_per_window = config.overlap.FramesPerWindow();
  r.conv_frames = ConvolutionalReach(config.tcn);
  r.framing_frames = FramingFrames(r.conv_frames, r.frames_per_window);
  r.framing_convention = r.conv_frames > 0 ? "full-window" : "single-hop";
  r.future_frames = r.conv_frames + r.framing_frames;
  r.hop_samples = config.hop();
  r.hop_ms = 1000.0 * r.hop_samples / config.sample_rate;
  r.lookahead_ms = r.future_frames * r.hop_ms;
  r.dependence_samples =
      static_cast<std::int64_t>(r.conv_frames) * r.hop_samples + config.frame_length;
  // The newest hop becomes final once every frame covering it has passed
  // through the network.
  const int physical = r.conv_frames + r.frames_per_window - 1;
  r.emission_delay_frames = std::max(r.future_frames, physical);
  return r;
}

// ---------------------------------------------------------------------------

StreamState::StreamState(std::shared_ptr<const Model> model)
    : model_(std::move(model)),
      input_norm_(model_->tcn().weights().input_norm) {
  const ModelConfig &config = model_->config();
  const TcnConfig &tcn = config.tcn;
  const LatencyReport latency = AnalyzeLatency(config);
  frame_length_ = config.frame_length;
  hop_ = config.hop();
  num_sources_ = config.num_sources();
  declared_reach_ = latency.future_frames;
  emission_delay_ = latency.emission_delay_frames;
  window_ = MakeWindow(frame_length_, config.window);
  input_buffer_ = Eigen::VectorXd::Zero(frame_length_);

  const auto &weights = model_->tcn().weights();
  for (int b = 0; b < tcn.NumBlocks(); ++b) {
    BlockState s{.lookahead = tcn.BlockLookahead(b),
                 .hidden = {},
                 .inputs = {},
                 .norm1 = CumulativeLayerNorm(weights.blocks[b].norm1),
                 .norm2 = CumulativeLayerNorm(weights.blocks[b].norm2)};
    s.hidden.resize((tcn.kernel_size - 1) * tcn.Dilation(b) + 1);
    s.inputs.resize(s.lookahead + 1);
    blocks_.push_back(std::move(s));
  }
  ola_.assign(num_sources_, Eigen::VectorXd::Zero(frame_length_));
}

std::vector<int> StreamState::RingCapacities() const {
  std::vector<int> caps;
  for (const BlockState &b : blocks_) {
    caps.push_back(static_cast<int>(b.hidden.size()));
    caps.push_back(static_cast<int>(b.inputs.size()));
  }
  return caps;
}

std::vector<Eigen::VectorXd> StreamState::Push(std::span<const double> hop_samples) {
  if (flushed_) {
    Fail(ErrorCode::kInvalidConfig, "stream was already flushed");
  }
  if (static_cast<int>(hop_samples.size()) != hop_) {
    Fail(ErrorCode::kChunkSizeMismatch,
         "push takes exactly " + std::to_string(hop_) + " samples, got " +
             std::to_string(hop_samples.size()));
  }
  for (double v : hop_samples) {
    if (!std::isfinite(v)) Fail(ErrorCode::kNonFiniteInput, "non-finite sample pushed");
  }
  ++pushes_;
  AppendSamples(hop_samples);
  std::vector<Eigen::VectorXd> out;
  DrainEmissions(out, false);
  return out;
}

void StreamState::AppendSamples(std::span<const double> samples) {
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index keep = frame_length_ - n;
  input_buffer_.head(keep) = input_buffer_.tail(keep).eval();
  input_buffer_.tail(n) = Eigen::Map<const Eigen::VectorXd>(samples.data(), n);
  samples_seen_ += n;
  if (samples_seen_ >= frames_encoded_ * hop_ + frame_length_) EncodeFrame();
}

void StreamState::EncodeFrame() {
  const Eigen::VectorXd frame = input_buffer_.cwiseProduct(window_);
  Eigen::VectorXd spec = model_->EncodeFrames(frame);
  Eigen::VectorXd net_in = model_->NetworkInput(spec);
  pending_spec_.push_back(std::move(spec));
  ++frames_encoded_;

  const TcnWeights &w = model_->tcn().weights();
  const Eigen::VectorXd normed = input_norm_.Step(net_in);
  Eigen::VectorXd x = w.bottleneck_weight * normed;
  x += w.bottleneck_bias;
  FeedBlock(0, x);
}

void StreamState::FeedBlock(int block, const Eigen::VectorXd &x) {
  BlockState &s = blocks_[block];
  const ConvBlockWeights &w = model_->tcn().weights().blocks[block];
  Eigen::VectorXd hidden = w.in_weight * x;
  hidden += w.in_bias;
  PReluInPlace(hidden, w.prelu1);
  const auto cap_h = static_cast<std::int64_t>(s.hidden.size());
  const auto cap_x = static_cast<std::int64_t>(s.inputs.size());
  s.hidden[s.received % cap_h] = s.norm1.Step(hidden);
  s.inputs[s.received % cap_x] = x;
  ++s.received;
  EmitReady(block);
}

void StreamState::EmitReady(int block) {
  BlockState &s = blocks_[block];
  while (s.received - 1 >= s.emitted + s.lookahead) EmitBlockFrame(block);
}

void StreamState::EmitBlockFrame(int block) {
  BlockState &s = blocks_[block];
  const TcnConfig &tcn = model_->config().tcn;
  const ConvBlockWeights &w = model_->tcn().weights().blocks[block];
  const std::int64_t t = s.emitted;
  const int dilation = tcn.Dilation(block);
  const bool causal = tcn.IsCausal(block);
  const auto cap_h = static_cast<std::int64_t>(s.hidden.size());
  const std::int64_t available = total_frames_ >= 0 ? total_frames_ : s.received;

  Eigen::VectorXd conv = w.depthwise_bias;
  for (int tap = 0; tap < tcn.kernel_size; ++tap) {
    const std::int64_t src = t + TapOffset(tap, tcn.kernel_size, dilation, causal);
    if (src < 0 || src >= available) continue;
    conv.array() += s.hidden[src % cap_h].array() * w.depthwise_weight.col(tap).array();
  }
  PReluInPlace(conv, w.prelu2);
  conv = s.norm2.Step(conv);

  Eigen::VectorXd residual = w.res_weight * conv;
  residual += w.res_bias;
  residual += s.inputs[t % static_cast<std::int64_t>(s.inputs.size())];
  Eigen::VectorXd skip = w.skip_weight * conv;
  skip += w.skip_bias;
  ++s.emitted;

  while (static_cast<std::int64_t>(skip_sums_.size()) <= t - skip_base_) {
    skip_sums_.push_back(Eigen::VectorXd::Zero(tcn.skip_channels));
  }
  skip_sums_[t - skip_base_] += skip;

  if (!residual.allFinite() || !skip.allFinite()) {
    Fail(ErrorCode::kNumericalDivergence,
         "non-finite activation in conv block " + std::to_string(block));
  }
  if (block + 1 < static_cast<int>(blocks_.size())) {
    FeedBlock(block + 1, residual);
  } else {
    Eigen::VectorXd sum = std::move(skip_sums_.front());
    skip_sums_.pop_front();
    ++skip_base_;
    OnNetworkFrame(sum);
  }
}

void StreamState::OnNetworkFrame(const Eigen::VectorXd &skip_sum) {
  const std::vector<Eigen::VectorXd> masks = model_->tcn().MaskHead(skip_sum);
  const Eigen::VectorXd spec = std::move(pending_spec_.front());
  pending_spec_.pop_front();
  for (int k = 0; k < num_sources_; ++k) {
    if (!masks[k].allFinite()) {
      Fail(ErrorCode::kNumericalDivergence, "non-finite activation in mask head");
    }
    const Eigen::VectorXd z = masks[k].cwiseProduct(spec);
    ola_[k] += model_->decoder() * z;
  }
  FinalizeHop(network_frames_++);
}

// Hop `hop_index` is complete once frame `hop_index` has been decoded.
void StreamState::FinalizeHop(std::int64_t hop_index) {
  const AnalysisConfig analysis = model_->config().analysis();
  const std::int64_t frames = total_frames_ >= 0 ? total_frames_ : hop_index + 1;
  std::vector<Eigen::VectorXd> hop(num_sources_, Eigen::VectorXd(hop_));
  for (int i = 0; i < hop_; ++i) {
    const double coverage =
        WindowCoverage(hop_index * hop_ + i, frames, analysis, window_);
    for (int k = 0; k < num_sources_; ++k) hop[k][i] = ola_[k][i] / coverage;
  }
  const int keep = frame_length_ - hop_;
  for (int k = 0; k < num_sources_; ++k) {
    ola_[k].head(keep) = ola_[k].tail(keep).eval();
    ola_[k].tail(hop_).setZero();
  }
  ready_hops_.push_back(std::move(hop));
}

void StreamState::DrainEmissions(std::vector<Eigen::VectorXd> &out, bool all) {
  std::vector<std::vector<Eigen::VectorXd>> hops;
  while (!ready_hops_.empty() &&
         (all || hops_emitted_ < pushes_ - emission_delay_)) {
    hops.push_back(std::move(ready_hops_.front()));
    ready_hops_.pop_front();
    ++hops_emitted_;
  }
  if (hops.empty()) return;
  out.assign(num_sources_, Eigen::VectorXd(hop_ * hops.size()));
  for (std::size_t h = 0; h < hops.size(); ++h) {
    for (int k = 0; k < num_sources_; ++k) out[k].segment(h * hop_, hop_) = hops[h][k];
  }
}

std::vector<Eigen::VectorXd> StreamState::Flush() {
  std::vector<Eigen::VectorXd> out(num_sources_);
  if (flushed_) return out;
  flushed_ = true;
  if (pushes_ == 0) return out;

  const std::int64_t total_samples = pushes_ * hop_;
  const std::vector<double> zeros(hop_, 0.0);
  // A signal shorter than one frame is zero padded to a single frame.
  while (frames_encoded_ == 0) AppendSamples(zeros);
  total_frames_ = frames_encoded_;

  for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) {
    while (blocks_[b].emitted < total_frames_) EmitBlockFrame(b);
  }

  // Samples past the last frame start, covered only by trailing frames.
  const AnalysisConfig analysis = model_->config().analysis();
  const std::int64_t tail_start = total_frames_ * hop_;
  const std::int64_t tail = std::max<std::int64_t>(0, total_samples - tail_start);

  std::vector<Eigen::VectorXd> head;
  DrainEmissions(head, true);
  for (int k = 0; k < num_sources_; ++k) {
    const Eigen::Index emitted = head.empty() ? 0 : head[k].size();
    out[k].resize(emitted + tail);
    if (emitted) out[k].head(emitted) = head[k];
    for (std::int64_t i = 0; i < tail; ++i) {
      out[k][emitted + i] =
          ola_[k][i] / WindowCoverage(tail_start + i, total_frames_, analysis, window_);
    }
  }
  hops_emitted_ = pushes_;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Index of the first sample where any source differs, or -1.
Eigen::Index FirstDifference(const std::vector<AudioSignal> &a,
                             const std::vector<AudioSignal> &b) {
  Eigen::Index first = -1;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (Eigen::Index n = 0; n < a[k].size(); ++n) {
      if (a[k].samples[n] != b[k].samples[n]) {
        if (first < 0 || n < first) first = n;
        break;
      }
    }
  }
  return first;
}

}  // namespace

ProbeResult ProbeCausality(const Model &model, const ProbeOptions &options) {
  const ModelConfig &config = model.config();
  const int hop = config.hop(), frame = config.frame_length;
  const int per_window = config.overlap.FramesPerWindow();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> noise(-0.5, 0.5);

  Eigen::Index num_frames = 64;
  while (true) {
    AudioSignal signal;
    signal.sample_rate = config.sample_rate;
    const Eigen::Index len = (num_frames - 1) * hop + frame;
    signal.samples = Eigen::VectorXd::NullaryExpr(len, [&] { return noise(rng); });
    const std::vector<AudioSignal> base = model.EnhanceOffline(signal);

    // Probe the last sample of late frames (a frame's last sample belongs to
    // no earlier frame) plus random positions in the back half.
    std::vector<Eigen::Index> positions;
    for (int j = 0; j < options.aligned_positions; ++j) {
      positions.push_back((num_frames - 1 - j) * hop + frame - 1);
    }
    std::uniform_int_distribution<Eigen::Index> pick(len / 2, len - 1);
    for (int j = 0; j < options.random_positions; ++j) positions.push_back(pick(rng));

    Eigen::Index dependence = -1;
    bool hit_start = false;
    for (Eigen::Index p : positions) {
      AudioSignal perturbed = signal;
      perturbed.samples[p] += 0.1;
      const Eigen::Index first = FirstDifference(base, model.EnhanceOffline(perturbed));
      if (first < 0) continue;
      if (first == 0) hit_start = true;
      dependence = std::max(dependence, p - first);
    }
    if (hit_start && num_frames < (1 << 16)) {
      num_frames *= 2;  // reach may extend past the signal start
      continue;
    }
    ProbeResult r;
    r.positions = static_cast<int>(positions.size());
    r.dependence_samples = dependence + 1;
    const std::int64_t beyond = std::max<std::int64_t>(0, r.dependence_samples - frame);
    r.conv_frames = static_cast<int>((beyond + hop - 1) / hop);
    r.measured_frames = r.conv_frames + FramingFrames(r.conv_frames, per_window);
    return r;
  }
}

BenchReport BenchPerFrame(std::shared_ptr<const Model> model,
                          const AudioSignal &signal) {
  const ModelConfig &config = model->config();
  if (signal.size() < config.sample_rate) {
    Fail(ErrorCode::kInvalidConfig, "benchmark input must be at least one second");
  }
  StreamState stream(model);
  const int hop = stream.hop();
  std::vector<double> times;
  for (Eigen::Index start = 0; start + hop <= signal.size(); start += hop) {
    const auto t0 = std::chrono::steady_clock::now();
    stream.Push(std::span<const double>(signal.samples.data() + start, hop));
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  BenchReport r;
  r.hop_ms = 1000.0 * hop / config.sample_rate;
  r.frames = static_cast<std::int64_t>(times.size());
  double sum = 0.0, sq = 0.0;
  for (double t : times) {
    sum += t;
    sq += t * t;
  }
  r.mean_ms = sum / times.size();
  r.std_ms = std::sqrt(std::max(0.0, sq / times.size() - r.mean_ms * r.mean_ms));
  std::sort(times.begin(), times.end());
  r.p50_ms = times[times.size() / 2];
  r.p95_ms = times[std::min(times.size() - 1, times.size() * 95 / 100)];
  return r;
}

}  // namespace tcnse
