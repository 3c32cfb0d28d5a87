// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_STREAMING_H_
#define TCNSE_STREAMING_H_

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tcnse/model.h"

namespace tcnse {

struct LatencyReport {
  int future_frames = 0;  // conv_frames + framing_frames
  int conv_frames = 0;    // sum of dilation * (P - 1) / 2 over noncausal blocks
  int framing_frames = 0;
  // "full-window" when noncausal blocks are present (L / hop frames),
  // "single-hop" for a causal stack (one hop of buffering).
  std::string framing_convention;
  int frames_per_window = 0;
  int hop_samples = 0;
  double hop_ms = 0.0;
  double lookahead_ms = 0.0;
  // Distance from an output sample to the newest input sample it can depend
  // on, plus one: conv_frames * hop + L.
  std::int64_t dependence_samples = 0;
  // Hops by which the stream's output trails its input.
  int emission_delay_frames = 0;
};

LatencyReport AnalyzeLatency(const ModelConfig &config);

// Hop-synchronous inference: each Push takes exactly one hop of input and
// returns either nothing or one hop for each of the K sources. Output trails
// input by emission_delay() hops; Flush drains the rest so that the total
// output length equals the total input length, and the concatenated output
// matches Model::EnhanceOffline on the same samples.
//
// A StreamState must not be used from two threads at once.
class StreamState {
 public:
  explicit StreamState(std::shared_ptr<const Model> model);

  std::vector<Eigen::VectorXd> Push(std::span<const double> hop_samples);
  std::vector<Eigen::VectorXd> Flush();

  int hop() const { return hop_; }
  int declared_future_reach() const { return declared_reach_; }
  int emission_delay() const { return emission_delay_; }
  std::int64_t pushes() const { return pushes_; }
  std::int64_t hops_emitted() const { return hops_emitted_; }
  bool flushed() const { return flushed_; }
  // Per-block hidden and residual ring sizes, fixed at construction.
  std::vector<int> RingCapacities() const;

 private:
  struct BlockState {
    int lookahead = 0;
    std::vector<Eigen::VectorXd> hidden;  // normalized in-conv activations
    std::vector<Eigen::VectorXd> inputs;  // block inputs for the residual
    CumulativeLayerNorm norm1;
    CumulativeLayerNorm norm2;
    std::int64_t received = 0;
    std::int64_t emitted = 0;
  };

  void AppendSamples(std::span<const double> samples);
  void EncodeFrame();
  void FeedBlock(int block, const Eigen::VectorXd &x);
  void EmitReady(int block);
  void EmitBlockFrame(int block);
  void OnNetworkFrame(const Eigen::VectorXd &skip_sum);
  void FinalizeHop(std::int64_t hop_index);
  void DrainEmissions(std::vector<Eigen::VectorXd> &out, bool all);

  std::shared_ptr<const Model> model_;
  int frame_length_;
  int hop_;
  int num_sources_;
  int declared_reach_;
  int emission_delay_;
  Eigen::VectorXd window_;

  Eigen::VectorXd input_buffer_;  // newest frame_length_ samples
  std::int64_t samples_seen_ = 0;
  std::int64_t frames_encoded_ = 0;
  std::int64_t pushes_ = 0;

  CumulativeLayerNorm input_norm_;
  std::vector<BlockState> blocks_;
  std::deque<Eigen::VectorXd> skip_sums_;  // indexed from skip_base_
  std::int64_t skip_base_ = 0;
  std::deque<Eigen::VectorXd> pending_spec_;  // encoder frames awaiting masks
  std::int64_t network_frames_ = 0;

  std::vector<Eigen::VectorXd> ola_;  // per source, frame_length_ samples
  std::deque<std::vector<Eigen::VectorXd>> ready_hops_;
  std::int64_t hops_emitted_ = 0;

  bool flushed_ = false;
  std::int64_t total_frames_ = -1;  // known once flushing
};

struct ProbeResult {
  int measured_frames = 0;  // reported with the same framing accounting
  int conv_frames = 0;      // measured reach through the network, in frames
  std::int64_t dependence_samples = 0;
  int positions = 0;
};

struct ProbeOptions {
  int random_positions = 4;
  int aligned_positions = 4;
  std::uint64_t seed = 7;
};

// Perturbs single input samples and reruns the offline model; the earliest
// changed output sample bounds how far ahead the system really reads.
ProbeResult ProbeCausality(const Model &model, const ProbeOptions &options = {});

struct BenchReport {
  double hop_ms = 0.0;  // duration of audio consumed per push
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  std::int64_t frames = 0;
};

// Wall time of each Push over the whole signal (at least one second long).
BenchReport BenchPerFrame(std::shared_ptr<const Model> model,
                          const AudioSignal &signal);

}  // namespace tcnse

#endif  // TCNSE_STREAMING_H_
