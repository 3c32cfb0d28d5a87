// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_TCN_H_
#define TCNSE_TCN_H_

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace tcnse {

enum class MaskActivation { kSigmoid, kIdentity };

// Shape of the separation network: an input layer norm and 1x1 bottleneck,
// repeats x blocks_per_repeat dilated depthwise-separable conv blocks with
// residual and skip paths, and a mask head producing num_sources masks.
struct TcnConfig {
  int bottleneck_channels = 128;  // B
  int conv_channels = 512;        // H
  int kernel_size = 3;            // P
  int blocks_per_repeat = 8;      // X
  int repeats = 3;                // R
  int skip_channels = 128;        // Sc
  // The first noncausal_layers blocks in stack order look ahead; the rest are
  // causal.
  int noncausal_layers = 0;
  MaskActivation mask_activation = MaskActivation::kSigmoid;
  int num_sources = 2;  // K

  int NumBlocks() const { return blocks_per_repeat * repeats; }
  int Dilation(int block) const { return 1 << (block % blocks_per_repeat); }
  bool IsCausal(int block) const { return block >= noncausal_layers; }
  // Frames of future context a single block reads.
  int BlockLookahead(int block) const {
    return IsCausal(block) ? 0 : Dilation(block) * (kernel_size - 1) / 2;
  }
  void Validate() const;
};

// Future frames reachable through the noncausal convolutions alone.
int ConvolutionalReach(const TcnConfig &config);

// Frames of look-ahead charged to encoder framing and overlap-add. A stack
// with noncausal layers is charged the full analysis window (frames per
// window); a fully causal stack is charged one hop. This is the accounting
// under which a 1/2-overlap model with three frames of noncausal delay sees
// five future frames, and the default models report 33/40 ms (noncausal
// prefix) and 1/4 ms (causal).
int FramingFrames(int conv_reach, int frames_per_window);

// Total declared look-ahead in frames.
int FutureReach(const TcnConfig &config, int frames_per_window);

struct LayerNormParams {
  Eigen::VectorXd gain;
  Eigen::VectorXd bias;
};

// Cumulative layer normalization: frame t is normalized with the mean and
// variance of all channels over frames 0..t, then scaled per channel. Used
// offline column by column and online frame by frame with identical
// arithmetic.
class CumulativeLayerNorm {
 public:
  static constexpr double kEps = 1e-8;

  explicit CumulativeLayerNorm(const LayerNormParams &params)
      : params_(&params) {}

  Eigen::VectorXd Step(const Eigen::VectorXd &frame);
  void Reset() { sum_ = sq_sum_ = 0.0; count_ = 0; }

 private:
  const LayerNormParams *params_;
  double sum_ = 0.0;
  double sq_sum_ = 0.0;
  double count_ = 0;
};

struct ConvBlockWeights {
  Eigen::MatrixXd in_weight;  // H x B
  Eigen::VectorXd in_bias;
  double prelu1 = 0.25;
  LayerNormParams norm1;
  Eigen::MatrixXd depthwise_weight;  // H x P, tap 0 is the oldest frame
  Eigen::VectorXd depthwise_bias;
  double prelu2 = 0.25;
  LayerNormParams norm2;
  Eigen::MatrixXd res_weight;  // B x H
  Eigen::VectorXd res_bias;
  Eigen::MatrixXd skip_weight;  // Sc x H
  Eigen::VectorXd skip_bias;
};

struct TcnWeights {
  LayerNormParams input_norm;        // over N input channels
  Eigen::MatrixXd bottleneck_weight; // B x N
  Eigen::VectorXd bottleneck_bias;
  std::vector<ConvBlockWeights> blocks;
  double mask_prelu = 0.25;
  Eigen::MatrixXd mask_weight;  // K*N x Sc
  Eigen::VectorXd mask_bias;
};

inline double PRelu(double x, double alpha) { return x >= 0.0 ? x : alpha * x; }

inline void PReluInPlace(Eigen::Ref<Eigen::MatrixXd> x, double alpha) {
  x = x.unaryExpr([alpha](double v) { return PRelu(v, alpha); });
}

inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Offset (in frames, relative to the output frame) of depthwise tap j.
inline int TapOffset(int tap, int kernel_size, int dilation, bool causal) {
  return causal ? (tap - (kernel_size - 1)) * dilation
                : (tap - (kernel_size - 1) / 2) * dilation;
}

struct ConvBlockOutput {
  Eigen::MatrixXd residual;  // B x T, input plus the block transform
  Eigen::MatrixXd skip;      // Sc x T
};

// One dilated depthwise-separable block over a B x T sequence. Frames outside
// [0, T) read as zero at the depthwise convolution.
ConvBlockOutput ConvBlockForward(const Eigen::MatrixXd &input,
                                 const ConvBlockWeights &weights, int dilation,
                                 bool causal);

struct MaskSet {
  std::vector<Eigen::MatrixXd> masks;  // K matrices, N x T
};

class Tcn {
 public:
  Tcn(TcnConfig config, int input_channels, TcnWeights weights);

  // input: N x T. Throws kNumericalDivergence with the block index when an
  // activation stops being finite.
  MaskSet Forward(const Eigen::MatrixXd &input) const;

  // Mask head for one frame of summed skip activations.
  std::vector<Eigen::VectorXd> MaskHead(const Eigen::VectorXd &skip_sum) const;

  const TcnConfig &config() const { return config_; }
  const TcnWeights &weights() const { return weights_; }
  int input_channels() const { return input_channels_; }

 private:
  TcnConfig config_;
  int input_channels_;
  TcnWeights weights_;
};

}  // namespace tcnse

#endif  // TCNSE_TCN_H_
