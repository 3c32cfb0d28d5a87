// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tcnse/tcn.h"

#include <algorithm>
#include <string>
#include <utility>

#include "tcnse/error.h"

namespace tcnse {

void TcnConfig::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) Fail(ErrorCode::kInvalidConfig, "tcn: " + what);
  };
  require(bottleneck_channels > 0 && conv_channels > 0 && skip_channels > 0,
          "channel counts must be positive");
  require(kernel_size >= 1 && kernel_size % 2 == 1,
          "kernel size must be odd so noncausal padding is symmetric");
  require(blocks_per_repeat >= 1 && repeats >= 1,
          "need at least one block");
  require(blocks_per_repeat < 31, "dilation 2^(X-1) overflows");
  require(noncausal_layers >= 0 && noncausal_layers <= NumBlocks(),
          "noncausal layer count " + std::to_string(noncausal_layers) +
              " outside [0, " + std::to_string(NumBlocks()) + "]");
  require(num_sources >= 1, "need at least one source");
}

int ConvolutionalReach(const TcnConfig &config) {
  int reach = 0;
  for (int b = 0; b < config.NumBlocks(); ++b) reach += config.BlockLookahead(b);
  return reach;
}

int FramingFrames(int conv_reach, int frames_per_window) {
  return conv_reach > 0 ? frames_per_window : 1;
}

int FutureReach(const TcnConfig &config, int frames_per_window) {
  const int conv = ConvolutionalReach(config);
  return conv + FramingFrames(conv, frames_per_window);
}

Eigen::VectorXd CumulativeLayerNorm::Step(const Eigen::VectorXd &frame) {
  sum_ += frame.sum();
  sq_sum_ += frame.squaredNorm();
  count_ += static_cast<double>(frame.size());
  const double mean = sum_ / count_;
  const double var = std::max(0.0, sq_sum_ / count_ - mean * mean);
  const double inv_std = 1.0 / std::sqrt(var + kEps);
  return ((frame.array() - mean) * inv_std * params_->gain.array() +
          params_->bias.array())
      .matrix();
}

namespace {

void NormalizeColumns(Eigen::MatrixXd &x, const LayerNormParams &params) {
  CumulativeLayerNorm norm(params);
  for (Eigen::Index t = 0; t < x.cols(); ++t) {
    x.col(t) = norm.Step(x.col(t));
  }
}

}  // namespace

ConvBlockOutput ConvBlockForward(const Eigen::MatrixXd &input,
                                 const ConvBlockWeights &weights, int dilation,
                                 bool causal) {
  if (input.rows() != weights.in_weight.cols()) {
    Fail(ErrorCode::kShapeMismatch,
         "conv block expects " + std::to_string(weights.in_weight.cols()) +
             " input channels, got " + std::to_string(input.rows()));
  }
  const Eigen::Index frames = input.cols();
  const int kernel = static_cast<int>(weights.depthwise_weight.cols());

  Eigen::MatrixXd hidden = weights.in_weight * input;
  hidden.colwise() += weights.in_bias;
  PReluInPlace(hidden, weights.prelu1);
  NormalizeColumns(hidden, weights.norm1);

  Eigen::MatrixXd conv(hidden.rows(), frames);
  conv.colwise() = weights.depthwise_bias;
  for (int tap = 0; tap < kernel; ++tap) {
    const int offset = TapOffset(tap, kernel, dilation, causal);
    // conv[:, t] += w[:, tap] * hidden[:, t + offset] for in-range frames
    const Eigen::Index lo = std::max<Eigen::Index>(0, -offset);
    const Eigen::Index hi = std::min<Eigen::Index>(frames, frames - offset);
    if (hi <= lo) continue;
    conv.middleCols(lo, hi - lo).array() +=
        hidden.middleCols(lo + offset, hi - lo).array().colwise() *
        weights.depthwise_weight.col(tap).array();
  }
  PReluInPlace(conv, weights.prelu2);
  NormalizeColumns(conv, weights.norm2);

  ConvBlockOutput out;
  out.residual = weights.res_weight * conv;
  out.residual.colwise() += weights.res_bias;
  out.residual += input;
  out.skip = weights.skip_weight * conv;
  out.skip.colwise() += weights.skip_bias;
  return out;
}

Tcn::Tcn(TcnConfig config, int input_channels, TcnWeights weights)
    : config_(config), input_channels_(input_channels),
      weights_(std::move(weights)) {
  config_.Validate();
  if (static_cast<int>(weights_.blocks.size()) != config_.NumBlocks()) {
    Fail(ErrorCode::kShapeMismatch, "tcn weights have " +
                                        std::to_string(weights_.blocks.size()) +
                                        " blocks, config wants " +
                                        std::to_string(config_.NumBlocks()));
  }
  if (weights_.bottleneck_weight.cols() != input_channels_ ||
      weights_.mask_weight.rows() != config_.num_sources * input_channels_) {
    Fail(ErrorCode::kShapeMismatch, "tcn weights do not match the input size");
  }
}

std::vector<Eigen::VectorXd> Tcn::MaskHead(const Eigen::VectorXd &skip_sum) const {
  Eigen::VectorXd act = skip_sum;
  PReluInPlace(act, weights_.mask_prelu);
  Eigen::VectorXd logits = weights_.mask_weight * act + weights_.mask_bias;
  if (config_.mask_activation == MaskActivation::kSigmoid) {
    logits = logits.unaryExpr([](double v) { return Sigmoid(v); });
  }
  std::vector<Eigen::VectorXd> masks;
  for (int k = 0; k < config_.num_sources; ++k) {
    masks.push_back(logits.segment(k * input_channels_, input_channels_));
  }
  return masks;
}

MaskSet Tcn::Forward(const Eigen::MatrixXd &input) const {
  if (input.rows() != input_channels_) {
    Fail(ErrorCode::kShapeMismatch,
         "tcn expects " + std::to_string(input_channels_) +
             " input rows, got " + std::to_string(input.rows()));
  }
  const Eigen::Index frames = input.cols();
  Eigen::MatrixXd normed = input;
  NormalizeColumns(normed, weights_.input_norm);
  Eigen::MatrixXd x = weights_.bottleneck_weight * normed;
  x.colwise() += weights_.bottleneck_bias;

  Eigen::MatrixXd skip_sum = Eigen::MatrixXd::Zero(config_.skip_channels, frames);
  for (int b = 0; b < config_.NumBlocks(); ++b) {
    ConvBlockOutput out = ConvBlockForward(x, weights_.blocks[b],
                                           config_.Dilation(b),
                                           config_.IsCausal(b));
    if (!out.residual.allFinite() || !out.skip.allFinite()) {
      Fail(ErrorCode::kNumericalDivergence,
           "non-finite activation in conv block " + std::to_string(b));
    }
    x = std::move(out.residual);
    skip_sum += out.skip;
  }

  PReluInPlace(skip_sum, weights_.mask_prelu);
  Eigen::MatrixXd logits = weights_.mask_weight * skip_sum;
  logits.colwise() += weights_.mask_bias;
  if (config_.mask_activation == MaskActivation::kSigmoid) {
    logits = logits.unaryExpr([](double v) { return Sigmoid(v); });
  }
  if (!logits.allFinite()) {
    Fail(ErrorCode::kNumericalDivergence, "non-finite activation in mask head");
  }
  MaskSet out;
  for (int k = 0; k < config_.num_sources; ++k) {
    out.masks.push_back(logits.middleRows(k * input_channels_, input_channels_));
  }
  return out;
}

}  // namespace tcnse
