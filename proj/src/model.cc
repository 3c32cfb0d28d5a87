// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tcnse/model.h"

#include <string>
#include <utility>

#include "tcnse/error.h"

namespace tcnse {

namespace {

Eigen::MatrixXd ToMatrix(const Tensor &t) {
  const Eigen::Index rows = t.shape.at(0);
  const Eigen::Index cols = t.shape.size() > 1 ? t.shape[1] : 1;
  using RowMajorF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMajorF>(t.values.data(), rows, cols).cast<double>();
}

Eigen::VectorXd ToVector(const Tensor &t) {
  return Eigen::Map<const Eigen::VectorXf>(t.values.data(), t.values.size())
      .cast<double>();
}

double ToScalar(const Tensor &t) { return t.values.at(0); }

LayerNormParams ToNorm(const ModelWeights &w, const std::string &name) {
  return {ToVector(w.Get(name + ".gain")), ToVector(w.Get(name + ".bias"))};
}

TcnWeights ToTcnWeights(const ModelConfig &config, const ModelWeights &w) {
  TcnWeights tcn;
  tcn.input_norm = ToNorm(w, "tcn.input_norm");
  tcn.bottleneck_weight = ToMatrix(w.Get("tcn.bottleneck.weight"));
  tcn.bottleneck_bias = ToVector(w.Get("tcn.bottleneck.bias"));
  for (int i = 0; i < config.tcn.NumBlocks(); ++i) {
    const std::string p = "tcn.block" + std::to_string(i);
    ConvBlockWeights b;
    b.in_weight = ToMatrix(w.Get(p + ".in_conv.weight"));
    b.in_bias = ToVector(w.Get(p + ".in_conv.bias"));
    b.prelu1 = ToScalar(w.Get(p + ".prelu1.alpha"));
    b.norm1 = ToNorm(w, p + ".norm1");
    b.depthwise_weight = ToMatrix(w.Get(p + ".dconv.weight"));
    b.depthwise_bias = ToVector(w.Get(p + ".dconv.bias"));
    b.prelu2 = ToScalar(w.Get(p + ".prelu2.alpha"));
    b.norm2 = ToNorm(w, p + ".norm2");
    b.res_weight = ToMatrix(w.Get(p + ".res_conv.weight"));
    b.res_bias = ToVector(w.Get(p + ".res_conv.bias"));
    b.skip_weight = ToMatrix(w.Get(p + ".skip_conv.weight"));
    b.skip_bias = ToVector(w.Get(p + ".skip_conv.bias"));
    tcn.blocks.push_back(std::move(b));
  }
  tcn.mask_prelu = ToScalar(w.Get("tcn.mask.prelu.alpha"));
  tcn.mask_weight = ToMatrix(w.Get("tcn.mask.conv.weight"));
  tcn.mask_bias = ToVector(w.Get("tcn.mask.conv.bias"));
  return tcn;
}

Tcn MakeTcn(const ModelConfig &config, const ModelWeights &weights) {
  ValidateWeights(config, weights);
  return Tcn(config.tcn, config.representation_size,
             ToTcnWeights(config, weights));
}

}  // namespace

void ModelConfig::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) Fail(ErrorCode::kInvalidConfig, "model: " + what);
  };
  tcn.Validate();
  require(sample_rate > 0, "sample rate must be positive");
  require(overlap.num >= 0 && overlap.den > 0 && overlap.num < overlap.den &&
              overlap.den % (overlap.den - overlap.num) == 0,
          "overlap must be 1 - 1/m for an integer m");
  require(frame_length > 0 && frame_length % overlap.FramesPerWindow() == 0,
          "frame length " + std::to_string(frame_length) +
              " is not a whole number of hops");
  require(representation_size > 0 && representation_size % 2 == 0,
          "representation size must be positive and even");
  require(num_sources() == 1 || num_sources() == 2,
          "num_sources must be 1 (speech) or 2 (speech, noise)");
  if (encoder == EncoderKind::kStft) {
    require(representation_size / 2 >= frame_length,
            "stft encoder needs N/2 >= L");
  }
}

ModelConfig ModelConfig::ConvTasNet(int noncausal_layers) {
  ModelConfig c;
  c.encoder = EncoderKind::kLearned;
  c.frame_length = 32;
  c.representation_size = 512;
  c.overlap = {1, 2};
  c.input_layout = InputLayout::kRealImag;
  c.tcn.noncausal_layers = noncausal_layers;
  c.tcn.mask_activation = MaskActivation::kSigmoid;
  return c;
}

ModelConfig ModelConfig::StftTcn(int noncausal_layers) {
  ModelConfig c;
  c.encoder = EncoderKind::kStft;
  c.frame_length = 192;
  c.representation_size = 512;
  c.overlap = {2, 3};
  c.input_layout = InputLayout::kAmpPhase;
  c.tcn.noncausal_layers = noncausal_layers;
  c.tcn.mask_activation = MaskActivation::kIdentity;
  return c;
}

Model::Model(ModelConfig config, const ModelWeights &weights)
    : config_(std::move(config)), tcn_(MakeTcn(config_, weights)) {
  if (config_.encoder == EncoderKind::kLearned) {
    encoder_ = ToMatrix(weights.Get("encoder.U"));
    decoder_ = ToMatrix(weights.Get("decoder.V"));
  } else {
    BasisPair basis = MakeStftBasis(config_.analysis(), config_.representation_size);
    encoder_ = std::move(basis.analysis);
    decoder_ = std::move(basis.synthesis);
  }
}

Eigen::MatrixXd Model::EncodeFrames(const Eigen::MatrixXd &frames) const {
  return encoder_ * frames;
}

Eigen::MatrixXd Model::NetworkInput(const Eigen::MatrixXd &spec) const {
  if (config_.encoder == EncoderKind::kStft &&
      config_.input_layout == InputLayout::kAmpPhase) {
    return ToAmpPhase({spec, Layout::kRealImag}).data;
  }
  return spec;
}

Encoded Model::Encode(const AudioSignal &signal) const {
  if (signal.sample_rate != config_.sample_rate) {
    Fail(ErrorCode::kSampleRateMismatch,
         "signal is " + std::to_string(signal.sample_rate) + " Hz, model is " +
             std::to_string(config_.sample_rate) + " Hz");
  }
  const FrameMatrix frames = FrameSignal(signal, config_.analysis());
  Encoded out;
  out.spec = {EncodeFrames(frames.data), Layout::kRealImag};
  out.input.data = NetworkInput(out.spec.data);
  out.input.layout = (config_.encoder == EncoderKind::kStft &&
                      config_.input_layout == InputLayout::kAmpPhase)
                         ? Layout::kAmpPhase
                         : Layout::kRealImag;
  return out;
}

std::vector<AudioSignal> Model::Decode(const std::vector<Representation> &masked,
                                       Eigen::Index length) const {
  std::vector<AudioSignal> out;
  for (const Representation &z : masked) {
    if (z.data.rows() != decoder_.cols()) {
      Fail(ErrorCode::kShapeMismatch,
           "decoder expects " + std::to_string(decoder_.cols()) +
               " rows, got " + std::to_string(z.data.rows()));
    }
    FrameMatrix frames;
    frames.config = config_.analysis();
    frames.data = decoder_ * z.data;
    frames.signal_length = length;
    out.push_back(OverlapAdd(frames, config_.sample_rate));
  }
  return out;
}

std::vector<AudioSignal> Model::EnhanceOffline(const AudioSignal &signal) const {
  const Encoded enc = Encode(signal);
  const MaskSet masks = tcn_.Forward(enc.input.data);
  return Decode(ApplyMasks(enc.spec, masks), signal.size());
}

std::vector<Representation> ApplyMasks(const Representation &spec,
                                       const MaskSet &masks) {
  if (spec.layout != Layout::kRealImag) {
    Fail(ErrorCode::kLayoutMismatch, "masks apply to the real-imag representation");
  }
  std::vector<Representation> out;
  for (const Eigen::MatrixXd &m : masks.masks) {
    if (m.rows() != spec.data.rows() || m.cols() != spec.data.cols()) {
      Fail(ErrorCode::kShapeMismatch,
           "mask is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
               ", representation is " + std::to_string(spec.data.rows()) + "x" +
               std::to_string(spec.data.cols()));
    }
    out.push_back({m.cwiseProduct(spec.data), Layout::kRealImag});
  }
  return out;
}

}  // namespace tcnse
