// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_MODEL_H_
#define TCNSE_MODEL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tcnse/audio.h"
#include "tcnse/dsp.h"
#include "tcnse/tcn.h"

namespace tcnse {

enum class EncoderKind { kLearned, kStft };
enum class InputLayout { kRealImag, kAmpPhase };

struct ModelConfig {
  EncoderKind encoder = EncoderKind::kLearned;
  int frame_length = 32;          // L
  int representation_size = 512;  // N
  OverlapRatio overlap{1, 2};
  InputLayout input_layout = InputLayout::kRealImag;  // stft only
  WindowKind window = WindowKind::kHann;
  int sample_rate = 16000;
  TcnConfig tcn;

  int num_sources() const { return tcn.num_sources; }
  int hop() const { return frame_length / overlap.FramesPerWindow(); }
  AnalysisConfig analysis() const { return {frame_length, hop(), window}; }
  void Validate() const;

  // Learned 32-sample encoder, N=512, 1/2 overlap, sigmoid masks.
  static ModelConfig ConvTasNet(int noncausal_layers = 5);
  // Fourier encoder over 192-sample frames, N=512, 2/3 overlap, amp-phase
  // network input, unbounded masks.
  static ModelConfig StftTcn(int noncausal_layers = 3);
};

// Named row-major float32 tensor, the unit of weight persistence.
struct Tensor {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<float> values;

  std::size_t NumElements() const;
};

class ModelWeights {
 public:
  ModelWeights() = default;
  explicit ModelWeights(std::vector<Tensor> tensors);

  const std::vector<Tensor> &tensors() const { return tensors_; }
  const Tensor &Get(const std::string &name) const;
  bool Contains(const std::string &name) const;
  std::size_t NumParameters() const;

 private:
  std::vector<Tensor> tensors_;
};

// Tensor names and shapes a config requires, in initialization order.
struct TensorSpec {
  std::string name;
  std::vector<std::uint32_t> shape;
  int fan_in;  // 0 for tensors with a fixed init value
  float fill;  // used when fan_in == 0
};
std::vector<TensorSpec> ExpectedTensors(const ModelConfig &config);

// Throws kWeightsConfigMismatch on missing, extra, or misshapen tensors and
// kNonFiniteInput on NaN/Inf values.
void ValidateWeights(const ModelConfig &config, const ModelWeights &weights);

// Deterministic initialization from a splitmix64 stream. Weight matrices and
// biases draw uniform values in [-1/sqrt(fan_in), 1/sqrt(fan_in)] in
// ExpectedTensors order; norm gains start at 1, norm biases at 0, PReLU
// slopes at 0.25.
ModelWeights InitRandom(const ModelConfig &config, std::uint64_t seed);

// Trainable parameter count from the architecture alone. The Fourier
// encoder/decoder contribute nothing.
std::int64_t ParamCount(const ModelConfig &config);
std::int64_t EncoderDecoderParamCount(const ModelConfig &config);

struct Encoded {
  Representation spec;   // W (learned) or W_SPEC (stft), real-imag layout
  Representation input;  // what the separation network sees
};

class Model {
 public:
  Model(ModelConfig config, const ModelWeights &weights);

  Encoded Encode(const AudioSignal &signal) const;
  // Representation of already-framed input, shared with the streaming path.
  Eigen::MatrixXd EncodeFrames(const Eigen::MatrixXd &frames) const;
  Eigen::MatrixXd NetworkInput(const Eigen::MatrixXd &spec) const;

  // Decodes each masked representation and overlap-adds it back to a signal
  // of `length` samples.
  std::vector<AudioSignal> Decode(const std::vector<Representation> &masked,
                                  Eigen::Index length) const;

  // Speech first, then noise when K = 2.
  std::vector<AudioSignal> EnhanceOffline(const AudioSignal &signal) const;

  const ModelConfig &config() const { return config_; }
  const Tcn &tcn() const { return tcn_; }
  const Eigen::MatrixXd &encoder() const { return encoder_; }
  const Eigen::MatrixXd &decoder() const { return decoder_; }

 private:
  ModelConfig config_;
  Eigen::MatrixXd encoder_;  // N x L
  Eigen::MatrixXd decoder_;  // L x N
  Tcn tcn_;
};

// Z_k = M_k .* W. W must be in real-imag layout.
std::vector<Representation> ApplyMasks(const Representation &spec,
                                       const MaskSet &masks);

}  // namespace tcnse

#endif  // TCNSE_MODEL_H_
