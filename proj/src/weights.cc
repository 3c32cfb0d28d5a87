// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "tcnse/error.h"
#include "tcnse/model.h"

namespace tcnse {

namespace {

std::string ShapeString(const std::vector<std::uint32_t> &shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t Next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // [0, 1) with 53 random bits
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace

std::size_t Tensor::NumElements() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

ModelWeights::ModelWeights(std::vector<Tensor> tensors)
    : tensors_(std::move(tensors)) {
  std::set<std::string> names;
  for (const Tensor &t : tensors_) {
    if (!names.insert(t.name).second) {
      Fail(ErrorCode::kWeightsConfigMismatch, "duplicate tensor " + t.name);
    }
    if (t.values.size() != t.NumElements()) {
      Fail(ErrorCode::kShapeMismatch, "tensor " + t.name + " holds " +
                                          std::to_string(t.values.size()) +
                                          " values for shape " +
                                          ShapeString(t.shape));
    }
  }
}

const Tensor &ModelWeights::Get(const std::string &name) const {
  for (const Tensor &t : tensors_) {
    if (t.name == name) return t;
  }
  Fail(ErrorCode::kWeightsConfigMismatch, "missing tensor " + name);
}

bool ModelWeights::Contains(const std::string &name) const {
  for (const Tensor &t : tensors_) {
    if (t.name == name) return true;
  }
  return false;
}

std::size_t ModelWeights::NumParameters() const {
  std::size_t n = 0;
  for (const Tensor &t : tensors_) n += t.NumElements();
  return n;
}

std::vector<TensorSpec> ExpectedTensors(const ModelConfig &config) {
  config.Validate();
  using U = std::uint32_t;
  const TcnConfig &tcn = config.tcn;
  const U n = config.representation_size, l = config.frame_length;
  const U b = tcn.bottleneck_channels, h = tcn.conv_channels,
          p = tcn.kernel_size, sc = tcn.skip_channels, k = tcn.num_sources;

  std::vector<TensorSpec> specs;
  auto dense = [&](const std::string &name, U rows, U cols) {
    specs.push_back({name + ".weight", {rows, cols}, static_cast<int>(cols), 0.f});
    specs.push_back({name + ".bias", {rows}, static_cast<int>(cols), 0.f});
  };
  auto norm = [&](const std::string &name, U channels) {
    specs.push_back({name + ".gain", {channels}, 0, 1.f});
    specs.push_back({name + ".bias", {channels}, 0, 0.f});
  };
  auto prelu = [&](const std::string &name) {
    specs.push_back({name + ".alpha", {1}, 0, 0.25f});
  };

  if (config.encoder == EncoderKind::kLearned) {
    specs.push_back({"encoder.U", {n, l}, static_cast<int>(l), 0.f});
    specs.push_back({"decoder.V", {l, n}, static_cast<int>(n), 0.f});
  }
  norm("tcn.input_norm", n);
  dense("tcn.bottleneck", b, n);
  for (int i = 0; i < tcn.NumBlocks(); ++i) {
    const std::string block = "tcn.block" + std::to_string(i);
    dense(block + ".in_conv", h, b);
    prelu(block + ".prelu1");
    norm(block + ".norm1", h);
    specs.push_back({block + ".dconv.weight", {h, p}, static_cast<int>(p), 0.f});
    specs.push_back({block + ".dconv.bias", {h}, static_cast<int>(p), 0.f});
    prelu(block + ".prelu2");
    norm(block + ".norm2", h);
    dense(block + ".res_conv", b, h);
    dense(block + ".skip_conv", sc, h);
  }
  prelu("tcn.mask.prelu");
  dense("tcn.mask.conv", k * n, sc);
  return specs;
}

void ValidateWeights(const ModelConfig &config, const ModelWeights &weights) {
  const std::vector<TensorSpec> specs = ExpectedTensors(config);
  if (specs.size() != weights.tensors().size()) {
    Fail(ErrorCode::kWeightsConfigMismatch,
         "expected " + std::to_string(specs.size()) + " tensors, found " +
             std::to_string(weights.tensors().size()));
  }
  for (const TensorSpec &spec : specs) {
    if (!weights.Contains(spec.name)) {
      Fail(ErrorCode::kWeightsConfigMismatch, "missing tensor " + spec.name);
    }
    const Tensor &t = weights.Get(spec.name);
    if (t.shape != spec.shape) {
      Fail(ErrorCode::kWeightsConfigMismatch,
           "tensor " + spec.name + " has shape " + ShapeString(t.shape) +
               ", config wants " + ShapeString(spec.shape));
    }
    for (float v : t.values) {
      if (!std::isfinite(v)) {
        Fail(ErrorCode::kNonFiniteInput, "tensor " + spec.name + " is not finite");
      }
    }
  }
}

ModelWeights InitRandom(const ModelConfig &config, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Tensor> tensors;
  for (const TensorSpec &spec : ExpectedTensors(config)) {
    Tensor t{spec.name, spec.shape, {}};
    t.values.resize(t.NumElements());
    if (spec.fan_in == 0) {
      std::fill(t.values.begin(), t.values.end(), spec.fill);
    } else {
      const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in));
      for (float &v : t.values) {
        v = static_cast<float>(bound * (2.0 * rng.Uniform() - 1.0));
      }
    }
    tensors.push_back(std::move(t));
  }
  return ModelWeights(std::move(tensors));
}

std::int64_t EncoderDecoderParamCount(const ModelConfig &config) {
  if (config.encoder == EncoderKind::kStft) return 0;
  return 2LL * config.representation_size * config.frame_length;
}

std::int64_t ParamCount(const ModelConfig &config) {
  config.Validate();
  const TcnConfig &c = config.tcn;
  const std::int64_t n = config.representation_size, b = c.bottleneck_channels,
                     h = c.conv_channels, p = c.kernel_size,
                     sc = c.skip_channels, k = c.num_sources;
  const std::int64_t front = 2 * n + b * n + b;
  const std::int64_t block = (h * b + h) + 1 + 2 * h + (h * p + h) + 1 +
                             2 * h + (b * h + b) + (sc * h + sc);
  const std::int64_t head = 1 + k * n * sc + k * n;
  return EncoderDecoderParamCount(config) + front + c.NumBlocks() * block + head;
}

}  // namespace tcnse
