// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_IO_H_
#define TCNSE_IO_H_

#include <cstdint>
#include <string>

#include "tcnse/audio.h"
#include "tcnse/losses.h"
#include "tcnse/model.h"

namespace tcnse {

// 16 kHz mono 16-bit PCM only. Samples are scaled by 1/32768.
inline constexpr int kWavSampleRate = 16000;

AudioSignal ReadWav(const std::string &path);

// Rounds to the nearest 16-bit value and saturates; returns how many samples
// had to be clipped.
std::size_t WriteWav(const std::string &path, const AudioSignal &signal);

// Binary weight container, all integers little endian:
//   "TCNW" | u32 version | u32 tensor count |
//   per tensor: u32 name length, UTF-8 name, u32 rank, u32 dims[rank],
//               float32 data[prod(dims)] (row-major)
inline constexpr std::uint32_t kWeightsVersion = 1;

void SaveWeights(const std::string &path, const ModelWeights &weights);
ModelWeights LoadWeights(const std::string &path);
// Also checks the tensors against `config` (kWeightsConfigMismatch).
ModelWeights LoadWeights(const std::string &path, const ModelConfig &config);

struct RunConfig {
  ModelConfig model = ModelConfig::ConvTasNet();
  LossConfig loss;
  std::uint64_t seed = 42;
};

// JSON document. An optional "preset" ("conv-tasnet" or "stft-tcn") selects
// the base configuration; "model", "model.tcn", "loss" and "seed" override
// it field by field. Unknown keys raise kUnknownConfigKey.
RunConfig ParseRunConfig(const std::string &text);
RunConfig LoadRunConfig(const std::string &path);
std::string RunConfigToJson(const RunConfig &config);

}  // namespace tcnse

#endif  // TCNSE_IO_H_
