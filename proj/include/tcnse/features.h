// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_FEATURES_H_
#define TCNSE_FEATURES_H_

#include <string>

#include <Eigen/Dense>

#include "tcnse/audio.h"

namespace tcnse {

// Q x R matrix: feature dimension by time step.
struct FeatureMatrix {
  Eigen::MatrixXd data;
};

// Deterministic waveform -> feature map used by the feature-matching loss.
// Any encoder can be plugged in; the output shape may depend only on the
// input length.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual FeatureMatrix Extract(const AudioSignal &signal) const = 0;
  virtual std::string name() const = 0;
};

// Stand-in extractor: log energies of a mel-spaced triangular filterbank
// (40 bands, 25 ms Hamming frames, 10 ms hop, 512-point FFT,
// log(energy + 1e-8)). It is not a learned speech encoder; it gives the
// feature term something deterministic and phase-insensitive to compare.
class LogFilterbankExtractor : public FeatureExtractor {
 public:
  struct Options {
    int num_bands = 40;
    double frame_ms = 25.0;
    double hop_ms = 10.0;
    int fft_size = 512;
    double floor = 1e-8;
  };

  LogFilterbankExtractor() : LogFilterbankExtractor(Options{}) {}
  explicit LogFilterbankExtractor(Options options) : options_(options) {}

  FeatureMatrix Extract(const AudioSignal &signal) const override;
  std::string name() const override { return "log-filterbank"; }

 private:
  Options options_;
};

}  // namespace tcnse

#endif  // TCNSE_FEATURES_H_
