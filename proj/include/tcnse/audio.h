// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_AUDIO_H_
#define TCNSE_AUDIO_H_

#include <Eigen/Dense>

namespace tcnse {

// Mono time-domain signal. Samples are nominally in [-1, 1].
struct AudioSignal {
  Eigen::VectorXd samples;
  int sample_rate = 16000;

  Eigen::Index size() const { return samples.size(); }
  bool empty() const { return samples.size() == 0; }
};

// Throws kInvalidConfig for a non-positive rate, kNonFiniteInput for NaN/Inf.
void ValidateSignal(const AudioSignal &signal);

}  // namespace tcnse

#endif  // TCNSE_AUDIO_H_
