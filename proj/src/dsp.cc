// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tcnse/dsp.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tcnse/error.h"

namespace tcnse {

void ValidateSignal(const AudioSignal &signal) {
  if (signal.sample_rate <= 0) {
    Fail(ErrorCode::kInvalidConfig,
         "sample rate must be positive, got " +
             std::to_string(signal.sample_rate));
  }
  if (!signal.samples.allFinite()) {
    Fail(ErrorCode::kNonFiniteInput, "signal contains NaN or Inf samples");
  }
}

void AnalysisConfig::Validate() const {
  if (frame_length < 1 || hop < 1 || hop > frame_length) {
    Fail(ErrorCode::kInvalidConfig,
         "analysis config needs 1 <= hop <= frame_length, got L=" +
             std::to_string(frame_length) + " hop=" + std::to_string(hop));
  }
}

Eigen::VectorXd MakeWindow(int length, WindowKind kind) {
  Eigen::VectorXd window(length);
  for (int n = 0; n < length; ++n) {
    if (kind == WindowKind::kRectangular) {
      window[n] = 1.0;
    } else {
      double s = std::sin(std::numbers::pi * (n + 0.5) / length);
      window[n] = s * s;
    }
  }
  return window;
}

Eigen::Index NumFrames(Eigen::Index length, const AnalysisConfig &config) {
  const Eigen::Index frame = config.frame_length, hop = config.hop;
  if (length <= frame) return 1;
  return (length - frame + hop - 1) / hop + 1;
}

FrameMatrix FrameSignal(const AudioSignal &signal,
                        const AnalysisConfig &config) {
  config.Validate();
  if (signal.empty()) Fail(ErrorCode::kEmptyInput, "cannot frame an empty signal");
  ValidateSignal(signal);

  const Eigen::Index frame = config.frame_length, hop = config.hop;
  const Eigen::Index len = signal.size();
  const Eigen::Index num_frames = NumFrames(len, config);
  const Eigen::VectorXd window = MakeWindow(config.frame_length, config.window);

  FrameMatrix out;
  out.config = config;
  out.signal_length = len;
  out.data = Eigen::MatrixXd::Zero(frame, num_frames);
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    const Eigen::Index start = t * hop;
    const Eigen::Index n = std::min(frame, len - start);
    out.data.col(t).head(n) =
        signal.samples.segment(start, n).cwiseProduct(window.head(n));
  }
  return out;
}

double WindowCoverage(Eigen::Index n, Eigen::Index num_frames,
                      const AnalysisConfig &config,
                      const Eigen::VectorXd &window) {
  const Eigen::Index frame = config.frame_length, hop = config.hop;
  // frames t with t*hop <= n < t*hop + L
  Eigen::Index first = n - frame + 1 <= 0 ? 0 : (n - frame + hop) / hop;
  Eigen::Index last = std::min(n / hop, num_frames - 1);
  double sum = 0.0;
  for (Eigen::Index t = first; t <= last; ++t) sum += window[n - t * hop];
  return sum;
}

AudioSignal OverlapAdd(const FrameMatrix &frames, int sample_rate) {
  const AnalysisConfig &config = frames.config;
  config.Validate();
  if (frames.data.rows() != config.frame_length) {
    Fail(ErrorCode::kShapeMismatch,
         "frame matrix has " + std::to_string(frames.data.rows()) +
             " rows, expected " + std::to_string(config.frame_length));
  }
  const Eigen::Index frame = config.frame_length, hop = config.hop;
  const Eigen::Index num_frames = frames.num_frames();
  AudioSignal out;
  out.sample_rate = sample_rate;
  if (num_frames == 0) return out;

  const Eigen::Index full = (num_frames - 1) * hop + frame;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(full);
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    acc.segment(t * hop, frame) += frames.data.col(t);
  }
  const Eigen::VectorXd window = MakeWindow(config.frame_length, config.window);
  const Eigen::Index len =
      frames.signal_length > 0 ? std::min(frames.signal_length, full) : full;
  out.samples.resize(len);
  for (Eigen::Index n = 0; n < len; ++n) {
    out.samples[n] = acc[n] / WindowCoverage(n, num_frames, config, window);
  }
  return out;
}

BasisPair MakeStftBasis(const AnalysisConfig &config, int representation_size) {
  config.Validate();
  if (representation_size <= 0 || representation_size % 2 != 0) {
    Fail(ErrorCode::kInvalidBasisSize,
         "representation size must be positive and even, got " +
             std::to_string(representation_size));
  }
  const int bins = representation_size / 2;
  const int frame = config.frame_length;
  if (bins < frame) {
    Fail(ErrorCode::kInvalidBasisSize,
         "N/2 = " + std::to_string(bins) +
             " DFT bins cannot represent frames of length " +
             std::to_string(frame));
  }
  BasisPair basis;
  basis.analysis.resize(representation_size, frame);
  basis.synthesis.resize(frame, representation_size);
  for (int k = 0; k < bins; ++k) {
    for (int n = 0; n < frame; ++n) {
      // reduce k*n mod M first so large products keep full precision
      const long phase_index = (static_cast<long>(k) * n) % bins;
      const double angle = 2.0 * std::numbers::pi * phase_index / bins;
      const double c = std::cos(angle), s = std::sin(angle);
      basis.analysis(k, n) = c;
      basis.analysis(bins + k, n) = -s;
      basis.synthesis(n, k) = c / bins;
      basis.synthesis(n, bins + k) = -s / bins;
    }
  }
  return basis;
}

Representation ToAmpPhase(const Representation &spec) {
  if (spec.layout != Layout::kRealImag) {
    Fail(ErrorCode::kLayoutMismatch, "expected a real-imag stacked representation");
  }
  if (spec.data.rows() % 2 != 0) {
    Fail(ErrorCode::kShapeMismatch, "stacked representation needs an even row count");
  }
  const Eigen::Index bins = spec.bins();
  Representation out;
  out.layout = Layout::kAmpPhase;
  out.data.resize(spec.data.rows(), spec.data.cols());
  for (Eigen::Index t = 0; t < spec.data.cols(); ++t) {
    for (Eigen::Index f = 0; f < bins; ++f) {
      const double re = spec.data(f, t), im = spec.data(bins + f, t);
      const double amp = std::hypot(re, im);
      out.data(f, t) = amp;
      // im + 0.0 turns -0 into +0 so the negative real axis maps to +pi.
      out.data(bins + f, t) = amp < kZeroMagnitude ? 0.0 : std::atan2(im + 0.0, re);
    }
  }
  return out;
}

Representation FromAmpPhase(const Representation &amp_phase) {
  if (amp_phase.layout != Layout::kAmpPhase) {
    Fail(ErrorCode::kLayoutMismatch, "expected an amp-phase stacked representation");
  }
  const Eigen::Index bins = amp_phase.bins();
  Representation out;
  out.layout = Layout::kRealImag;
  out.data.resize(amp_phase.data.rows(), amp_phase.data.cols());
  const auto amp = amp_phase.data.topRows(bins).array();
  const auto phase = amp_phase.data.bottomRows(bins).array();
  out.data.topRows(bins) = (amp * phase.cos()).matrix();
  out.data.bottomRows(bins) = (amp * phase.sin()).matrix();
  return out;
}

}  // namespace tcnse
