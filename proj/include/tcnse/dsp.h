// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_DSP_H_
#define TCNSE_DSP_H_

#include <cstddef>

#include <Eigen/Dense>

#include "tcnse/audio.h"

namespace tcnse {

// kHann is a periodic Hann window sampled at half-sample offsets,
// w[n] = sin^2(pi (n + 1/2) / L). It sums to a constant at hops L/2 and L/3
// and, unlike the zero-phase variant, has no zero tap, so the first sample of
// a signal framed without leading padding stays recoverable.
enum class WindowKind { kRectangular, kHann };

// Fraction of each frame shared with the next one, as num/den (1/2, 2/3).
struct OverlapRatio {
  int num = 1;
  int den = 2;

  // L / hop: how many frames cover each sample away from the edges.
  int FramesPerWindow() const { return den / (den - num); }
};

struct AnalysisConfig {
  int frame_length = 32;
  int hop = 16;
  WindowKind window = WindowKind::kHann;

  int overlap() const { return frame_length - hop; }
  void Validate() const;
};

Eigen::VectorXd MakeWindow(int length, WindowKind kind);

// Number of frames for a signal of `length` samples: trailing zero padding
// completes the last frame, and a signal shorter than one frame gives one.
Eigen::Index NumFrames(Eigen::Index length, const AnalysisConfig &config);

// L x T matrix of windowed frames. Column t holds samples [t*hop, t*hop + L).
struct FrameMatrix {
  Eigen::MatrixXd data;
  AnalysisConfig config;
  // Unpadded length of the framed signal; 0 when unknown.
  Eigen::Index signal_length = 0;

  Eigen::Index num_frames() const { return data.cols(); }
};

FrameMatrix FrameSignal(const AudioSignal &signal, const AnalysisConfig &config);

// Sum of analysis-window weights landing on sample n when frames [0, T) are
// present. Overlap-add divides by this, which equals the COLA constant away
// from the signal edges.
double WindowCoverage(Eigen::Index n, Eigen::Index num_frames,
                      const AnalysisConfig &config,
                      const Eigen::VectorXd &window);

// Inverse of FrameSignal: sums the columns at their hop offsets and divides
// by the window coverage. The result is trimmed to frames.signal_length when
// that is set, otherwise it spans (T - 1) * hop + L samples.
AudioSignal OverlapAdd(const FrameMatrix &frames, int sample_rate);

// Fixed Fourier bases in stacked real/imaginary layout. With M = N/2 the DFT
// length (frames shorter than M are zero padded):
//   analysis  (N x L): row k = cos(2 pi k n / M), row M + k = -sin(2 pi k n / M)
//   synthesis (L x N): the inverse DFT with the 1/M factor folded in.
// synthesis * analysis is the L x L identity.
struct BasisPair {
  Eigen::MatrixXd analysis;
  Eigen::MatrixXd synthesis;

  int dft_size() const { return static_cast<int>(analysis.rows() / 2); }
};

BasisPair MakeStftBasis(const AnalysisConfig &config, int representation_size);

enum class Layout { kRealImag, kAmpPhase };

// N x T real matrix. For kRealImag the first N/2 rows are real parts and the
// rest imaginary parts; for kAmpPhase they are amplitudes then phases.
struct Representation {
  Eigen::MatrixXd data;
  Layout layout = Layout::kRealImag;

  Eigen::Index bins() const { return data.rows() / 2; }
  Eigen::Index num_frames() const { return data.cols(); }
};

// Phase is 0 wherever the amplitude is below kZeroMagnitude.
inline constexpr double kZeroMagnitude = 1e-12;

Representation ToAmpPhase(const Representation &spec);
Representation FromAmpPhase(const Representation &amp_phase);

}  // namespace tcnse

#endif  // TCNSE_DSP_H_
