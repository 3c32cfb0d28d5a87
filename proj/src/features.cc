// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tcnse/features.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "tcnse/dsp.h"
#include "tcnse/error.h"

namespace tcnse {

namespace {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// num_bands x (fft_size / 2 + 1) triangular weights on the mel scale.
Eigen::MatrixXd MelFilterbank(int num_bands, int fft_size, int sample_rate) {
  const int num_bins = fft_size / 2 + 1;
  const double mel_hi = HzToMel(sample_rate / 2.0);
  std::vector<double> edges(num_bands + 2);
  for (int i = 0; i < num_bands + 2; ++i) {
    edges[i] = MelToHz(mel_hi * i / (num_bands + 1));
  }
  Eigen::MatrixXd bank = Eigen::MatrixXd::Zero(num_bands, num_bins);
  for (int band = 0; band < num_bands; ++band) {
    const double lo = edges[band], mid = edges[band + 1], hi = edges[band + 2];
    for (int bin = 0; bin < num_bins; ++bin) {
      const double hz = static_cast<double>(bin) * sample_rate / fft_size;
      if (hz > lo && hz < hi) {
        bank(band, bin) = hz <= mid ? (hz - lo) / (mid - lo) : (hi - hz) / (hi - mid);
      }
    }
  }
  return bank;
}

}  // namespace

FeatureMatrix LogFilterbankExtractor::Extract(const AudioSignal &signal) const {
  ValidateSignal(signal);
  if (signal.empty()) Fail(ErrorCode::kEmptyInput, "cannot extract features of an empty signal");
  const int frame = static_cast<int>(std::lround(options_.frame_ms * 1e-3 * signal.sample_rate));
  const int hop = static_cast<int>(std::lround(options_.hop_ms * 1e-3 * signal.sample_rate));
  if (frame > options_.fft_size) {
    Fail(ErrorCode::kInvalidConfig, "feature frame longer than the FFT size");
  }
  const FrameMatrix frames = FrameSignal(signal, {frame, hop, WindowKind::kRectangular});
  const Eigen::MatrixXd bank =
      MelFilterbank(options_.num_bands, options_.fft_size, signal.sample_rate);

  Eigen::VectorXd hamming(frame);
  for (int n = 0; n < frame; ++n) {
    hamming[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (frame - 1));
  }

  Eigen::FFT<double> fft;
  std::vector<double> buffer(options_.fft_size);
  std::vector<std::complex<double>> spectrum;
  FeatureMatrix out;
  out.data.resize(options_.num_bands, frames.num_frames());
  Eigen::VectorXd power(options_.fft_size / 2 + 1);
  for (Eigen::Index t = 0; t < frames.num_frames(); ++t) {
    std::fill(buffer.begin(), buffer.end(), 0.0);
    for (int n = 0; n < frame; ++n) buffer[n] = frames.data(n, t) * hamming[n];
    fft.fwd(spectrum, buffer);
    for (Eigen::Index k = 0; k < power.size(); ++k) power[k] = std::norm(spectrum[k]);
    out.data.col(t) = ((bank * power).array() + options_.floor).log().matrix();
  }
  return out;
}

}  // namespace tcnse
