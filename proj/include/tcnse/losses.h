// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_LOSSES_H_
#define TCNSE_LOSSES_H_

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tcnse/audio.h"
#include "tcnse/dsp.h"
#include "tcnse/features.h"

namespace tcnse {

// How the compressed complex value W^c in the power-compressed MSE is formed.
//   kComplexPower:  principal power |W|^c e^{j c angle(W)}
//   kMagnitudeOnly: |W|^c e^{j angle(W)}, phase left untouched
enum class PowerLaw { kComplexPower, kMagnitudeOnly };

struct LossConfig {
  double beta = 0.5;
  double gamma = 0.25;
  double exponent = 0.3;
  AnalysisConfig stft{192, 64, WindowKind::kHann};
  int representation_size = 512;
  // Magnitude floor used in gradient denominators only.
  double magnitude_floor = 1e-8;
  // Divide the spectral sum by the number of (bin, frame) cells.
  bool per_bin_mean = false;
  PowerLaw power_law = PowerLaw::kComplexPower;

  void Validate() const;
};

enum class LossKind { kSiSnr, kSnr, kPcmse, kPasemse };

LossKind ParseLossKind(const std::string &name);
std::string LossKindName(LossKind kind);

enum class LossStatus { kOk, kPerfectEstimate };

struct LossReport {
  double value = 0.0;               // mean over sources
  std::vector<double> per_source;
  std::vector<double> alpha;        // SI-SNR projection scale per source
  LossStatus status = LossStatus::kOk;
};

// -(1/K) sum_k 10 log10(|a s|^2 / |a s - est|^2), a = <s, est> / |s|^2. No
// mean removal. An exact estimate up to scale is reported as
// kPerfectEstimate with value -inf.
LossReport SiSnrLoss(const std::vector<AudioSignal> &clean,
                     const std::vector<AudioSignal> &est);

// -(1/K) sum_k 10 log10(|s|^2 / |s - est|^2).
LossReport SnrLoss(const std::vector<AudioSignal> &clean,
                   const std::vector<AudioSignal> &est);

// Compressed value W^c under the configured power law.
std::complex<double> CompressPower(std::complex<double> w, double exponent,
                                   PowerLaw law);

// beta (|est|^c - |clean|^c)^2 + (1 - beta) |est^c - clean^c|^2 for one bin.
double PcmseBinTerm(std::complex<double> est, std::complex<double> clean,
                    const LossConfig &config);

// Sum of PcmseBinTerm over a pair of real-imag spectrograms.
double PcmseFromSpectra(const Representation &est, const Representation &clean,
                        const LossConfig &config);

// Both signals are re-analyzed with the loss-side STFT before comparison.
LossReport PcmseLoss(const std::vector<AudioSignal> &clean,
                     const std::vector<AudioSignal> &est,
                     const LossConfig &config);

// Mean squared difference of extracted features, averaged over sources.
double PaseFeatureMse(const std::vector<AudioSignal> &clean,
                      const std::vector<AudioSignal> &est,
                      const FeatureExtractor &extractor);

// gamma * feature MSE + PCMSE.
LossReport PasemseLoss(const std::vector<AudioSignal> &clean,
                       const std::vector<AudioSignal> &est,
                       const LossConfig &config,
                       const FeatureExtractor &extractor);

LossReport ComputeLoss(LossKind kind, const std::vector<AudioSignal> &clean,
                       const std::vector<AudioSignal> &est,
                       const LossConfig &config,
                       const FeatureExtractor &extractor);

// Analytic gradient of the SI-SNR, SNR or PCMSE loss with respect to each
// estimate's samples. Throws kGradientUndefined at singular points.
std::vector<Eigen::VectorXd> LossGradient(LossKind kind,
                                          const std::vector<AudioSignal> &clean,
                                          const std::vector<AudioSignal> &est,
                                          const LossConfig &config);

// Segmental SNR in dB: 32 ms frames with a 16 ms hop, per-frame SNR clamped
// to [-10, 35] dB, frames with clean energy below 1e-8 skipped.
double SsnrMetric(const AudioSignal &clean, const AudioSignal &est);

inline constexpr double kSsnrFloorDb = -10.0;
inline constexpr double kSsnrCeilDb = 35.0;
inline constexpr double kSilenceEnergy = 1e-8;

// Negated single-source SI-SNR loss; +inf for a perfect estimate.
double SiSnrMetric(const AudioSignal &clean, const AudioSignal &est);

}  // namespace tcnse

#endif  // TCNSE_LOSSES_H_
