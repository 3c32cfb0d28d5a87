// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tcnse/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "tcnse/error.h"

namespace tcnse {

namespace {

constexpr double kPerfectThreshold = 1e-30;
const double kDbScale = 10.0 / std::numbers::ln10;  // d(10 log10 x)/dx * x

// Loss evaluations repeat with the same analysis settings, so keep the last
// basis around instead of rebuilding a few hundred thousand trig values.
std::shared_ptr<const BasisPair> LossBasis(const LossConfig &config) {
  static std::mutex mu;
  static std::shared_ptr<const BasisPair> cached;
  static AnalysisConfig cached_stft;
  static int cached_size = 0;
  std::lock_guard<std::mutex> lock(mu);
  if (!cached || cached_size != config.representation_size ||
      cached_stft.frame_length != config.stft.frame_length ||
      cached_stft.hop != config.stft.hop || cached_stft.window != config.stft.window) {
    cached = std::make_shared<const BasisPair>(
        MakeStftBasis(config.stft, config.representation_size));
    cached_stft = config.stft;
    cached_size = config.representation_size;
  }
  return cached;
}

void CheckPairs(const std::vector<AudioSignal> &clean,
                const std::vector<AudioSignal> &est) {
  if (clean.empty() || clean.size() != est.size()) {
    Fail(ErrorCode::kShapeMismatch,
         "need the same nonzero number of clean and estimated sources, got " +
             std::to_string(clean.size()) + " and " + std::to_string(est.size()));
  }
  for (std::size_t k = 0; k < clean.size(); ++k) {
    if (clean[k].size() != est[k].size()) {
      Fail(ErrorCode::kShapeMismatch,
           "source " + std::to_string(k) + ": clean has " +
               std::to_string(clean[k].size()) + " samples, estimate has " +
               std::to_string(est[k].size()));
    }
    if (clean[k].empty()) Fail(ErrorCode::kEmptyInput, "empty source signal");
    ValidateSignal(clean[k]);
    ValidateSignal(est[k]);
  }
}

double CleanEnergy(const AudioSignal &s) {
  const double energy = s.samples.squaredNorm();
  if (energy == 0.0) {
    Fail(ErrorCode::kDegenerateReference, "clean reference has zero energy");
  }
  return energy;
}

LossReport Average(LossReport r) {
  double sum = 0.0;
  for (double v : r.per_source) sum += v;
  r.value = sum / static_cast<double>(r.per_source.size());
  return r;
}

double Angle(std::complex<double> w) {
  // +0.0 folds a negative-zero imaginary part onto the upper branch
  return std::atan2(w.imag() + 0.0, w.real());
}

Eigen::MatrixXd LossSpectrum(const AudioSignal &signal, const Eigen::MatrixXd &analysis,
                             const AnalysisConfig &stft) {
  return analysis * FrameSignal(signal, stft).data;
}

double CellCount(const Eigen::MatrixXd &spec) {
  return static_cast<double>(spec.rows() / 2) * static_cast<double>(spec.cols());
}

}  // namespace

void LossConfig::Validate() const {
  if (beta < 0.0 || beta > 1.0) Fail(ErrorCode::kInvalidConfig, "beta must be in [0, 1]");
  if (gamma < 0.0) Fail(ErrorCode::kInvalidConfig, "gamma must be >= 0");
  if (exponent <= 0.0) Fail(ErrorCode::kInvalidConfig, "exponent must be > 0");
  if (magnitude_floor < 0.0) Fail(ErrorCode::kInvalidConfig, "magnitude floor must be >= 0");
  stft.Validate();
}

LossKind ParseLossKind(const std::string &name) {
  if (name == "sisnr") return LossKind::kSiSnr;
  if (name == "snr") return LossKind::kSnr;
  if (name == "pcmse") return LossKind::kPcmse;
  if (name == "pasemse") return LossKind::kPasemse;
  Fail(ErrorCode::kInvalidConfig, "unknown loss '" + name + "'");
}

std::string LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kSiSnr: return "sisnr";
    case LossKind::kSnr: return "snr";
    case LossKind::kPcmse: return "pcmse";
    case LossKind::kPasemse: return "pasemse";
  }
  return "unknown";
}

LossReport SiSnrLoss(const std::vector<AudioSignal> &clean,
                     const std::vector<AudioSignal> &est) {
  CheckPairs(clean, est);
  LossReport r;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    const Eigen::VectorXd &s = clean[k].samples;
    const Eigen::VectorXd &e = est[k].samples;
    const double alpha = s.dot(e) / CleanEnergy(clean[k]);
    const double target = (alpha * s).squaredNorm();
    const double error = (alpha * s - e).squaredNorm();
    r.alpha.push_back(alpha);
    if (error < kPerfectThreshold) {
      r.status = LossStatus::kPerfectEstimate;
      r.per_source.push_back(-std::numeric_limits<double>::infinity());
    } else {
      r.per_source.push_back(-10.0 * std::log10(target / error));
    }
  }
  return Average(std::move(r));
}

LossReport SnrLoss(const std::vector<AudioSignal> &clean,
                   const std::vector<AudioSignal> &est) {
  CheckPairs(clean, est);
  LossReport r;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    const double energy = CleanEnergy(clean[k]);
    const double error = (clean[k].samples - est[k].samples).squaredNorm();
    if (error < kPerfectThreshold) {
      r.status = LossStatus::kPerfectEstimate;
      r.per_source.push_back(-std::numeric_limits<double>::infinity());
    } else {
      r.per_source.push_back(-10.0 * std::log10(energy / error));
    }
  }
  return Average(std::move(r));
}

std::complex<double> CompressPower(std::complex<double> w, double exponent,
                                   PowerLaw law) {
  const double mag = std::abs(w);
  if (mag == 0.0) return {0.0, 0.0};
  const double phase = law == PowerLaw::kComplexPower ? exponent * Angle(w) : Angle(w);
  return std::polar(std::pow(mag, exponent), phase);
}

double PcmseBinTerm(std::complex<double> est, std::complex<double> clean,
                    const LossConfig &config) {
  const double c = config.exponent;
  const double mag = std::pow(std::abs(est), c) - std::pow(std::abs(clean), c);
  const std::complex<double> diff = CompressPower(est, c, config.power_law) -
                                    CompressPower(clean, c, config.power_law);
  return config.beta * mag * mag + (1.0 - config.beta) * std::norm(diff);
}

double PcmseFromSpectra(const Representation &est, const Representation &clean,
                        const LossConfig &config) {
  if (est.layout != Layout::kRealImag || clean.layout != Layout::kRealImag) {
    Fail(ErrorCode::kLayoutMismatch, "PCMSE compares real-imag spectra");
  }
  if (est.data.rows() != clean.data.rows() || est.data.cols() != clean.data.cols()) {
    Fail(ErrorCode::kShapeMismatch, "PCMSE spectra differ in shape");
  }
  const Eigen::Index bins = est.bins();
  double sum = 0.0;
  for (Eigen::Index t = 0; t < est.data.cols(); ++t) {
    for (Eigen::Index f = 0; f < bins; ++f) {
      sum += PcmseBinTerm({est.data(f, t), est.data(bins + f, t)},
                          {clean.data(f, t), clean.data(bins + f, t)}, config);
    }
  }
  if (config.per_bin_mean) sum /= CellCount(est.data);
  return sum;
}

LossReport PcmseLoss(const std::vector<AudioSignal> &clean,
                     const std::vector<AudioSignal> &est, const LossConfig &config) {
  config.Validate();
  CheckPairs(clean, est);
  const std::shared_ptr<const BasisPair> basis_ptr = LossBasis(config);
  const BasisPair &basis = *basis_ptr;
  LossReport r;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    const Representation est_spec{LossSpectrum(est[k], basis.analysis, config.stft),
                                  Layout::kRealImag};
    const Representation clean_spec{LossSpectrum(clean[k], basis.analysis, config.stft),
                                    Layout::kRealImag};
    r.per_source.push_back(PcmseFromSpectra(est_spec, clean_spec, config));
  }
  return Average(std::move(r));
}

double PaseFeatureMse(const std::vector<AudioSignal> &clean,
                      const std::vector<AudioSignal> &est,
                      const FeatureExtractor &extractor) {
  CheckPairs(clean, est);
  double sum = 0.0;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    const FeatureMatrix p = extractor.Extract(clean[k]);
    const FeatureMatrix q = extractor.Extract(est[k]);
    if (p.data.rows() != q.data.rows() || p.data.cols() != q.data.cols() ||
        p.data.size() == 0) {
      Fail(ErrorCode::kExtractorInconsistent,
           extractor.name() + " produced " + std::to_string(p.data.rows()) + "x" +
               std::to_string(p.data.cols()) + " and " +
               std::to_string(q.data.rows()) + "x" + std::to_string(q.data.cols()) +
               " features");
    }
    sum += (p.data - q.data).squaredNorm() / static_cast<double>(p.data.size());
  }
  return sum / static_cast<double>(clean.size());
}

LossReport PasemseLoss(const std::vector<AudioSignal> &clean,
                       const std::vector<AudioSignal> &est, const LossConfig &config,
                       const FeatureExtractor &extractor) {
  LossReport r = PcmseLoss(clean, est, config);
  double sum = 0.0;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    const double feature = PaseFeatureMse({clean[k]}, {est[k]}, extractor);
    r.per_source[k] += config.gamma * feature;
    sum += feature;
  }
  // Combine the averaged terms exactly as gamma * L_feature + L_pcmse.
  r.value = config.gamma * (sum / static_cast<double>(clean.size())) + r.value;
  return r;
}

LossReport ComputeLoss(LossKind kind, const std::vector<AudioSignal> &clean,
                       const std::vector<AudioSignal> &est, const LossConfig &config,
                       const FeatureExtractor &extractor) {
  switch (kind) {
    case LossKind::kSiSnr: return SiSnrLoss(clean, est);
    case LossKind::kSnr: return SnrLoss(clean, est);
    case LossKind::kPcmse: return PcmseLoss(clean, est, config);
    case LossKind::kPasemse: return PasemseLoss(clean, est, config, extractor);
  }
  Fail(ErrorCode::kInvalidConfig, "unknown loss kind");
}

// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd SiSnrGradient(const Eigen::VectorXd &s, const Eigen::VectorXd &e,
                              double scale) {
  const double alpha = s.dot(e) / s.squaredNorm();
  const Eigen::VectorXd target = alpha * s;
  const Eigen::VectorXd error = e - target;
  const double target_energy = target.squaredNorm();
  const double error_energy = error.squaredNorm();
  if (error_energy < kPerfectThreshold || target_energy == 0.0) {
    Fail(ErrorCode::kGradientUndefined, "SI-SNR gradient is singular here");
  }
  // loss = -scale * 10 log10(|t|^2 / |e - t|^2); d|t|^2 = 2t, d|e-t|^2 = 2(e-t)
  return -scale * kDbScale *
         (2.0 * target / target_energy - 2.0 * error / error_energy);
}

Eigen::VectorXd SnrGradient(const Eigen::VectorXd &s, const Eigen::VectorXd &e,
                            double scale) {
  const Eigen::VectorXd diff = e - s;
  const double error_energy = diff.squaredNorm();
  if (error_energy < kPerfectThreshold) {
    Fail(ErrorCode::kGradientUndefined, "SNR gradient is singular at est == clean");
  }
  return scale * kDbScale * 2.0 * diff / error_energy;
}

// d(bin term)/d(Re est), d(bin term)/d(Im est)
std::pair<double, double> PcmseBinGradient(std::complex<double> est,
                                           std::complex<double> clean,
                                           const LossConfig &config) {
  const double c = config.exponent;
  const double a = est.real(), b = est.imag();
  const double mag = std::abs(est);
  const double floored = std::max(mag, config.magnitude_floor);
  const double scale = std::pow(floored, c - 2.0);
  const double p = config.power_law == PowerLaw::kComplexPower ? c : 1.0;
  const double theta = mag > 0.0 ? Angle(est) : 0.0;

  const double mag_diff = std::pow(mag, c) - std::pow(std::abs(clean), c);
  double ga = 2.0 * config.beta * mag_diff * c * scale * a;
  double gb = 2.0 * config.beta * mag_diff * c * scale * b;

  const std::complex<double> diff = CompressPower(est, c, config.power_law) -
                                    CompressPower(clean, c, config.power_law);
  const std::complex<double> rot = std::polar(scale, p * theta);
  const std::complex<double> d_da = rot * std::complex<double>(c * a, -p * b);
  const std::complex<double> d_db = rot * std::complex<double>(c * b, p * a);
  ga += 2.0 * (1.0 - config.beta) * std::real(std::conj(diff) * d_da);
  gb += 2.0 * (1.0 - config.beta) * std::real(std::conj(diff) * d_db);
  return {ga, gb};
}

Eigen::VectorXd PcmseGradient(const AudioSignal &clean, const AudioSignal &est,
                              const BasisPair &basis, const LossConfig &config,
                              double scale) {
  const AnalysisConfig &stft = config.stft;
  const Eigen::MatrixXd est_spec = LossSpectrum(est, basis.analysis, stft);
  const Eigen::MatrixXd clean_spec = LossSpectrum(clean, basis.analysis, stft);
  const Eigen::Index bins = est_spec.rows() / 2;
  if (config.per_bin_mean) scale /= CellCount(est_spec);

  Eigen::MatrixXd grad_spec(est_spec.rows(), est_spec.cols());
  for (Eigen::Index t = 0; t < est_spec.cols(); ++t) {
    for (Eigen::Index f = 0; f < bins; ++f) {
      const auto [ga, gb] = PcmseBinGradient({est_spec(f, t), est_spec(bins + f, t)},
                                             {clean_spec(f, t), clean_spec(bins + f, t)},
                                             config);
      grad_spec(f, t) = scale * ga;
      grad_spec(bins + f, t) = scale * gb;
    }
  }
  // Adjoint of analysis, then of windowed framing.
  const Eigen::MatrixXd grad_frames = basis.analysis.transpose() * grad_spec;
  const Eigen::VectorXd window = MakeWindow(stft.frame_length, stft.window);
  const Eigen::Index len = est.size();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(len);
  for (Eigen::Index t = 0; t < grad_frames.cols(); ++t) {
    const Eigen::Index start = t * stft.hop;
    const Eigen::Index n = std::min<Eigen::Index>(stft.frame_length, len - start);
    grad.segment(start, n) += grad_frames.col(t).head(n).cwiseProduct(window.head(n));
  }
  return grad;
}

}  // namespace

std::vector<Eigen::VectorXd> LossGradient(LossKind kind,
                                          const std::vector<AudioSignal> &clean,
                                          const std::vector<AudioSignal> &est,
                                          const LossConfig &config) {
  CheckPairs(clean, est);
  const double scale = 1.0 / static_cast<double>(clean.size());
  std::vector<Eigen::VectorXd> grads;
  switch (kind) {
    case LossKind::kSiSnr:
      for (std::size_t k = 0; k < clean.size(); ++k) {
        CleanEnergy(clean[k]);
        grads.push_back(SiSnrGradient(clean[k].samples, est[k].samples, scale));
      }
      break;
    case LossKind::kSnr:
      for (std::size_t k = 0; k < clean.size(); ++k) {
        CleanEnergy(clean[k]);
        grads.push_back(SnrGradient(clean[k].samples, est[k].samples, scale));
      }
      break;
    case LossKind::kPcmse: {
      config.Validate();
      if (config.magnitude_floor <= 0.0) {
        Fail(ErrorCode::kGradientUndefined, "PCMSE gradient needs a positive magnitude floor");
      }
      const std::shared_ptr<const BasisPair> basis = LossBasis(config);
      for (std::size_t k = 0; k < clean.size(); ++k) {
        grads.push_back(PcmseGradient(clean[k], est[k], *basis, config, scale));
      }
      break;
    }
    case LossKind::kPasemse:
      Fail(ErrorCode::kGradientUndefined,
           "the feature-matching loss has no analytic gradient for a generic extractor");
  }
  return grads;
}

// ---------------------------------------------------------------------------

double SsnrMetric(const AudioSignal &clean, const AudioSignal &est) {
  CheckPairs({clean}, {est});
  const int frame = static_cast<int>(std::lround(0.032 * clean.sample_rate));
  const int hop = static_cast<int>(std::lround(0.016 * clean.sample_rate));
  const AnalysisConfig config{frame, hop, WindowKind::kRectangular};
  const Eigen::MatrixXd s = FrameSignal(clean, config).data;
  AudioSignal residual = clean;
  residual.samples = clean.samples - est.samples;
  const Eigen::MatrixXd e = FrameSignal(residual, config).data;

  double sum = 0.0;
  int voiced = 0;
  for (Eigen::Index t = 0; t < s.cols(); ++t) {
    const double signal_energy = s.col(t).squaredNorm();
    if (signal_energy < kSilenceEnergy) continue;
    const double noise_energy = e.col(t).squaredNorm();
    const double snr = noise_energy == 0.0
                           ? kSsnrCeilDb
                           : 10.0 * std::log10(signal_energy / noise_energy);
    sum += std::clamp(snr, kSsnrFloorDb, kSsnrCeilDb);
    ++voiced;
  }
  if (voiced == 0) {
    Fail(ErrorCode::kDegenerateReference, "clean signal has no frames above the silence threshold");
  }
  return sum / voiced;
}

double SiSnrMetric(const AudioSignal &clean, const AudioSignal &est) {
  return -SiSnrLoss({clean}, {est}).value;
}

}  // namespace tcnse
