// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tcnse/losses.h"
#include "test_util.h"

namespace tcnse {
namespace {

using testing::CodeOf;
using testing::FiniteDifference;
using testing::FromValues;
using testing::Noise;

Representation Bin(std::complex<double> v) {
  Representation r;
  r.data.resize(2, 1);
  r.data << v.real(), v.imag();
  return r;
}

// Max abs deviation scaled by the largest finite-difference component.
double RelativeError(const Eigen::VectorXd &analytic, const Eigen::VectorXd &numeric) {
  return (analytic - numeric).cwiseAbs().maxCoeff() /
         std::max(numeric.cwiseAbs().maxCoeff(), 1e-300);
}

double CheckGradient(LossKind kind, const AudioSignal &clean, const AudioSignal &est,
                     const LossConfig &config) {
  const LogFilterbankExtractor extractor;
  auto f = [&](const Eigen::VectorXd &v) {
    AudioSignal e = est;
    e.samples = v;
    return ComputeLoss(kind, {clean}, {e}, config, extractor).value;
  };
  const Eigen::VectorXd g = LossGradient(kind, {clean}, {est}, config)[0];
  return RelativeError(g, FiniteDifference(f, est.samples, 1e-4));
}

TEST_CASE("si-snr hand example") {
  const LossReport r = SiSnrLoss({FromValues({1, 1, 0, 0})}, {FromValues({1, 0, 0, 0})});
  CHECK(r.alpha[0] == doctest::Approx(0.5));
  CHECK(r.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.status == LossStatus::kOk);
}

TEST_CASE("si-snr perfect estimate and degenerate reference") {
  const AudioSignal s = Noise(100, 1);
  AudioSignal twice = s;
  twice.samples *= 2.0;
  const LossReport r = SiSnrLoss({s}, {twice});
  CHECK(r.status == LossStatus::kPerfectEstimate);
  CHECK(r.value == -std::numeric_limits<double>::infinity());
  CHECK(SiSnrMetric(s, twice) == std::numeric_limits<double>::infinity());
  AudioSignal zero = s;
  zero.samples.setZero();
  CHECK(CodeOf([&] { SiSnrLoss({zero}, {s}); }) == ErrorCode::kDegenerateReference);
  CHECK(CodeOf([&] { SiSnrLoss({s}, {FromValues({1, 2})}); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("si-snr scale invariance and joint equivariance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AudioSignal s = Noise(500, seed);
    const AudioSignal e = Noise(500, seed + 100);
    const double base = SiSnrLoss({s}, {e}).value;
    for (double c : {0.1, 10.0, -3.0}) {
      AudioSignal ec = e;
      ec.samples *= c;
      CHECK(std::abs(SiSnrLoss({s}, {ec}).value - base) <= 1e-6);
      AudioSignal sc = s;
      sc.samples *= c;
      CHECK(std::abs(SiSnrLoss({sc}, {ec}).value - base) <= 1e-6);
    }
  }
}

TEST_CASE("snr hand examples") {
  CHECK(SnrLoss({FromValues({2, 0})}, {FromValues({1, 0})}).value ==
        doctest::Approx(-6.0206).epsilon(1e-5));
  const LossReport r = SnrLoss({FromValues({1, 0})}, {FromValues({2, 0})});
  CHECK(r.value == doctest::Approx(0.0));
  // The same pair is a perfect estimate up to scale.
  CHECK(SiSnrLoss({FromValues({1, 0})}, {FromValues({2, 0})}).status ==
        LossStatus::kPerfectEstimate);
  const AudioSignal s = Noise(64, 3);
  CHECK(SnrLoss({s}, {s}).status == LossStatus::kPerfectEstimate);
}

TEST_CASE("snr is not scale invariant") {
  const AudioSignal s = Noise(500, 4);
  const AudioSignal e = Noise(500, 5);
  AudioSignal big = e;
  big.samples *= 10.0;
  CHECK(std::abs(SnrLoss({s}, {big}).value - SnrLoss({s}, {e}).value) > 1.0);
}

TEST_CASE("losses average over sources and depend on their order") {
  const AudioSignal s1 = Noise(800, 6), s2 = Noise(800, 7);
  const AudioSignal e1 = Noise(800, 8), e2 = Noise(800, 9);
  LossConfig cfg;
  const LogFilterbankExtractor ex;
  for (LossKind k : {LossKind::kSiSnr, LossKind::kSnr, LossKind::kPcmse, LossKind::kPasemse}) {
    const LossReport both = ComputeLoss(k, {s1, s2}, {e1, e2}, cfg, ex);
    const double a = ComputeLoss(k, {s1}, {e1}, cfg, ex).value;
    const double b = ComputeLoss(k, {s2}, {e2}, cfg, ex).value;
    CHECK(both.value == doctest::Approx((a + b) / 2).epsilon(1e-12));
    CHECK(both.per_source.size() == 2);
    AudioSignal mixed = e1;
    mixed.samples = 0.8 * s1.samples + 0.2 * e1.samples;
    const double right = ComputeLoss(k, {s1, s2}, {mixed, e2}, cfg, ex).value;
    const double swapped = ComputeLoss(k, {s1, s2}, {e2, mixed}, cfg, ex).value;
    CHECK(right != swapped);
  }
}

TEST_CASE("pcmse bin examples") {
  LossConfig cfg;
  CHECK(PcmseFromSpectra(Bin({1, 0}), Bin({0, 0}), cfg) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(PcmseFromSpectra(Bin({-1, 0}), Bin({1, 0}), cfg) ==
        doctest::Approx(1.0 - std::cos(0.3 * std::numbers::pi)).epsilon(1e-12));
  CHECK(std::abs(PcmseFromSpectra(Bin({-1, 0}), Bin({1, 0}), cfg) - 0.41221) <= 1e-4);
  CHECK(PcmseFromSpectra(Bin({0.3, -2}), Bin({0.3, -2}), cfg) == 0.0);
  cfg.power_law = PowerLaw::kMagnitudeOnly;
  CHECK(PcmseFromSpectra(Bin({-1, 0}), Bin({1, 0}), cfg) == doctest::Approx(2.0));
  CHECK(PcmseFromSpectra(Bin({1, 0}), Bin({0, 0}), cfg) == doctest::Approx(1.0));
}

TEST_CASE("power compression") {
  const std::complex<double> w(-1.0, 0.0);
  const std::complex<double> principal = CompressPower(w, 0.3, PowerLaw::kComplexPower);
  CHECK(principal.real() == doctest::Approx(std::cos(0.3 * std::numbers::pi)));
  CHECK(principal.imag() == doctest::Approx(std::sin(0.3 * std::numbers::pi)));
  // -0 imaginary parts are treated as +0.
  const std::complex<double> neg_zero(-1.0, -0.0);
  CHECK(CompressPower(neg_zero, 0.3, PowerLaw::kComplexPower) == principal);
  const std::complex<double> mag = CompressPower({0.0, 8.0}, 1.0 / 3.0, PowerLaw::kMagnitudeOnly);
  CHECK(mag.real() == doctest::Approx(0.0));
  CHECK(mag.imag() == doctest::Approx(2.0));
  CHECK(CompressPower({0.0, 0.0}, 0.3, PowerLaw::kComplexPower) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("pcmse on signals") {
  LossConfig cfg;
  const AudioSignal s = Noise(3000, 10);
  CHECK(PcmseLoss({s}, {s}, cfg).value == 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(PcmseLoss({s}, {Noise(3000, seed + 20)}, cfg).value > 0.0);
  }
  // Re-analysis: the loss sees the waveform, not the caller's spectra.
  AudioSignal shifted = s;
  shifted.samples(1500) += 1e-3;
  CHECK(PcmseLoss({s}, {shifted}, cfg).value > 0.0);
  const double summed = PcmseLoss({s}, {Noise(3000, 30)}, cfg).value;
  cfg.per_bin_mean = true;
  const double mean = PcmseLoss({s}, {Noise(3000, 30)}, cfg).value;
  const double cells = 256.0 * static_cast<double>(NumFrames(3000, cfg.stft));
  CHECK(mean == doctest::Approx(summed / cells).epsilon(1e-12));
}

TEST_CASE("loss config validation and names") {
  LossConfig cfg;
  CHECK(cfg.beta == 0.5);
  CHECK(cfg.gamma == 0.25);
  cfg.beta = 1.5;
  CHECK(CodeOf([&] { cfg.Validate(); }) == ErrorCode::kInvalidConfig);
  cfg.beta = 0.5;
  cfg.gamma = -1;
  CHECK(CodeOf([&] { cfg.Validate(); }) == ErrorCode::kInvalidConfig);
  for (LossKind k : {LossKind::kSiSnr, LossKind::kSnr, LossKind::kPcmse, LossKind::kPasemse}) {
    CHECK(ParseLossKind(LossKindName(k)) == k);
  }
  CHECK(CodeOf([] { ParseLossKind("mse"); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("feature-matching composite") {
  const LogFilterbankExtractor ex;
  LossConfig cfg;
  const AudioSignal s = Noise(8000, 40);
  const AudioSignal e = Noise(8000, 41);
  CHECK(PasemseLoss({s}, {s}, cfg, ex).value == 0.0);
  const double composed = 0.25 * PaseFeatureMse({s}, {e}, ex) + PcmseLoss({s}, {e}, cfg).value;
  CHECK(std::abs(PasemseLoss({s}, {e}, cfg, ex).value - composed) <= 1e-12 * std::abs(composed));
  cfg.gamma = 0.0;
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index len = 400 + static_cast<Eigen::Index>(rng() % 2000);
    const AudioSignal a = Noise(len, rng());
    const AudioSignal b = Noise(len, rng());
    CHECK(std::abs(PasemseLoss({a}, {b}, cfg, ex).value - PcmseLoss({a}, {b}, cfg).value) <= 1e-12);
  }
}

TEST_CASE("log filterbank stand-in shape") {
  const LogFilterbankExtractor ex;
  const FeatureMatrix f = ex.Extract(Noise(16000, 1));
  CHECK(f.data.rows() == 40);
  // 400-sample frames, 160-sample hop over one second, last frame padded
  CHECK(f.data.cols() == (16000 - 400 + 159) / 160 + 1);
  CHECK(f.data.allFinite());
  AudioSignal zero;
  zero.samples = Eigen::VectorXd::Zero(16000);
  CHECK(ex.Extract(zero).data.maxCoeff() == doctest::Approx(std::log(1e-8)));
}

class ContentDependentExtractor : public FeatureExtractor {
 public:
  FeatureMatrix Extract(const AudioSignal &signal) const override {
    return {Eigen::MatrixXd::Zero(3, signal.samples(0) > 0 ? 4 : 5)};
  }
  std::string name() const override { return "content-dependent"; }
};

TEST_CASE("inconsistent extractor") {
  const ContentDependentExtractor ex;
  const AudioSignal a = FromValues({1, 2, 3});
  const AudioSignal b = FromValues({-1, 2, 3});
  CHECK(CodeOf([&] { PaseFeatureMse({a}, {b}, ex); }) == ErrorCode::kExtractorInconsistent);
}

TEST_CASE("gradients match central differences") {
  LossConfig cfg;
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const AudioSignal s = Noise(256, rng());
    const AudioSignal e = Noise(256, rng());
    for (LossKind k : {LossKind::kSiSnr, LossKind::kSnr, LossKind::kPcmse}) {
      CAPTURE(trial);
      CHECK(CheckGradient(k, s, e, cfg) <= 1e-4);
    }
  }
}

TEST_CASE("pcmse gradient with options") {
  LossConfig cfg;
  cfg.per_bin_mean = true;
  cfg.beta = 0.2;
  const AudioSignal s = Noise(300, 1);
  const AudioSignal e = Noise(300, 2);
  CHECK(CheckGradient(LossKind::kPcmse, s, e, cfg) <= 1e-4);
  cfg.power_law = PowerLaw::kMagnitudeOnly;
  CHECK(CheckGradient(LossKind::kPcmse, s, e, cfg) <= 1e-4);
  cfg.stft.window = WindowKind::kRectangular;
  CHECK(CheckGradient(LossKind::kPcmse, s, e, cfg) <= 1e-4);
}

TEST_CASE("multi-source gradients carry the 1/K factor") {
  LossConfig cfg;
  const AudioSignal s1 = Noise(256, 1), s2 = Noise(256, 2);
  const AudioSignal e1 = Noise(256, 3), e2 = Noise(256, 4);
  for (LossKind k : {LossKind::kSiSnr, LossKind::kSnr, LossKind::kPcmse}) {
    const auto both = LossGradient(k, {s1, s2}, {e1, e2}, cfg);
    const auto one = LossGradient(k, {s1}, {e1}, cfg);
    CHECK((both[0] - 0.5 * one[0]).cwiseAbs().maxCoeff() <= 1e-12 * one[0].cwiseAbs().maxCoeff());
  }
}

TEST_CASE("gradient special points") {
  LossConfig cfg;
  const AudioSignal s = Noise(256, 50);
  const auto g = LossGradient(LossKind::kPcmse, {s}, {s}, cfg)[0];
  CHECK(g.cwiseAbs().maxCoeff() <= 1e-10);

  const AudioSignal e = Noise(256, 51);
  const Eigen::VectorXd gs = LossGradient(LossKind::kSiSnr, {s}, {e}, cfg)[0];
  CHECK(std::abs(gs.dot(e.samples)) <= 1e-8 * gs.norm() * e.samples.norm());

  CHECK(CodeOf([&] { LossGradient(LossKind::kSnr, {s}, {s}, cfg); }) ==
        ErrorCode::kGradientUndefined);
  AudioSignal scaled = s;
  scaled.samples *= 3.0;
  CHECK(CodeOf([&] { LossGradient(LossKind::kSiSnr, {s}, {scaled}, cfg); }) ==
        ErrorCode::kGradientUndefined);
  CHECK(CodeOf([&] { LossGradient(LossKind::kPasemse, {s}, {e}, cfg); }) ==
        ErrorCode::kGradientUndefined);
  cfg.magnitude_floor = 0.0;
  CHECK(CodeOf([&] { LossGradient(LossKind::kPcmse, {s}, {e}, cfg); }) ==
        ErrorCode::kGradientUndefined);
}

TEST_CASE("segmental snr") {
  const AudioSignal s = Noise(16000, 60);
  CHECK(SsnrMetric(s, s) == doctest::Approx(kSsnrCeilDb));
  // Noise with the same energy as the clean signal in every frame: flip the
  // sign of random samples of s.
  std::mt19937_64 rng(61);
  AudioSignal est = s;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    est.samples(i) += (rng() & 1) ? s.samples(i) : -s.samples(i);
  }
  CHECK(SsnrMetric(s, est) == doctest::Approx(0.0).epsilon(1e-12));
  AudioSignal bad = s;
  bad.samples *= -1.0;  // error = 2s, about -6 dB per frame
  CHECK(SsnrMetric(s, bad) == doctest::Approx(-10.0 * std::log10(4.0)));
  AudioSignal awful = s;
  awful.samples *= -100.0;
  CHECK(SsnrMetric(s, awful) == doctest::Approx(kSsnrFloorDb));
  AudioSignal silent;
  silent.samples = Eigen::VectorXd::Zero(16000);
  CHECK(CodeOf([&] { SsnrMetric(silent, s); }) == ErrorCode::kDegenerateReference);
}

TEST_CASE("segmental snr skips silent frames") {
  AudioSignal s = Noise(16000, 70);
  s.samples.head(8000).setZero();
  AudioSignal est = s;
  est.samples.head(8000).setConstant(0.5);  // errors only inside silent frames
  est.samples.tail(8000) *= 0.5;            // about 6 dB in active frames
  // Frames straddling the boundary have both, so check bounds loosely.
  const double v = SsnrMetric(s, est);
  CHECK(v > 0.0);
  CHECK(v < 10.0 * std::log10(4.0) + 1e-9);
}

TEST_CASE("si-snr metric is the negated loss") {
  const AudioSignal s = Noise(1000, 80);
  const AudioSignal e = Noise(1000, 81);
  CHECK(SiSnrMetric(s, e) == -SiSnrLoss({s}, {e}).value);
}

}  // namespace
}  // namespace tcnse
