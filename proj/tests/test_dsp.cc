// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "tcnse/dsp.h"
#include "test_util.h"

namespace tcnse {
namespace {

using testing::CodeOf;
using testing::DirectDft;
using testing::Noise;

const AnalysisConfig kConvTasNetFraming{32, 16, WindowKind::kHann};
const AnalysisConfig kStftFraming{192, 64, WindowKind::kHann};

TEST_CASE("framing 64 samples with a rectangular window") {
  AudioSignal x;
  x.samples = Eigen::VectorXd::LinSpaced(64, 0.0, 63.0) / 64.0;
  const FrameMatrix f = FrameSignal(x, {32, 16, WindowKind::kRectangular});
  REQUIRE(f.num_frames() == 3);
  CHECK(f.data.rows() == 32);
  CHECK(f.data.col(2) == x.samples.segment(32, 32));
  CHECK(f.data.col(1) == x.samples.segment(16, 32));
}

TEST_CASE("short signal is zero padded into one frame") {
  const AudioSignal x = Noise(100, 3);
  const FrameMatrix f = FrameSignal(x, {192, 64, WindowKind::kRectangular});
  REQUIRE(f.num_frames() == 1);
  CHECK(f.data.col(0).head(100) == x.samples);
  CHECK(f.data.col(0).tail(92).isZero(0.0));
}

TEST_CASE("zero signal frames to zeros") {
  AudioSignal x;
  x.samples = Eigen::VectorXd::Zero(16000);
  CHECK(FrameSignal(x, kConvTasNetFraming).data.isZero(0.0));
  CHECK(FrameSignal(x, kStftFraming).data.isZero(0.0));
}

TEST_CASE("frame count follows the padding rule") {
  for (const AnalysisConfig &c : {kConvTasNetFraming, kStftFraming}) {
    for (Eigen::Index len = 1; len < 1000; len += 7) {
      Eigen::Index expected = 1;
      if (len > c.frame_length) {
        expected = (len - c.frame_length + c.hop - 1) / c.hop + 1;
      }
      CHECK(NumFrames(len, c) == expected);
      // The last frame reaches the end of the signal.
      CHECK((expected - 1) * c.hop + c.frame_length >= len);
    }
  }
}

TEST_CASE("framing rejects empty and non-finite input") {
  AudioSignal empty;
  CHECK(CodeOf([&] { FrameSignal(empty, kConvTasNetFraming); }) == ErrorCode::kEmptyInput);
  AudioSignal bad = Noise(64, 1);
  bad.samples(10) = std::numeric_limits<double>::quiet_NaN();
  CHECK(CodeOf([&] { FrameSignal(bad, kConvTasNetFraming); }) == ErrorCode::kNonFiniteInput);
  bad.samples(10) = std::numeric_limits<double>::infinity();
  CHECK(CodeOf([&] { FrameSignal(bad, kConvTasNetFraming); }) == ErrorCode::kNonFiniteInput);
}

TEST_CASE("invalid analysis configs") {
  CHECK(CodeOf([] { AnalysisConfig{32, 0, WindowKind::kHann}.Validate(); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(CodeOf([] { AnalysisConfig{32, 33, WindowKind::kHann}.Validate(); }) ==
        ErrorCode::kInvalidConfig);
}

TEST_CASE("hann window overlap-adds to a constant at both hops") {
  for (auto [l, hop, expected] : {std::tuple{32, 16, 1.0}, std::tuple{192, 64, 1.5}}) {
    const Eigen::VectorXd w = MakeWindow(l, WindowKind::kHann);
    CHECK(w.minCoeff() > 0.0);
    for (int n = 0; n < hop; ++n) {
      double sum = 0.0;
      for (int j = n; j < l; j += hop) sum += w(j);
      CHECK(sum == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("overlap-add inverts framing") {
  for (const AnalysisConfig &c :
       {kConvTasNetFraming, kStftFraming, AnalysisConfig{32, 16, WindowKind::kRectangular},
        AnalysisConfig{192, 64, WindowKind::kRectangular}}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const AudioSignal x = Noise(16000 + 37 * seed, seed);
      const AudioSignal y = OverlapAdd(FrameSignal(x, c), x.sample_rate);
      REQUIRE(y.size() == x.size());
      CHECK((y.samples - x.samples).cwiseAbs().maxCoeff() <=
            1e-6 * x.samples.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("impulse survives the round trip") {
  AudioSignal x;
  x.samples = Eigen::VectorXd::Zero(400);
  x.samples(40) = 1.0;
  for (const AnalysisConfig &c : {kConvTasNetFraming, kStftFraming}) {
    const AudioSignal y = OverlapAdd(FrameSignal(x, c), 16000);
    CHECK(y.samples(40) == doctest::Approx(1.0).epsilon(1e-9));
    Eigen::VectorXd rest = y.samples;
    rest(40) = 0.0;
    CHECK(rest.cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("first sample is recoverable without leading padding") {
  AudioSignal x;
  x.samples = Eigen::VectorXd::Zero(256);
  x.samples(0) = 0.75;
  const AudioSignal y = OverlapAdd(FrameSignal(x, kStftFraming), 16000);
  CHECK(y.samples(0) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("overlap-add of zero frames and untrimmed length") {
  FrameMatrix f;
  f.config = kConvTasNetFraming;
  f.data = Eigen::MatrixXd::Zero(32, 5);
  const AudioSignal y = OverlapAdd(f, 16000);
  CHECK(y.size() == 4 * 16 + 32);
  CHECK(y.samples.isZero(0.0));
  f.data.resize(31, 5);
  CHECK(CodeOf([&] { OverlapAdd(f, 16000); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("basis rejects odd and undersized representations") {
  CHECK(CodeOf([] { MakeStftBasis(kConvTasNetFraming, 511); }) == ErrorCode::kInvalidBasisSize);
  CHECK(CodeOf([] { MakeStftBasis(kStftFraming, 256); }) == ErrorCode::kInvalidBasisSize);
  CHECK_NOTHROW(MakeStftBasis(kStftFraming, 384));
}

TEST_CASE("basis layout and shapes") {
  const BasisPair b = MakeStftBasis(kStftFraming, 512);
  CHECK(b.analysis.rows() == 512);
  CHECK(b.analysis.cols() == 192);
  CHECK(b.synthesis.rows() == 192);
  CHECK(b.synthesis.cols() == 512);
  CHECK(b.dft_size() == 256);
  // Bin 0 imaginary row is identically zero, bin 0 real row all ones.
  CHECK(b.analysis.row(256).isZero(0.0));
  CHECK(b.analysis.row(0).isOnes(0.0));
}

TEST_CASE("constant frame lands in the DC real row only") {
  const BasisPair b = MakeStftBasis({64, 32, WindowKind::kRectangular}, 128);
  const Eigen::VectorXd spec = b.analysis * Eigen::VectorXd::Ones(64);
  CHECK(spec(0) == doctest::Approx(64.0));
  Eigen::VectorXd rest = spec;
  rest(0) = 0.0;
  CHECK(rest.cwiseAbs().maxCoeff() <= 1e-9 * 64.0);
}

TEST_CASE("cosine at an exact bin") {
  const int m = 64;
  const BasisPair b = MakeStftBasis({m, m / 2, WindowKind::kRectangular}, 2 * m);
  for (int k : {1, 5, 17, 31}) {
    Eigen::VectorXd frame(m);
    for (int n = 0; n < m; ++n) frame(n) = std::cos(2.0 * std::numbers::pi * k * n / m);
    const Eigen::VectorXd spec = b.analysis * frame;
    CHECK(spec(k) == doctest::Approx(m / 2.0).epsilon(1e-9));
    CHECK(std::abs(spec(m + k)) <= 1e-6 * m / 2.0);
    CHECK((spec - DirectDft(frame, m)).cwiseAbs().maxCoeff() <= 1e-9 * m);
  }
}

TEST_CASE("analysis matches a direct zero-padded DFT") {
  const BasisPair b = MakeStftBasis(kStftFraming, 512);
  const Eigen::VectorXd frame = Noise(192, 11).samples;
  const Eigen::VectorXd spec = b.analysis * frame;
  const Eigen::VectorXd oracle = DirectDft(frame, 256);
  CHECK((spec - oracle).cwiseAbs().maxCoeff() <= 1e-9 * oracle.cwiseAbs().maxCoeff());
}

TEST_CASE("synthesis inverts analysis") {
  for (const AnalysisConfig &c : {kConvTasNetFraming, kStftFraming}) {
    const BasisPair b = MakeStftBasis(c, 512);
    const Eigen::MatrixXd eye = b.synthesis * b.analysis;
    CHECK((eye - Eigen::MatrixXd::Identity(c.frame_length, c.frame_length))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const AudioSignal x = Noise(16000, 100 + seed);
      FrameMatrix f = FrameSignal(x, c);
      f.data = b.synthesis * (b.analysis * f.data);
      const AudioSignal y = OverlapAdd(f, x.sample_rate);
      CHECK((y.samples - x.samples).cwiseAbs().maxCoeff() <=
            1e-6 * x.samples.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("parseval for a rectangular window at hop L") {
  const int l = 128;
  const AnalysisConfig c{l, l, WindowKind::kRectangular};
  const BasisPair b = MakeStftBasis(c, 2 * l);
  const AudioSignal x = Noise(l * 10, 5);
  const FrameMatrix f = FrameSignal(x, c);
  const Eigen::MatrixXd w = b.analysis * f.data;
  // Two-sided M-point DFT: sum |X_k|^2 = M sum x^2.
  CHECK(w.squaredNorm() == doctest::Approx(l * f.data.squaredNorm()).epsilon(1e-6));
}

TEST_CASE("amplitude and phase examples") {
  Representation spec;
  spec.data.resize(6, 1);
  spec.data << 3.0, 0.0, -1.0, 4.0, 0.0, 0.0;
  const Representation ap = ToAmpPhase(spec);
  CHECK(ap.layout == Layout::kAmpPhase);
  CHECK(ap.data(0, 0) == doctest::Approx(5.0));
  CHECK(ap.data(3, 0) == doctest::Approx(0.92730).epsilon(1e-5));
  CHECK(ap.data(1, 0) == 0.0);
  CHECK(ap.data(4, 0) == 0.0);
  CHECK(ap.data(2, 0) == doctest::Approx(1.0));
  CHECK(ap.data(5, 0) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("negative zero imaginary part keeps phase pi") {
  Representation spec;
  spec.data.resize(2, 1);
  spec.data << -1.0, -0.0;
  CHECK(ToAmpPhase(spec).data(1, 0) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("amplitude-phase round trip and layout checks") {
  const BasisPair b = MakeStftBasis(kStftFraming, 512);
  const AudioSignal x = Noise(4000, 9);
  Representation spec{b.analysis * FrameSignal(x, kStftFraming).data, Layout::kRealImag};
  const Representation ap = ToAmpPhase(spec);
  CHECK(ap.data.topRows(256).minCoeff() >= 0.0);
  const Representation back = FromAmpPhase(ap);
  CHECK((back.data - spec.data).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(CodeOf([&] { ToAmpPhase(ap); }) == ErrorCode::kLayoutMismatch);
  CHECK(CodeOf([&] { FromAmpPhase(spec); }) == ErrorCode::kLayoutMismatch);
}

}  // namespace
}  // namespace tcnse
