// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "tcnse/dsp.h"
#include "tcnse/error.h"
#include "tcnse/features.h"
#include "tcnse/io.h"
#include "tcnse/losses.h"
#include "tcnse/model.h"
#include "tcnse/streaming.h"

namespace py = pybind11;

namespace tcnse {
namespace {

AudioSignal ToSignal(const Eigen::VectorXd &samples, int sample_rate) {
  AudioSignal s;
  s.samples = samples;
  s.sample_rate = sample_rate;
  return s;
}

std::vector<AudioSignal> ToSignals(const std::vector<Eigen::VectorXd> &v, int sample_rate) {
  std::vector<AudioSignal> out;
  for (const Eigen::VectorXd &x : v) out.push_back(ToSignal(x, sample_rate));
  return out;
}

std::vector<Eigen::VectorXd> ToArrays(const std::vector<AudioSignal> &v) {
  std::vector<Eigen::VectorXd> out;
  for (const AudioSignal &s : v) out.push_back(s.samples);
  return out;
}

py::dict ReportDict(const LossReport &r) {
  py::dict d;
  d["value"] = r.value;
  d["per_source"] = r.per_source;
  d["alpha"] = r.alpha;
  d["status"] = r.status == LossStatus::kPerfectEstimate ? "PerfectEstimate" : "Ok";
  return d;
}

AnalysisConfig MakeAnalysis(int frame_length, int hop, const std::string &window) {
  if (window != "hann" && window != "rectangular") {
    Fail(ErrorCode::kInvalidConfig, "window must be 'hann' or 'rectangular'");
  }
  return {frame_length, hop, window == "hann" ? WindowKind::kHann : WindowKind::kRectangular};
}

}  // namespace
}  // namespace tcnse

PYBIND11_MODULE(_core, m) {
  using namespace tcnse;
  m.doc() = "Streaming TCN speech enhancement core";

  // RuntimeError subclass with a `code` attribute holding the error name.
  static PyObject *error_type =
      PyErr_NewException("tcnse._core.TcnseError", PyExc_RuntimeError, nullptr);
  m.add_object("TcnseError", py::handle(error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("code") = std::string(ErrorCodeName(e.code()));
      PyErr_SetObject(error_type, inst.ptr());
    }
  });

  py::enum_<EncoderKind>(m, "EncoderKind")
      .value("LEARNED", EncoderKind::kLearned)
      .value("STFT", EncoderKind::kStft);
  py::enum_<InputLayout>(m, "InputLayout")
      .value("REAL_IMAG", InputLayout::kRealImag)
      .value("AMP_PHASE", InputLayout::kAmpPhase);
  py::enum_<MaskActivation>(m, "MaskActivation")
      .value("SIGMOID", MaskActivation::kSigmoid)
      .value("IDENTITY", MaskActivation::kIdentity);
  py::enum_<PowerLaw>(m, "PowerLaw")
      .value("COMPLEX_POWER", PowerLaw::kComplexPower)
      .value("MAGNITUDE_ONLY", PowerLaw::kMagnitudeOnly);

  py::class_<TcnConfig>(m, "TcnConfig")
      .def(py::init<>())
      .def_readwrite("bottleneck_channels", &TcnConfig::bottleneck_channels)
      .def_readwrite("conv_channels", &TcnConfig::conv_channels)
      .def_readwrite("kernel_size", &TcnConfig::kernel_size)
      .def_readwrite("blocks_per_repeat", &TcnConfig::blocks_per_repeat)
      .def_readwrite("repeats", &TcnConfig::repeats)
      .def_readwrite("skip_channels", &TcnConfig::skip_channels)
      .def_readwrite("noncausal_layers", &TcnConfig::noncausal_layers)
      .def_readwrite("mask_activation", &TcnConfig::mask_activation)
      .def_readwrite("num_sources", &TcnConfig::num_sources);

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_static("conv_tasnet", &ModelConfig::ConvTasNet, py::arg("noncausal_layers") = 5)
      .def_static("stft_tcn", &ModelConfig::StftTcn, py::arg("noncausal_layers") = 3)
      .def_readwrite("encoder", &ModelConfig::encoder)
      .def_readwrite("frame_length", &ModelConfig::frame_length)
      .def_readwrite("representation_size", &ModelConfig::representation_size)
      .def_readwrite("input_layout", &ModelConfig::input_layout)
      .def_readwrite("sample_rate", &ModelConfig::sample_rate)
      .def_readwrite("tcn", &ModelConfig::tcn)
      .def_property_readonly("hop", &ModelConfig::hop)
      .def_property_readonly("num_sources", &ModelConfig::num_sources)
      .def("validate", &ModelConfig::Validate);

  py::class_<LossConfig>(m, "LossConfig")
      .def(py::init<>())
      .def_readwrite("beta", &LossConfig::beta)
      .def_readwrite("gamma", &LossConfig::gamma)
      .def_readwrite("exponent", &LossConfig::exponent)
      .def_readwrite("representation_size", &LossConfig::representation_size)
      .def_readwrite("magnitude_floor", &LossConfig::magnitude_floor)
      .def_readwrite("per_bin_mean", &LossConfig::per_bin_mean)
      .def_readwrite("power_law", &LossConfig::power_law);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("model", &RunConfig::model)
      .def_readwrite("loss", &RunConfig::loss)
      .def_readwrite("seed", &RunConfig::seed)
      .def("to_json", &RunConfigToJson);
  m.def("parse_run_config", &ParseRunConfig, py::arg("text"));
  m.def("load_run_config", &LoadRunConfig, py::arg("path"));

  py::class_<ModelWeights>(m, "ModelWeights")
      .def_property_readonly("num_parameters", &ModelWeights::NumParameters)
      .def("names", [](const ModelWeights &w) {
        std::vector<std::string> names;
        for (const Tensor &t : w.tensors()) names.push_back(t.name);
        return names;
      });
  m.def("init_random", &InitRandom, py::arg("config"), py::arg("seed"));
  m.def("save_weights", &SaveWeights, py::arg("path"), py::arg("weights"));
  m.def("load_weights", py::overload_cast<const std::string &, const ModelConfig &>(&LoadWeights),
        py::arg("path"), py::arg("config"));
  m.def("param_count", &ParamCount, py::arg("config"));

  py::class_<Model, std::shared_ptr<Model>>(m, "Model")
      .def(py::init<ModelConfig, const ModelWeights &>(), py::arg("config"), py::arg("weights"))
      .def_property_readonly("config", &Model::config)
      .def(
          "encode",
          [](const Model &self, const Eigen::VectorXd &x) {
            const Encoded e = self.Encode(ToSignal(x, self.config().sample_rate));
            return py::make_tuple(e.spec.data, e.input.data);
          },
          py::arg("samples"))
      .def(
          "masks",
          [](const Model &self, const Eigen::VectorXd &x) {
            const Encoded e = self.Encode(ToSignal(x, self.config().sample_rate));
            return self.tcn().Forward(e.input.data).masks;
          },
          py::arg("samples"))
      .def(
          "enhance",
          [](const Model &self, const Eigen::VectorXd &x) {
            py::gil_scoped_release release;
            return ToArrays(self.EnhanceOffline(ToSignal(x, self.config().sample_rate)));
          },
          py::arg("samples"));

  py::class_<StreamState>(m, "StreamState")
      .def(py::init([](std::shared_ptr<Model> model) {
             return std::make_unique<StreamState>(std::shared_ptr<const Model>(model));
           }),
           py::arg("model"))
      .def_property_readonly("hop", &StreamState::hop)
      .def_property_readonly("emission_delay", &StreamState::emission_delay)
      .def_property_readonly("declared_future_reach", &StreamState::declared_future_reach)
      .def(
          "push",
          [](StreamState &self, const Eigen::VectorXd &hop) {
            return self.Push({hop.data(), static_cast<std::size_t>(hop.size())});
          },
          py::arg("hop_samples"))
      .def("flush", &StreamState::Flush);

  m.def(
      "analyze_latency",
      [](const ModelConfig &c) {
        const LatencyReport r = AnalyzeLatency(c);
        py::dict d;
        d["future_frames"] = r.future_frames;
        d["conv_frames"] = r.conv_frames;
        d["framing_frames"] = r.framing_frames;
        d["framing_convention"] = r.framing_convention;
        d["hop_ms"] = r.hop_ms;
        d["lookahead_ms"] = r.lookahead_ms;
        d["dependence_samples"] = r.dependence_samples;
        d["emission_delay_frames"] = r.emission_delay_frames;
        return d;
      },
      py::arg("config"));
  m.def(
      "probe_causality",
      [](const Model &model) {
        const ProbeResult r = ProbeCausality(model);
        py::dict d;
        d["measured_frames"] = r.measured_frames;
        d["conv_frames"] = r.conv_frames;
        d["dependence_samples"] = r.dependence_samples;
        return d;
      },
      py::arg("model"));

  m.def(
      "frame_signal",
      [](const Eigen::VectorXd &x, int frame_length, int hop, const std::string &window) {
        return FrameSignal(ToSignal(x, 16000), MakeAnalysis(frame_length, hop, window)).data;
      },
      py::arg("samples"), py::arg("frame_length"), py::arg("hop"), py::arg("window") = "hann");
  m.def(
      "overlap_add",
      [](const Eigen::MatrixXd &frames, int hop, Eigen::Index length, const std::string &window) {
        FrameMatrix f{frames, MakeAnalysis(static_cast<int>(frames.rows()), hop, window), length};
        return OverlapAdd(f, 16000).samples;
      },
      py::arg("frames"), py::arg("hop"), py::arg("length") = 0, py::arg("window") = "hann");
  m.def(
      "stft_basis",
      [](int frame_length, int hop, int representation_size) {
        const BasisPair b = MakeStftBasis({frame_length, hop, WindowKind::kHann}, representation_size);
        return py::make_tuple(b.analysis, b.synthesis);
      },
      py::arg("frame_length"), py::arg("hop"), py::arg("representation_size"));

  auto loss = [](LossKind kind) {
    return [kind](const std::vector<Eigen::VectorXd> &clean, const std::vector<Eigen::VectorXd> &est,
                  const LossConfig &config) {
      const LogFilterbankExtractor extractor;
      return ReportDict(
          ComputeLoss(kind, ToSignals(clean, 16000), ToSignals(est, 16000), config, extractor));
    };
  };
  for (LossKind kind : {LossKind::kSiSnr, LossKind::kSnr, LossKind::kPcmse, LossKind::kPasemse}) {
    m.def((LossKindName(kind) + "_loss").c_str(), loss(kind), py::arg("clean"), py::arg("est"),
          py::arg("config") = LossConfig());
  }
  m.def(
      "loss_gradient",
      [](const std::string &kind, const std::vector<Eigen::VectorXd> &clean,
         const std::vector<Eigen::VectorXd> &est, const LossConfig &config) {
        return LossGradient(ParseLossKind(kind), ToSignals(clean, 16000), ToSignals(est, 16000),
                            config);
      },
      py::arg("kind"), py::arg("clean"), py::arg("est"), py::arg("config") = LossConfig());
  m.def(
      "ssnr",
      [](const Eigen::VectorXd &clean, const Eigen::VectorXd &est, int sample_rate) {
        return SsnrMetric(ToSignal(clean, sample_rate), ToSignal(est, sample_rate));
      },
      py::arg("clean"), py::arg("est"), py::arg("sample_rate") = 16000);
  m.def(
      "si_snr",
      [](const Eigen::VectorXd &clean, const Eigen::VectorXd &est) {
        return SiSnrMetric(ToSignal(clean, 16000), ToSignal(est, 16000));
      },
      py::arg("clean"), py::arg("est"));

  m.def(
      "read_wav",
      [](const std::string &path) {
        const AudioSignal s = ReadWav(path);
        return py::make_tuple(s.samples, s.sample_rate);
      },
      py::arg("path"));
  m.def(
      "write_wav",
      [](const std::string &path, const Eigen::VectorXd &samples, int sample_rate) {
        return WriteWav(path, ToSignal(samples, sample_rate));
      },
      py::arg("path"), py::arg("samples"), py::arg("sample_rate") = 16000);
}
