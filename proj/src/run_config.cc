// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

#include "tcnse/error.h"
#include "tcnse/io.h"

namespace tcnse {

namespace {

using nlohmann::json;
using Handlers = std::map<std::string, std::function<void(const json &)>>;

void Walk(const json &obj, const std::string &where, const Handlers &handlers) {
  if (!obj.is_object()) {
    Fail(ErrorCode::kInvalidConfig, where + " must be an object");
  }
  for (const auto &[key, value] : obj.items()) {
    auto it = handlers.find(key);
    if (it == handlers.end()) {
      Fail(ErrorCode::kUnknownConfigKey, "unknown key " + where + "." + key);
    }
    try {
      it->second(value);
    } catch (const json::exception &e) {
      Fail(ErrorCode::kInvalidConfig, where + "." + key + ": " + e.what());
    }
  }
}

template <typename Enum>
Enum ParseEnum(const json &v, const std::map<std::string, Enum> &names,
               const std::string &key) {
  const std::string s = v.get<std::string>();
  auto it = names.find(s);
  if (it == names.end()) {
    Fail(ErrorCode::kInvalidConfig, "bad value '" + s + "' for " + key);
  }
  return it->second;
}

template <typename Enum>
std::string EnumName(Enum e, const std::map<std::string, Enum> &names) {
  for (const auto &[name, value] : names) {
    if (value == e) return name;
  }
  return "?";
}

const std::map<std::string, EncoderKind> kEncoders = {
    {"learned", EncoderKind::kLearned}, {"stft", EncoderKind::kStft}};
const std::map<std::string, InputLayout> kLayouts = {
    {"real-imag", InputLayout::kRealImag}, {"amp-phase", InputLayout::kAmpPhase}};
const std::map<std::string, WindowKind> kWindows = {
    {"hann", WindowKind::kHann}, {"rectangular", WindowKind::kRectangular}};
const std::map<std::string, MaskActivation> kActivations = {
    {"sigmoid", MaskActivation::kSigmoid}, {"identity", MaskActivation::kIdentity}};
const std::map<std::string, PowerLaw> kPowerLaws = {
    {"complex", PowerLaw::kComplexPower}, {"magnitude", PowerLaw::kMagnitudeOnly}};

OverlapRatio ParseOverlap(const json &v) {
  const std::string s = v.get<std::string>();
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    Fail(ErrorCode::kInvalidConfig, "overlap must look like \"1/2\", got " + s);
  }
  OverlapRatio r;
  try {
    r.num = std::stoi(s.substr(0, slash));
    r.den = std::stoi(s.substr(slash + 1));
  } catch (const std::exception &) {
    Fail(ErrorCode::kInvalidConfig, "overlap must look like \"1/2\", got " + s);
  }
  if (r.num < 0 || r.den <= 0 || r.num >= r.den || r.den % (r.den - r.num) != 0) {
    Fail(ErrorCode::kInvalidConfig, "unsupported overlap " + s);
  }
  return r;
}

void ParseTcn(const json &obj, TcnConfig &t) {
  Walk(obj, "model.tcn",
       {{"bottleneck_channels", [&](const json &v) { t.bottleneck_channels = v.get<int>(); }},
        {"conv_channels", [&](const json &v) { t.conv_channels = v.get<int>(); }},
        {"kernel_size", [&](const json &v) { t.kernel_size = v.get<int>(); }},
        {"blocks_per_repeat", [&](const json &v) { t.blocks_per_repeat = v.get<int>(); }},
        {"repeats", [&](const json &v) { t.repeats = v.get<int>(); }},
        {"skip_channels", [&](const json &v) { t.skip_channels = v.get<int>(); }},
        {"noncausal_layers", [&](const json &v) { t.noncausal_layers = v.get<int>(); }},
        {"mask_activation",
         [&](const json &v) { t.mask_activation = ParseEnum(v, kActivations, "mask_activation"); }},
        {"num_sources", [&](const json &v) { t.num_sources = v.get<int>(); }}});
}

void ParseModel(const json &obj, ModelConfig &m) {
  Walk(obj, "model",
       {{"encoder", [&](const json &v) { m.encoder = ParseEnum(v, kEncoders, "encoder"); }},
        {"frame_length", [&](const json &v) { m.frame_length = v.get<int>(); }},
        {"representation_size", [&](const json &v) { m.representation_size = v.get<int>(); }},
        {"overlap", [&](const json &v) { m.overlap = ParseOverlap(v); }},
        {"input_layout", [&](const json &v) { m.input_layout = ParseEnum(v, kLayouts, "input_layout"); }},
        {"window", [&](const json &v) { m.window = ParseEnum(v, kWindows, "window"); }},
        {"sample_rate", [&](const json &v) { m.sample_rate = v.get<int>(); }},
        {"tcn", [&](const json &v) { ParseTcn(v, m.tcn); }}});
}

void ParseLoss(const json &obj, LossConfig &l) {
  Walk(obj, "loss",
       {{"beta", [&](const json &v) { l.beta = v.get<double>(); }},
        {"gamma", [&](const json &v) { l.gamma = v.get<double>(); }},
        {"exponent", [&](const json &v) { l.exponent = v.get<double>(); }},
        {"frame_length", [&](const json &v) { l.stft.frame_length = v.get<int>(); }},
        {"hop", [&](const json &v) { l.stft.hop = v.get<int>(); }},
        {"window", [&](const json &v) { l.stft.window = ParseEnum(v, kWindows, "loss.window"); }},
        {"representation_size", [&](const json &v) { l.representation_size = v.get<int>(); }},
        {"magnitude_floor", [&](const json &v) { l.magnitude_floor = v.get<double>(); }},
        {"per_bin_mean", [&](const json &v) { l.per_bin_mean = v.get<bool>(); }},
        {"power_law", [&](const json &v) { l.power_law = ParseEnum(v, kPowerLaws, "power_law"); }}});
}

}  // namespace

RunConfig ParseRunConfig(const std::string &text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception &e) {
    Fail(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) Fail(ErrorCode::kInvalidConfig, "config must be a JSON object");

  RunConfig rc;
  if (doc.contains("preset")) {
    const json &p = doc["preset"];
    const std::string name = p.is_string() ? p.get<std::string>() : "";
    if (name == "conv-tasnet") {
      rc.model = ModelConfig::ConvTasNet();
    } else if (name == "stft-tcn") {
      rc.model = ModelConfig::StftTcn();
    } else {
      Fail(ErrorCode::kInvalidConfig, "unknown preset '" + name + "'");
    }
  }
  Walk(doc, "config",
       {{"preset", [](const json &) {}},
        {"model", [&](const json &v) { ParseModel(v, rc.model); }},
        {"loss", [&](const json &v) { ParseLoss(v, rc.loss); }},
        {"seed", [&](const json &v) { rc.seed = v.get<std::uint64_t>(); }}});
  rc.model.Validate();
  rc.loss.Validate();
  return rc;
}

RunConfig LoadRunConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str());
}

std::string RunConfigToJson(const RunConfig &rc) {
  const ModelConfig &m = rc.model;
  const TcnConfig &t = m.tcn;
  const LossConfig &l = rc.loss;
  json doc = {
      {"model",
       {{"encoder", EnumName(m.encoder, kEncoders)},
        {"frame_length", m.frame_length},
        {"representation_size", m.representation_size},
        {"overlap", std::to_string(m.overlap.num) + "/" + std::to_string(m.overlap.den)},
        {"input_layout", EnumName(m.input_layout, kLayouts)},
        {"window", EnumName(m.window, kWindows)},
        {"sample_rate", m.sample_rate},
        {"tcn",
         {{"bottleneck_channels", t.bottleneck_channels},
          {"conv_channels", t.conv_channels},
          {"kernel_size", t.kernel_size},
          {"blocks_per_repeat", t.blocks_per_repeat},
          {"repeats", t.repeats},
          {"skip_channels", t.skip_channels},
          {"noncausal_layers", t.noncausal_layers},
          {"mask_activation", EnumName(t.mask_activation, kActivations)},
          {"num_sources", t.num_sources}}}}},
      {"loss",
       {{"beta", l.beta},
        {"gamma", l.gamma},
        {"exponent", l.exponent},
        {"frame_length", l.stft.frame_length},
        {"hop", l.stft.hop},
        {"window", EnumName(l.stft.window, kWindows)},
        {"representation_size", l.representation_size},
        {"magnitude_floor", l.magnitude_floor},
        {"per_bin_mean", l.per_bin_mean},
        {"power_law", EnumName(l.power_law, kPowerLaws)}}},
      {"seed", rc.seed}};
  return doc.dump(2);
}

}  // namespace tcnse
