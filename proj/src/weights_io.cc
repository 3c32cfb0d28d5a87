// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "tcnse/error.h"
#include "tcnse/io.h"

namespace tcnse {

namespace {

class Writer {
 public:
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>(v >> (8 * i)));
  }
  void Bytes(const char *p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  const std::vector<char> &bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(const std::vector<char> &bytes, const std::string &path)
      : bytes_(bytes), path_(path) {}

  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::string String(std::size_t n) {
    Need(n);
    std::string s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

  void Need(std::size_t n) const {
    if (n > bytes_.size() - pos_) {
      Fail(ErrorCode::kMalformedContainer, path_ + ": truncated weight container");
    }
  }

 private:
  const std::vector<char> &bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

void SaveWeights(const std::string &path, const ModelWeights &weights) {
  Writer w;
  w.Bytes("TCNW", 4);
  w.U32(kWeightsVersion);
  w.U32(static_cast<std::uint32_t>(weights.tensors().size()));
  for (const Tensor &t : weights.tensors()) {
    w.U32(static_cast<std::uint32_t>(t.name.size()));
    w.Bytes(t.name.data(), t.name.size());
    w.U32(static_cast<std::uint32_t>(t.shape.size()));
    for (std::uint32_t d : t.shape) w.U32(d);
    for (float v : t.values) w.U32(std::bit_cast<std::uint32_t>(v));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) Fail(ErrorCode::kIoError, "write failed for " + path);
}

ModelWeights LoadWeights(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path);
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  Reader r(bytes, path);
  if (r.String(4) != "TCNW") {
    Fail(ErrorCode::kMalformedContainer, path + ": bad magic");
  }
  const std::uint32_t version = r.U32();
  if (version != kWeightsVersion) {
    Fail(ErrorCode::kMalformedContainer,
         path + ": unsupported container version " + std::to_string(version));
  }
  const std::uint32_t count = r.U32();
  std::vector<Tensor> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor t;
    t.name = r.String(r.U32());
    const std::uint32_t rank = r.U32();
    r.Need(4ULL * rank);
    std::uint64_t elements = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      t.shape.push_back(r.U32());
      elements *= t.shape.back();
    }
    r.Need(4 * elements);
    t.values.resize(elements);
    for (float &v : t.values) v = std::bit_cast<float>(r.U32());
    tensors.push_back(std::move(t));
  }
  if (!r.AtEnd()) {
    Fail(ErrorCode::kMalformedContainer, path + ": trailing bytes after last tensor");
  }
  try {
    return ModelWeights(std::move(tensors));
  } catch (const Error &e) {
    Fail(ErrorCode::kMalformedContainer, path + ": " + e.what());
  }
}

ModelWeights LoadWeights(const std::string &path, const ModelConfig &config) {
  ModelWeights weights = LoadWeights(path);
  ValidateWeights(config, weights);
  return weights;
}

}  // namespace tcnse
