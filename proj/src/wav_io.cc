// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "tcnse/error.h"
#include "tcnse/io.h"

namespace tcnse {

namespace {

std::uint32_t ReadU32(const unsigned char *p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<unsigned char> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void PutU16(std::vector<unsigned char> &out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

}  // namespace

AudioSignal ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path);
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const std::size_t size = bytes.size();
  if (size < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    Fail(ErrorCode::kMalformedWav, path + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char *chunk = bytes.data() + pos;
    const std::uint32_t chunk_size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > size) {
        Fail(ErrorCode::kMalformedWav, path + ": truncated fmt chunk");
      }
      format = ReadU16(bytes.data() + body);
      channels = ReadU16(bytes.data() + body + 2);
      rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) Fail(ErrorCode::kMalformedWav, path + ": data chunk before fmt");
      if (channels != 1) {
        Fail(ErrorCode::kUnsupportedChannels,
             path + ": " + std::to_string(channels) + " channels, need mono");
      }
      if (rate != kWavSampleRate) {
        Fail(ErrorCode::kUnsupportedRate,
             path + ": " + std::to_string(rate) + " Hz, need 16000 Hz");
      }
      if (format != 1 || bits != 16) {
        Fail(ErrorCode::kUnsupportedEncoding,
             path + ": need 16-bit PCM (format " + std::to_string(format) +
                 ", " + std::to_string(bits) + " bits)");
      }
      if (body + chunk_size > size || chunk_size % 2 != 0) {
        Fail(ErrorCode::kMalformedWav, path + ": truncated data chunk");
      }
      AudioSignal signal;
      signal.sample_rate = static_cast<int>(rate);
      signal.samples.resize(chunk_size / 2);
      for (Eigen::Index i = 0; i < signal.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(ReadU16(bytes.data() + body + 2 * i));
        signal.samples[i] = v / 32768.0;
      }
      return signal;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  Fail(ErrorCode::kMalformedWav, path + ": no data chunk");
}

std::size_t WriteWav(const std::string &path, const AudioSignal &signal) {
  if (signal.sample_rate != kWavSampleRate) {
    Fail(ErrorCode::kUnsupportedRate,
         "can only write 16000 Hz audio, got " + std::to_string(signal.sample_rate));
  }
  ValidateSignal(signal);
  const auto num = static_cast<std::uint32_t>(signal.size());
  std::vector<unsigned char> out;
  out.reserve(44 + 2 * num);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(out, 36 + 2 * num);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, kWavSampleRate);
  PutU32(out, kWavSampleRate * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(out, 2 * num);

  std::size_t clipped = 0;
  for (Eigen::Index i = 0; i < signal.size(); ++i) {
    double v = std::nearbyint(signal.samples[i] * 32768.0);
    if (v > 32767.0 || v < -32768.0) {
      ++clipped;
      v = std::clamp(v, -32768.0, 32767.0);
    }
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) Fail(ErrorCode::kIoError, "cannot write " + path);
  file.write(reinterpret_cast<const char *>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) Fail(ErrorCode::kIoError, "write failed for " + path);
  return clipped;
}

}  // namespace tcnse
