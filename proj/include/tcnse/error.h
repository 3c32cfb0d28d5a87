// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_ERROR_H_
#define TCNSE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcnse {

enum class ErrorCode {
  kInvalidConfig,
  kEmptyInput,
  kNonFiniteInput,
  kShapeMismatch,
  kInvalidBasisSize,
  kLayoutMismatch,
  kNumericalDivergence,
  kSampleRateMismatch,
  kChunkSizeMismatch,
  kDegenerateReference,
  kExtractorInconsistent,
  kGradientUndefined,
  kUnsupportedChannels,
  kUnsupportedRate,
  kUnsupportedEncoding,
  kMalformedWav,
  kMalformedContainer,
  kWeightsConfigMismatch,
  kUnknownConfigKey,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this type. what() carries a
// human-readable message; code() is stable and machine-readable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string &message) {
  throw Error(code, message);
}

}  // namespace tcnse

#endif  // TCNSE_ERROR_H_
