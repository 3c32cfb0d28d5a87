// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "tcnse/error.h"

namespace tcnse {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInvalidBasisSize: return "InvalidBasisSize";
    case ErrorCode::kLayoutMismatch: return "LayoutMismatch";
    case ErrorCode::kNumericalDivergence: return "NumericalDivergence";
    case ErrorCode::kSampleRateMismatch: return "SampleRateMismatch";
    case ErrorCode::kChunkSizeMismatch: return "ChunkSizeMismatch";
    case ErrorCode::kDegenerateReference: return "DegenerateReference";
    case ErrorCode::kExtractorInconsistent: return "ExtractorInconsistent";
    case ErrorCode::kGradientUndefined: return "GradientUndefined";
    case ErrorCode::kUnsupportedChannels: return "UnsupportedChannels";
    case ErrorCode::kUnsupportedRate: return "UnsupportedRate";
    case ErrorCode::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::kMalformedWav: return "MalformedWav";
    case ErrorCode::kMalformedContainer: return "MalformedContainer";
    case ErrorCode::kWeightsConfigMismatch: return "WeightsConfigMismatch";
    case ErrorCode::kUnknownConfigKey: return "UnknownConfigKey";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace tcnse
