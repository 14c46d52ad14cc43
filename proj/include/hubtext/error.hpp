/* Copyright 2026 The hubtext Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hubtext {

enum class Errc {
  kInvalidArgument,
  kZeroNorm,
  kDimMismatch,
  kNonFinite,
  kDegenerateHub,
  kEmptySequence,
  kParseError,
  kIoError,
  kProtocolError,
  kRemoteError,
  kTimeout,
  kEmptyFile,
  kTokenizationError,
  kInvalidBeamSize,
  kWorkerFailure,
  kTimeoutAbort,
  kMissingRanking,
  kLengthMismatch,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kZeroNorm: return "ZeroNorm";
    case Errc::kDimMismatch: return "DimMismatch";
    case Errc::kNonFinite: return "NonFinite";
    case Errc::kDegenerateHub: return "DegenerateHub";
    case Errc::kEmptySequence: return "EmptySequence";
    case Errc::kParseError: return "ParseError";
    case Errc::kIoError: return "IoError";
    case Errc::kProtocolError: return "ProtocolError";
    case Errc::kRemoteError: return "RemoteError";
    case Errc::kTimeout: return "Timeout";
    case Errc::kEmptyFile: return "EmptyFile";
    case Errc::kTokenizationError: return "TokenizationError";
    case Errc::kInvalidBeamSize: return "InvalidBeamSize";
    case Errc::kWorkerFailure: return "WorkerFailure";
    case Errc::kTimeoutAbort: return "TimeoutAbort";
    case Errc::kMissingRanking: return "MissingRanking";
    case Errc::kLengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

// All library failures surface as hubtext::Error; code() identifies the kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hubtext
