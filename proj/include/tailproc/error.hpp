// Copyright 2026 The tailproc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TAILPROC_ERROR_HPP_
#define TAILPROC_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tailproc {

enum class ErrorCode {
  kInvalidSequence,
  kEmptyExceedanceSet,
  kZeroSequence,
  kNotInE0,
  kInvalidDistribution,
  kMalformedModel,
  kSamplingBudgetExceeded,
  kMarkSpaceTooLarge,
  kDegenerateModel,
  kNoExceedances,
  kNoClusters,
  kInvalidArgument,
  kParseError,
  kConfigError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as tailproc::Error; code() tells callers
// which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSequence: return "InvalidSequence";
    case ErrorCode::kEmptyExceedanceSet: return "EmptyExceedanceSet";
    case ErrorCode::kZeroSequence: return "ZeroSequence";
    case ErrorCode::kNotInE0: return "NotInE0";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kMalformedModel: return "MalformedModel";
    case ErrorCode::kSamplingBudgetExceeded: return "SamplingBudgetExceeded";
    case ErrorCode::kMarkSpaceTooLarge: return "MarkSpaceTooLarge";
    case ErrorCode::kDegenerateModel: return "DegenerateModel";
    case ErrorCode::kNoExceedances: return "NoExceedances";
    case ErrorCode::kNoClusters: return "NoClusters";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace tailproc

#endif  // TAILPROC_ERROR_HPP_
