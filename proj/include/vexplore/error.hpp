// Copyright 2026 The vexplore Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vexplore {

// Every failure surfaced by the library carries one of these codes. The
// server maps them 1:1 onto ApiError.code and the CLI onto exit statuses.
enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kMalformedInput,
  kEmptyDataset,
  kGroupLimitExceeded,
  kEnumerationTooLarge,
  kUnknownGroup,
  kUnknownUser,
  kUnknownEntity,
  kUnknownDimension,
  kIneligibleGroup,
  kOutOfRange,
  kInsufficientClasses,
  kDegenerateFeatures,
  kCacheMismatch,
  kDatasetNotFound,
  kSessionNotFound,
  kJobNotFound,
  kNotReady,
  kJobInProgress,
  kInternal,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  using Detail = std::map<std::string, std::string>;

  Error(ErrorCode code, const std::string& message, Detail detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const Detail& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  Detail detail_;
};

}  // namespace vexplore
