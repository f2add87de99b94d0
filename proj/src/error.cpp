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

#include "vexplore/error.hpp"

namespace vexplore {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIoError: return "io_error";
    case ErrorCode::kMalformedInput: return "malformed_input";
    case ErrorCode::kEmptyDataset: return "empty_dataset";
    case ErrorCode::kGroupLimitExceeded: return "group_limit_exceeded";
    case ErrorCode::kEnumerationTooLarge: return "enumeration_too_large";
    case ErrorCode::kUnknownGroup: return "group_not_found";
    case ErrorCode::kUnknownUser: return "user_not_found";
    case ErrorCode::kUnknownEntity: return "entity_not_found";
    case ErrorCode::kUnknownDimension: return "unknown_dimension";
    case ErrorCode::kIneligibleGroup: return "ineligible_group";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kInsufficientClasses: return "insufficient_classes";
    case ErrorCode::kDegenerateFeatures: return "degenerate_features";
    case ErrorCode::kCacheMismatch: return "cache_mismatch";
    case ErrorCode::kDatasetNotFound: return "dataset_not_found";
    case ErrorCode::kSessionNotFound: return "session_not_found";
    case ErrorCode::kJobNotFound: return "job_not_found";
    case ErrorCode::kNotReady: return "not_ready";
    case ErrorCode::kJobInProgress: return "job_in_progress";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

}  // namespace vexplore
