// Copyright 2026 The DAS Authors
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

#include "das/error.hpp"

namespace das {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kKeyUnavailable: return "KeyUnavailable";
    case ErrorCode::kInvalidSignature: return "InvalidSignature";
    case ErrorCode::kScopeNotInParent: return "ScopeNotInParent";
    case ErrorCode::kEmptyIntent: return "EmptyIntent";
    case ErrorCode::kClassifierUnavailable: return "ClassifierUnavailable";
    case ErrorCode::kMalformedChain: return "MalformedChain";
    case ErrorCode::kUnknownToken: return "UnknownToken";
    case ErrorCode::kUnknownParentToken: return "UnknownParentToken";
    case ErrorCode::kUnknownUser: return "UnknownUser";
    case ErrorCode::kUnknownRole: return "UnknownRole";
    case ErrorCode::kNotInManifest: return "NotInManifest";
    case ErrorCode::kOrphanToken: return "OrphanToken";
    case ErrorCode::kDuplicateToken: return "DuplicateToken";
    case ErrorCode::kBrokenChain: return "BrokenChain";
    case ErrorCode::kThresholdNotMet: return "ThresholdNotMet";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace das
