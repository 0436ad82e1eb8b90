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

#pragma once

// At-execution manifest enforcement and post-execution output validation.
// Both functions are pure; liveness is supplied by the caller.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "das/decision.hpp"
#include "das/token.hpp"

namespace das {

enum class EnforcementReason {
  kOk,
  kNotInManifest,
  kMalformedPath,
  kTokenRevoked,
  kTokenExpired,
  kTagNotPermitted,
  kEmptyTags,
};

std::string_view enforcement_reason_name(EnforcementReason r);

struct ApiCallAttempt {
  std::string token_id;
  std::string method;    // as received
  std::string raw_path;  // as received
  std::optional<ApiOperation> normalized;  // unset when malformed or unknown method
  bool malformed = false;
  std::string detail;

  // Normalizes method and path. A method with non-letter characters or a
  // path that fails normalize_path is malformed; a well-formed but unknown
  // method is left unnormalized and never matches a manifest entry.
  static ApiCallAttempt make(std::string token_id, std::string method, std::string raw_path);
};

struct AgentOutput {
  std::string token_id;
  std::string scope_element;
  TagSet tags;
  std::string payload;
};

struct EnforcementVerdict {
  Decision decision = Decision::kBlock;
  EnforcementReason reason = EnforcementReason::kNotInManifest;
  std::vector<std::string> offending;

  bool allowed() const { return decision == Decision::kAllow; }
  static EnforcementVerdict allow() { return {Decision::kAllow, EnforcementReason::kOk, {}}; }
  static EnforcementVerdict block(EnforcementReason r, std::vector<std::string> items = {}) {
    return {Decision::kBlock, r, std::move(items)};
  }
};

struct TokenLiveness {
  bool revoked = false;
  bool expired = false;
};

// Revocation, then expiry, then path shape, then manifest membership.
EnforcementVerdict enforce_scope(const ApiCallAttempt& attempt, const DelegationToken& token,
                                 const TokenLiveness& liveness);

// Default-deny: every tag must appear in the permitted set of some scope the
// token holds. Tags compare case-sensitively.
EnforcementVerdict validate_output(const AgentOutput& output, const DelegationToken& token);

// Tier of the manifest entry covering the attempt. Throws kNotInManifest.
RiskTier risk_tier_of(const ApiCallAttempt& attempt, const ToolManifest& manifest);

}  // namespace das
