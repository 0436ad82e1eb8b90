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

#include "das/enforcement.hpp"

#include <cctype>

#include "das/error.hpp"

namespace das {

std::string_view enforcement_reason_name(EnforcementReason r) {
  switch (r) {
    case EnforcementReason::kOk: return "OK";
    case EnforcementReason::kNotInManifest: return "NOT_IN_MANIFEST";
    case EnforcementReason::kMalformedPath: return "MALFORMED_PATH";
    case EnforcementReason::kTokenRevoked: return "TOKEN_REVOKED";
    case EnforcementReason::kTokenExpired: return "TOKEN_EXPIRED";
    case EnforcementReason::kTagNotPermitted: return "TAG_NOT_PERMITTED";
    case EnforcementReason::kEmptyTags: return "EMPTY_TAGS";
  }
  return "NOT_IN_MANIFEST";
}

ApiCallAttempt ApiCallAttempt::make(std::string token_id, std::string method,
                                    std::string raw_path) {
  ApiCallAttempt a;
  a.token_id = std::move(token_id);
  a.method = std::move(method);
  a.raw_path = std::move(raw_path);

  std::string upper;
  for (char c : a.method) {
    if (!std::isalpha(static_cast<unsigned char>(c))) {
      a.malformed = true;
      a.detail = "method contains non-letter characters";
      return a;
    }
    upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (upper.empty()) {
    a.malformed = true;
    a.detail = "empty method";
    return a;
  }
  auto path = normalize_path(a.raw_path);
  if (!path.path) {
    a.malformed = true;
    a.detail = path.error;
    return a;
  }
  auto method_enum = parse_method(upper);
  if (!method_enum) {
    a.detail = "method " + upper + " is not a manifest method";
    return a;
  }
  a.normalized = ApiOperation{*method_enum, std::move(*path.path)};
  return a;
}

EnforcementVerdict enforce_scope(const ApiCallAttempt& attempt, const DelegationToken& token,
                                 const TokenLiveness& liveness) {
  if (liveness.revoked) return EnforcementVerdict::block(EnforcementReason::kTokenRevoked, {token.id});
  if (liveness.expired) return EnforcementVerdict::block(EnforcementReason::kTokenExpired, {token.id});
  if (attempt.malformed) {
    return EnforcementVerdict::block(EnforcementReason::kMalformedPath,
                                     {attempt.method + " " + attempt.raw_path});
  }
  if (!attempt.normalized || !token.manifest.match(token.scope, *attempt.normalized)) {
    std::string shown = attempt.normalized ? attempt.normalized->to_string()
                                           : attempt.method + " " + attempt.raw_path;
    return EnforcementVerdict::block(EnforcementReason::kNotInManifest, {shown});
  }
  return EnforcementVerdict::allow();
}

EnforcementVerdict validate_output(const AgentOutput& output, const DelegationToken& token) {
  if (output.tags.empty()) return EnforcementVerdict::block(EnforcementReason::kEmptyTags);
  TagSet permitted = token.output_schema.permitted_for(token.scope);
  TagSet rejected = output.tags.minus(permitted);
  if (!rejected.empty()) {
    return EnforcementVerdict::block(EnforcementReason::kTagNotPermitted,
                                     {rejected.begin(), rejected.end()});
  }
  return EnforcementVerdict::allow();
}

RiskTier risk_tier_of(const ApiCallAttempt& attempt, const ToolManifest& manifest) {
  if (!attempt.normalized) {
    fail(ErrorCode::kNotInManifest, "unnormalizable attempt " + attempt.raw_path);
  }
  ScopeSet scope;
  for (const auto& [s, ops] : manifest.entries) scope.insert(s);
  auto matched = manifest.match(scope, *attempt.normalized);
  if (!matched) fail(ErrorCode::kNotInManifest, attempt.normalized->to_string());
  auto it = manifest.risk_tiers.find(*matched);
  // Untiered entries are treated as the strictest tier.
  return it == manifest.risk_tiers.end() ? RiskTier::kHigh : it->second;
}

}  // namespace das
