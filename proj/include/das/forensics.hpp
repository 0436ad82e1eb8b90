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

// Operator audit of one delegation chain: lineage root to leaf with per-hop
// scope and policy deltas, intent, issuance checks and status.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "das/chain_store.hpp"
#include "das/service.hpp"
#include "das/token.hpp"

namespace das::forensics {

struct Hop {
  std::size_t index = 0;
  std::string token_id;
  std::string src;
  std::string dst;
  std::vector<std::string> scope;
  std::vector<std::string> scope_removed;  // parent scope not carried over
  std::vector<std::string> scope_added;    // escalation; empty on a valid chain
  std::vector<std::string> policies_added;
  std::vector<std::string> policies_removed;
  std::string intent;
  nlohmann::json checks;  // issuance check report, null for roots or when unknown
  std::string status;     // ACTIVE, REVOKED, EXPIRED or UNKNOWN
  bool hash_mismatch = false;
};

struct AuditReport {
  std::string token_id;
  std::string chain_id;
  std::vector<Hop> hops;  // root first
  std::vector<ChainViolation> violations;
  std::optional<std::string> broken;  // set when integrity reconstruction failed
  bool signatures_checked = true;

  bool clean() const { return violations.empty() && !broken; }
  int exit_code() const { return clean() ? 0 : 1; }
  // "leaf -> ... -> root -> ROOT"
  std::string lineage() const;
  nlohmann::json to_json() const;
  std::string render_table() const;
};

// Against a store. An empty verifier skips signature checks (offline logs
// carry no keys). Throws kUnknownToken.
AuditReport audit_chain(const ChainStore& store, const std::string& token_id,
                        const SignatureVerifier& verifier, std::int64_t now_ms);
AuditReport audit_service(const Das& das, const std::string& token_id);
// Offline; signatures are checked only when keys are given.
AuditReport audit_log_text(std::string_view ndjson, const std::string& token_id,
                           const KeyStore* keys = nullptr);
AuditReport audit_log_file(const std::filesystem::path& path, const std::string& token_id,
                           const KeyStore* keys = nullptr);
// From a reconstruction endpoint response (status plus body).
AuditReport audit_response(int status, const nlohmann::json& body, const std::string& token_id);

}  // namespace das::forensics
