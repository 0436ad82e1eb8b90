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

// The Delegation Authority Service: chain initiation, checked delegation,
// enforcement, revocation and reconstruction over one chain store.

#include <bitset>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "das/cascade.hpp"
#include "das/chain_store.hpp"
#include "das/clock.hpp"
#include "das/config.hpp"
#include "das/enforcement.hpp"
#include "das/intent.hpp"
#include "das/signer.hpp"
#include "das/token.hpp"

namespace das {

// Which of P1..P7 have their enforcement hook active. C1 (identity) and C5
// (expiry/liveness at delegation) are not property-gated.
class Switchboard {
 public:
  static Switchboard all() { return Switchboard(0x7f); }
  static Switchboard none() { return Switchboard(0); }
  // "P2+P6+P7", "all", "none"; throws kInvalidArgument.
  static Switchboard parse(std::string_view text);

  bool enabled(int property) const { return bits_.test(static_cast<std::size_t>(property - 1)); }
  Switchboard with(int property, bool on) const;
  unsigned mask() const { return static_cast<unsigned>(bits_.to_ulong()); }
  std::string to_string() const;
  bool operator==(const Switchboard&) const = default;

  explicit Switchboard(unsigned mask) : bits_(mask & 0x7f) {}

 private:
  std::bitset<7> bits_;
};

enum class CheckId { kC1, kC2, kC2a, kC3, kC4, kC5 };
enum class CheckStatus { kPass, kFail, kSkipped };
std::string_view check_id_name(CheckId id);
std::string_view check_status_name(CheckStatus s);

struct CheckResult {
  CheckId id = CheckId::kC1;
  CheckStatus status = CheckStatus::kPass;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckResult> results;  // always C1, C2, C2a, C3, C4, C5 in order
  std::optional<IntentVerdict> intent;

  bool issuable() const;
  const CheckResult* first_failure() const;
  const CheckResult& get(CheckId id) const;
  nlohmann::json to_json() const;
};

struct DelegationRequest {
  std::string parent_token_id;
  std::string dst_agent;
  ScopeSet requested_scope;
  std::string subtask;
  // Defaults to the parent's set; boundary controls are always added.
  std::optional<PolicySet> requested_policies;
  // Defaults to the configured token TTL; capped by the parent's expiry.
  std::optional<std::int64_t> ttl_ms;
};

struct DelegationOutcome {
  std::optional<DelegationToken> token;
  CheckReport report;
  bool issued() const { return token.has_value(); }
};

using IdGenerator = std::function<std::string()>;
IdGenerator random_id_generator();
// Deterministic ids for tests and sandboxes.
IdGenerator sequential_id_generator(std::string prefix);

struct DasOptions {
  DasConfig config = DasConfig::defaults();
  Switchboard switchboard = Switchboard::all();
  const Clock* clock = nullptr;                // SystemClock when null
  std::shared_ptr<Classifier> classifier;      // LexicalClassifier when null
  IntentConfig intent_config = IntentConfig::defaults();
  std::shared_ptr<TokenSigner> signer;         // fresh single-key signer when null
  std::optional<std::filesystem::path> audit_log;
  IdGenerator id_generator;                    // random 128-bit hex when empty
  bool revoke_on_violation = true;
};

class Das {
 public:
  explicit Das(DasOptions options = {});

  // Throws kUnknownUser, kUnknownRole, kEmptyIntent, kInvalidArgument
  // (unregistered agent), kKeyUnavailable / kThresholdNotMet.
  DelegationToken initiate_chain(const std::string& user_id, const std::string& goal,
                                 std::optional<std::string> agent = std::nullopt);

  // Throws kUnknownParentToken, kEmptyIntent, kThresholdNotMet; check
  // failures are reported, not thrown.
  DelegationOutcome delegate(const DelegationRequest& request);

  // Throws kUnknownToken.
  EnforcementVerdict enforce(const std::string& token_id, const std::string& method,
                             const std::string& path);
  EnforcementVerdict validate_output(const AgentOutput& output);

  std::vector<std::string> revoke(const std::string& token_id, const std::string& reason);
  DelegationChain reconstruct(const std::string& token_id) const;
  // verify_chain over the reconstructed chain with this service's signer.
  std::vector<ChainViolation> audit(const std::string& token_id) const;

  ChainStore& store() { return *store_; }
  const ChainStore& store() const { return *store_; }
  const DasConfig& config() const { return options_.config; }
  const Switchboard& switchboard() const { return options_.switchboard; }
  TokenSigner& signer() { return *options_.signer; }
  const TokenSigner& signer() const { return *options_.signer; }
  const Clock& clock() const { return *options_.clock; }
  const CascadeConfig& cascade() const { return cascade_; }
  Classifier& classifier() { return *options_.classifier; }
  const IntentConfig& intent_config() const { return options_.intent_config; }

 private:
  std::mutex& chain_lock(const std::string& chain_id);
  RiskTier tier_for(const DelegationToken& token, const ApiCallAttempt& attempt) const;
  bool revoked_for(const std::string& token_id, RiskTier tier);
  void on_violation(const std::string& token_id, const std::string& reason);

  DasOptions options_;
  CascadeConfig cascade_;
  std::unique_ptr<ChainStore> store_;
  std::unique_ptr<RevocationView> view_;
  std::mutex locks_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> chain_locks_;
};

// JSON views used by the HTTP API, the CLI and reports.
nlohmann::json token_to_json(const DelegationToken& token);
nlohmann::json verdict_to_json(const EnforcementVerdict& verdict);
nlohmann::json intent_verdict_to_json(const IntentVerdict& verdict);
nlohmann::json violations_to_json(const std::vector<ChainViolation>& violations);

}  // namespace das
