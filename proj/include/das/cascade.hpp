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

// Revocation propagation and risk-tiered containment.

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "das/chain_store.hpp"
#include "das/clock.hpp"
#include "das/token.hpp"

namespace das {

enum class CheckMode { kSynchronous, kHeartbeat, kAudit };
std::string_view check_mode_name(CheckMode m);

struct CascadeConfig {
  std::int64_t heartbeat = 100;  // ticks in simulation, ms in the service
  std::map<RiskTier, CheckMode> tier_policy{{RiskTier::kHigh, CheckMode::kSynchronous},
                                            {RiskTier::kMedium, CheckMode::kHeartbeat},
                                            {RiskTier::kLow, CheckMode::kAudit}};
  CheckMode mode_for(RiskTier tier) const;
};

struct ContainmentBound {
  enum class Kind { kZero, kFinite, kUntilAudit };
  RiskTier tier = RiskTier::kHigh;
  Kind kind = Kind::kZero;
  std::int64_t limit = 0;  // meaningful for kFinite
};

ContainmentBound containment_bound(RiskTier tier, const CascadeConfig& config,
                                   std::int64_t throughput);

// Revokes the token and, when propagate is set, every descendant. Returns
// the ids that are revoked afterwards (already-revoked members included) in
// breadth-first order. Throws kUnknownToken.
std::vector<std::string> revoke_cascade(const std::string& token_id, ChainStore& store,
                                        const std::string& reason, bool propagate = true);

// Revocation status as seen by an enforcement point. SYNCHRONOUS reads go to
// the store; HEARTBEAT and AUDIT reads use a snapshot refreshed once it is at
// least `heartbeat` ms old.
class RevocationView {
 public:
  RevocationView(const ChainStore& store, const Clock& clock, std::int64_t heartbeat_ms);

  bool is_revoked(const std::string& token_id, CheckMode mode);
  void refresh();
  std::int64_t last_refresh_ms() const;

 private:
  const ChainStore& store_;
  const Clock& clock_;
  std::int64_t heartbeat_ms_;
  mutable std::mutex mu_;
  std::set<std::string> snapshot_;
  std::int64_t refreshed_at_ = 0;
  bool primed_ = false;
};

struct BlastRadius {
  std::int64_t attempted = 0;  // post-revocation attempts
  std::int64_t executed = 0;   // post-revocation attempts that went through
  std::int64_t flagged = 0;    // post-revocation actions found by the post-hoc audit
};

// Discrete-time run on a logical clock (1 tick = 1 ms). A compromised agent
// performs `throughput` manifest-permitted actions every tick from tick 0 to
// `horizon`; its token is revoked at the start of `revocation_tick`.
BlastRadius simulate_blast_radius(RiskTier tier, std::int64_t heartbeat, std::int64_t throughput,
                                  std::int64_t revocation_tick, std::int64_t horizon,
                                  const CascadeConfig& base = {});

}  // namespace das
