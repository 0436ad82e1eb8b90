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

#include "das/cascade.hpp"

#include <deque>

#include "das/enforcement.hpp"
#include "das/error.hpp"

namespace das {

std::string_view check_mode_name(CheckMode m) {
  switch (m) {
    case CheckMode::kSynchronous: return "SYNCHRONOUS";
    case CheckMode::kHeartbeat: return "HEARTBEAT";
    case CheckMode::kAudit: return "AUDIT";
  }
  return "SYNCHRONOUS";
}

CheckMode CascadeConfig::mode_for(RiskTier tier) const {
  auto it = tier_policy.find(tier);
  return it == tier_policy.end() ? CheckMode::kSynchronous : it->second;
}

ContainmentBound containment_bound(RiskTier tier, const CascadeConfig& config,
                                   std::int64_t throughput) {
  switch (config.mode_for(tier)) {
    case CheckMode::kSynchronous:
      return {tier, ContainmentBound::Kind::kZero, 0};
    case CheckMode::kHeartbeat:
      return {tier, ContainmentBound::Kind::kFinite, config.heartbeat * throughput};
    case CheckMode::kAudit:
      return {tier, ContainmentBound::Kind::kUntilAudit, 0};
  }
  return {tier, ContainmentBound::Kind::kZero, 0};
}

std::vector<std::string> revoke_cascade(const std::string& token_id, ChainStore& store,
                                        const std::string& reason, bool propagate) {
  if (!store.contains(token_id)) fail(ErrorCode::kUnknownToken, "unknown token " + token_id);
  std::vector<std::string> out;
  std::deque<std::string> queue{token_id};
  std::set<std::string> seen;
  while (!queue.empty()) {
    std::string id = std::move(queue.front());
    queue.pop_front();
    if (!seen.insert(id).second) continue;
    store.mark_revoked(id, id == token_id ? reason : "ancestor " + token_id + " revoked");
    out.push_back(id);
    if (!propagate) break;
    for (auto& child : store.children_of(id)) queue.push_back(std::move(child));
  }
  return out;
}

RevocationView::RevocationView(const ChainStore& store, const Clock& clock,
                               std::int64_t heartbeat_ms)
    : store_(store), clock_(clock), heartbeat_ms_(heartbeat_ms) {}

void RevocationView::refresh() {
  auto snapshot = store_.revoked_ids();
  std::lock_guard lock(mu_);
  snapshot_ = std::move(snapshot);
  refreshed_at_ = clock_.now_ms();
  primed_ = true;
}

std::int64_t RevocationView::last_refresh_ms() const {
  std::lock_guard lock(mu_);
  return refreshed_at_;
}

bool RevocationView::is_revoked(const std::string& token_id, CheckMode mode) {
  if (mode == CheckMode::kSynchronous) return store_.is_revoked(token_id);
  bool stale;
  {
    std::lock_guard lock(mu_);
    stale = !primed_ || clock_.now_ms() - refreshed_at_ >= heartbeat_ms_;
  }
  if (stale) refresh();
  std::lock_guard lock(mu_);
  return snapshot_.count(token_id) > 0;
}

BlastRadius simulate_blast_radius(RiskTier tier, std::int64_t heartbeat, std::int64_t throughput,
                                  std::int64_t revocation_tick, std::int64_t horizon,
                                  const CascadeConfig& base) {
  CascadeConfig config = base;
  config.heartbeat = heartbeat;
  CheckMode mode = config.mode_for(tier);

  ManualClock clock(0);
  ChainStore store(clock);
  DelegationToken token;
  token.id = "compromised";
  token.src = "user";
  token.dst = "agent";
  token.scope = ScopeSet{"act"};
  token.intent.text = "simulated task";
  ApiOperation op{HttpMethod::kPost, "/api/act"};
  token.manifest.entries["act"] = {op};
  token.manifest.risk_tiers[op] = tier;
  token.expires_at = horizon + 1;
  store.store_token(token);

  RevocationView view(store, clock, heartbeat);
  auto attempt = ApiCallAttempt::make(token.id, "POST", "/api/act");
  BlastRadius result;
  for (std::int64_t tick = 0; tick <= horizon; ++tick) {
    clock.set(tick);
    if (tick == revocation_tick) revoke_cascade(token.id, store, "simulated violation");
    for (std::int64_t i = 0; i < throughput; ++i) {
      // AUDIT-tier tools execute without a revocation check.
      bool revoked = mode != CheckMode::kAudit && view.is_revoked(token.id, mode);
      auto verdict = enforce_scope(attempt, token, {revoked, false});
      if (verdict.allowed()) {
        store.append_event({tick, store.chain_id_of(token.id), token.id,
                            std::string(audit_event::kEnforce), {{"op", op.to_string()}}});
      }
      if (tick >= revocation_tick) {
        ++result.attempted;
        if (verdict.allowed()) ++result.executed;
      }
    }
  }

  // Post-hoc audit: executed actions stamped at or after the revocation event.
  std::int64_t revoked_at = -1;
  for (const auto& ev : store.events()) {
    if (ev.event == audit_event::kRevoked && ev.token_id == token.id) revoked_at = ev.ts;
  }
  if (revoked_at >= 0) {
    for (const auto& ev : store.events()) {
      if (ev.event == audit_event::kEnforce && ev.token_id == token.id && ev.ts >= revoked_at) {
        ++result.flagged;
      }
    }
  }
  return result;
}

}  // namespace das
