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

#include "das/chain_store.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "das/error.hpp"

namespace das {

std::string_view token_status_name(TokenStatus s) {
  switch (s) {
    case TokenStatus::kActive: return "ACTIVE";
    case TokenStatus::kRevoked: return "REVOKED";
    case TokenStatus::kExpired: return "EXPIRED";
  }
  return "ACTIVE";
}

std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::kRoot: return "ROOT";
    case ViolationKind::kContinuity: return "CONTINUITY";
    case ViolationKind::kHashLink: return "HASH_LINK";
    case ViolationKind::kSignature: return "SIGNATURE";
    case ViolationKind::kScopeEscalation: return "SCOPE_ESCALATION";
    case ViolationKind::kPolicyDrop: return "POLICY_DROP";
  }
  return "HASH_LINK";
}

nlohmann::json AuditEvent::to_json() const {
  return {{"ts", ts}, {"chain_id", chain_id}, {"token_id", token_id}, {"event", event},
          {"detail", detail}};
}

AuditEvent AuditEvent::from_json(const nlohmann::json& j) {
  AuditEvent e;
  e.ts = j.at("ts").get<std::int64_t>();
  e.chain_id = j.at("chain_id").get<std::string>();
  e.token_id = j.at("token_id").get<std::string>();
  e.event = j.at("event").get<std::string>();
  e.detail = j.value("detail", nlohmann::json::object());
  return e;
}

ChainStore::ChainStore(const Clock& clock, std::optional<std::filesystem::path> log_path)
    : clock_(clock) {
  if (!log_path) return;
  if (std::filesystem::exists(*log_path)) {
    std::ifstream in(*log_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    replay(buf.str());
  }
  log_ = std::fopen(log_path->c_str(), "ab");
  if (log_ == nullptr) fail(ErrorCode::kIoError, "cannot open audit log " + log_path->string());
}

ChainStore::~ChainStore() {
  if (log_ != nullptr) std::fclose(log_);
}

std::unique_ptr<ChainStore> ChainStore::from_export(std::string_view ndjson, const Clock& clock) {
  auto store = std::make_unique<ChainStore>(clock);
  store->replay(ndjson);
  return store;
}

void ChainStore::replay(std::string_view ndjson) {
  std::unique_lock lock(mu_);
  replaying_ = true;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < ndjson.size()) {
    std::size_t end = ndjson.find('\n', pos);
    if (end == std::string_view::npos) end = ndjson.size();
    std::string_view line = ndjson.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    AuditEvent ev;
    try {
      ev = AuditEvent::from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParseError, "audit log line " + std::to_string(line_no) + ": " + e.what());
    }
    if (ev.event == audit_event::kIssued) {
      auto entry = std::make_shared<Entry>();
      entry->token = from_wire(ev.detail.at("token").get<std::string>());
      auto recorded = digest_from_hex(ev.detail.at("hash").get<std::string>());
      if (!recorded) fail(ErrorCode::kParseError, "bad recorded hash on line " + std::to_string(line_no));
      entry->hash = *recorded;
      entry->chain_id = ev.chain_id;
      entry->checks = ev.detail.value("checks", nlohmann::json());
      // Parents are resolved lazily; a missing parent shows up as a broken
      // chain on reconstruction rather than aborting the replay.
      insert_locked(std::move(entry), false);
    } else if (ev.event == audit_event::kRevoked) {
      if (auto it = by_id_.find(ev.token_id); it != by_id_.end()) {
        by_hash_.at(it->second)->revoked = true;
        ++revocation_epoch_;
      }
    }
    events_.push_back(std::move(ev));
  }
  replaying_ = false;
}

void ChainStore::insert_locked(std::shared_ptr<Entry> entry, bool check_parent) {
  const DelegationToken& t = entry->token;
  if (by_hash_.count(entry->hash) || by_id_.count(t.id)) {
    fail(ErrorCode::kDuplicateToken, "token already stored: " + t.id);
  }
  std::string parent_id;
  if (!t.is_root()) {
    auto parent = by_hash_.find(t.parent_hash);
    if (parent == by_hash_.end()) {
      if (check_parent) fail(ErrorCode::kOrphanToken, "unknown parent hash for " + t.id);
    } else {
      parent_id = parent->second->token.id;
    }
  }
  by_id_[t.id] = entry->hash;
  if (!parent_id.empty()) children_[parent_id].push_back(t.id);
  by_hash_[entry->hash] = std::move(entry);
}

Digest ChainStore::store_token(const DelegationToken& token, nlohmann::json checks,
                               bool durable) {
  auto entry = std::make_shared<Entry>();
  entry->token = token;
  entry->hash = token_hash(token);
  entry->checks = std::move(checks);

  std::unique_lock lock(mu_);
  if (token.is_root()) {
    entry->chain_id = to_hex(entry->hash);
  } else if (auto parent = by_hash_.find(token.parent_hash); parent != by_hash_.end()) {
    entry->chain_id = parent->second->chain_id;
  }
  AuditEvent ev;
  ev.ts = clock_.now_ms();
  ev.chain_id = entry->chain_id;
  ev.token_id = token.id;
  ev.event = audit_event::kIssued;
  ev.detail = {{"token", to_wire(token)},
               {"hash", to_hex(entry->hash)},
               {"parent_hash", to_hex(token.parent_hash)},
               {"checks", entry->checks}};
  Digest hash = entry->hash;
  insert_locked(std::move(entry), true);
  write_line_locked(ev, durable);
  events_.push_back(std::move(ev));
  return hash;
}

bool ChainStore::contains(const std::string& token_id) const {
  std::shared_lock lock(mu_);
  return by_id_.count(token_id) > 0;
}

std::optional<DelegationToken> ChainStore::get(const std::string& token_id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(token_id);
  if (it == by_id_.end()) return std::nullopt;
  return by_hash_.at(it->second)->token;
}

std::optional<Digest> ChainStore::recorded_hash(const std::string& token_id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(token_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<nlohmann::json> ChainStore::issuance_checks(const std::string& token_id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(token_id);
  if (it == by_id_.end()) return std::nullopt;
  return by_hash_.at(it->second)->checks;
}

std::string ChainStore::chain_id_of(const std::string& token_id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(token_id);
  if (it == by_id_.end()) fail(ErrorCode::kUnknownToken, "unknown token " + token_id);
  return by_hash_.at(it->second)->chain_id;
}

TokenStatus ChainStore::status(const std::string& token_id, std::int64_t now_ms) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(token_id);
  if (it == by_id_.end()) fail(ErrorCode::kUnknownToken, "unknown token " + token_id);
  const Entry& e = *by_hash_.at(it->second);
  if (e.revoked) return TokenStatus::kRevoked;
  if (now_ms >= e.token.expires_at) return TokenStatus::kExpired;
  return TokenStatus::kActive;
}

bool ChainStore::is_revoked(const std::string& token_id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(token_id);
  if (it == by_id_.end()) fail(ErrorCode::kUnknownToken, "unknown token " + token_id);
  return by_hash_.at(it->second)->revoked;
}

std::vector<std::string> ChainStore::children_of(const std::string& token_id) const {
  std::shared_lock lock(mu_);
  auto it = children_.find(token_id);
  return it == children_.end() ? std::vector<std::string>{} : it->second;
}

bool ChainStore::mark_revoked(const std::string& token_id, const std::string& reason,
                              bool durable) {
  std::unique_lock lock(mu_);
  auto it = by_id_.find(token_id);
  if (it == by_id_.end()) fail(ErrorCode::kUnknownToken, "unknown token " + token_id);
  Entry& e = *by_hash_.at(it->second);
  if (e.revoked) return false;
  e.revoked = true;
  ++revocation_epoch_;
  AuditEvent ev{clock_.now_ms(), e.chain_id, token_id, std::string(audit_event::kRevoked),
                {{"reason", reason}}};
  write_line_locked(ev, durable);
  events_.push_back(std::move(ev));
  return true;
}

std::set<std::string> ChainStore::revoked_ids() const {
  std::shared_lock lock(mu_);
  std::set<std::string> out;
  for (const auto& [hash, e] : by_hash_) {
    if (e->revoked) out.insert(e->token.id);
  }
  return out;
}

void ChainStore::append_event(AuditEvent event, bool durable) {
  std::unique_lock lock(mu_);
  if (event.ts == 0) event.ts = clock_.now_ms();
  write_line_locked(event, durable);
  events_.push_back(std::move(event));
}

void ChainStore::write_line_locked(const AuditEvent& event, bool durable) {
  if (log_ == nullptr || replaying_) return;
  std::string line = event.to_json().dump() + "\n";
  if (std::fwrite(line.data(), 1, line.size(), log_) != line.size() || std::fflush(log_) != 0) {
    fail(ErrorCode::kIoError, "audit log write failed");
  }
  if (durable) ::fsync(::fileno(log_));
}

std::vector<AuditEvent> ChainStore::events() const {
  std::shared_lock lock(mu_);
  return events_;
}

std::string ChainStore::export_ndjson() const {
  std::shared_lock lock(mu_);
  std::string out;
  for (const auto& e : events_) out += e.to_json().dump() + "\n";
  return out;
}

std::size_t ChainStore::size() const {
  std::shared_lock lock(mu_);
  return by_id_.size();
}

DelegationChain ChainStore::reconstruct(const std::string& token_id, bool verify_integrity) const {
  std::shared_lock lock(mu_);
  auto id_it = by_id_.find(token_id);
  if (id_it == by_id_.end()) fail(ErrorCode::kUnknownToken, "unknown token " + token_id);

  std::vector<DelegationToken> reversed;
  Digest key = id_it->second;
  while (true) {
    ++lookups_;
    auto it = by_hash_.find(key);
    if (it == by_hash_.end()) {
      fail(ErrorCode::kBrokenChain, "no stored token under hash " + to_hex(key) + " (parent of " +
                                        reversed.back().id + ")");
    }
    const Entry& e = *it->second;
    if (verify_integrity && token_hash(e.token) != e.hash) {
      fail(ErrorCode::kBrokenChain, "token " + e.token.id + " does not hash to " + to_hex(e.hash));
    }
    reversed.push_back(e.token);
    if (e.token.is_root()) break;
    if (reversed.size() > by_hash_.size()) fail(ErrorCode::kBrokenChain, "parent cycle");
    key = e.token.parent_hash;
  }
  return DelegationChain{{reversed.rbegin(), reversed.rend()}};
}

DelegationChain ChainStore::reconstruct_partial(const std::string& token_id) const {
  std::shared_lock lock(mu_);
  auto id_it = by_id_.find(token_id);
  if (id_it == by_id_.end()) fail(ErrorCode::kUnknownToken, "unknown token " + token_id);
  std::vector<DelegationToken> reversed;
  Digest key = id_it->second;
  while (reversed.size() <= by_hash_.size()) {
    auto it = by_hash_.find(key);
    if (it == by_hash_.end()) break;
    reversed.push_back(it->second->token);
    if (it->second->token.is_root()) break;
    key = it->second->token.parent_hash;
  }
  return DelegationChain{{reversed.rbegin(), reversed.rend()}};
}

std::vector<ChainViolation> verify_chain(const DelegationChain& chain,
                                         const SignatureVerifier& verifier) {
  std::vector<ChainViolation> out;
  const auto& t = chain.tokens;
  if (t.empty()) return out;
  if (!t.front().is_root()) {
    out.push_back({0, ViolationKind::kRoot, "first token does not carry the ROOT parent hash"});
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (verifier && !verifier(t[i])) {
      out.push_back({i, ViolationKind::kSignature, "signature does not verify for " + t[i].id});
    }
    if (i == 0) continue;
    if (t[i - 1].dst != t[i].src) {
      out.push_back({i, ViolationKind::kContinuity, t[i - 1].dst + " != " + t[i].src});
    }
    if (t[i].parent_hash != token_hash(t[i - 1])) {
      out.push_back({i, ViolationKind::kHashLink,
                     "parent_hash " + to_hex(t[i].parent_hash) + " != H(token " +
                         std::to_string(i - 1) + ")"});
    }
    if (!scope_narrows(t[i - 1].scope, t[i].scope)) {
      std::string extra;
      for (const auto& s : t[i].scope.minus(t[i - 1].scope)) extra += (extra.empty() ? "" : ",") + s;
      out.push_back({i, ViolationKind::kScopeEscalation, "scope adds " + extra});
    }
    if (!policy_preserved(t[0].policies, t[i].policies)) {
      std::string dropped;
      for (const auto& p : t[0].policies.minus(t[i].policies)) {
        dropped += (dropped.empty() ? "" : ",") + p;
      }
      out.push_back({i, ViolationKind::kPolicyDrop, "drops " + dropped});
    }
  }
  return out;
}

}  // namespace das
