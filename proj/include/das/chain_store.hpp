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

// Hash-indexed token store with an append-only audit log. The log doubles as
// the export format: one JSON object per line with ts, chain_id, token_id,
// event and detail. Issuance events carry the wire token and the hash it was
// indexed under, so a replayed store can detect edits to the file.

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "das/clock.hpp"
#include "das/token.hpp"

namespace das {

enum class TokenStatus { kActive, kRevoked, kExpired };
std::string_view token_status_name(TokenStatus s);

namespace audit_event {
inline constexpr std::string_view kIssued = "ISSUED";
inline constexpr std::string_view kRejected = "REJECTED";
inline constexpr std::string_view kRevoked = "REVOKED";
inline constexpr std::string_view kEnforce = "ENFORCE";
inline constexpr std::string_view kOutput = "OUTPUT";
inline constexpr std::string_view kNotify = "NOTIFY";
}  // namespace audit_event

struct AuditEvent {
  std::int64_t ts = 0;
  std::string chain_id;
  std::string token_id;
  std::string event;
  nlohmann::json detail = nlohmann::json::object();

  nlohmann::json to_json() const;
  static AuditEvent from_json(const nlohmann::json& j);
};

class ChainStore {
 public:
  // With a log path, events are appended to the file and any existing
  // content is replayed first.
  explicit ChainStore(const Clock& clock = SystemClock::instance(),
                      std::optional<std::filesystem::path> log_path = std::nullopt);
  ~ChainStore();
  ChainStore(const ChainStore&) = delete;
  ChainStore& operator=(const ChainStore&) = delete;

  // Rebuilds a store from an exported log. Tokens are indexed under the hash
  // recorded at issuance, not a recomputed one.
  static std::unique_ptr<ChainStore> from_export(std::string_view ndjson,
                                                 const Clock& clock = SystemClock::instance());

  // Throws kOrphanToken when the parent hash is neither ROOT nor stored and
  // kDuplicateToken when the hash or id is already present. Appends ISSUED.
  Digest store_token(const DelegationToken& token, nlohmann::json checks = nullptr,
                     bool durable = false);

  bool contains(const std::string& token_id) const;
  std::optional<DelegationToken> get(const std::string& token_id) const;
  std::optional<Digest> recorded_hash(const std::string& token_id) const;
  std::optional<nlohmann::json> issuance_checks(const std::string& token_id) const;
  std::string chain_id_of(const std::string& token_id) const;

  TokenStatus status(const std::string& token_id, std::int64_t now_ms) const;
  bool is_revoked(const std::string& token_id) const;
  std::vector<std::string> children_of(const std::string& token_id) const;

  // Idempotent; returns true when the token was newly revoked.
  bool mark_revoked(const std::string& token_id, const std::string& reason, bool durable = true);
  std::set<std::string> revoked_ids() const;
  std::uint64_t revocation_epoch() const { return revocation_epoch_.load(); }

  void append_event(AuditEvent event, bool durable = false);
  std::vector<AuditEvent> events() const;
  std::string export_ndjson() const;

  // Walks parent hashes from token_id to the root. With verify_integrity,
  // each token's recomputed hash must equal the hash it is indexed under,
  // otherwise kBrokenChain. Throws kUnknownToken.
  DelegationChain reconstruct(const std::string& token_id, bool verify_integrity = true) const;
  // No integrity check; stops at a missing parent or a cycle instead of
  // throwing, so the result may not start at a root. Throws kUnknownToken.
  DelegationChain reconstruct_partial(const std::string& token_id) const;

  // Hash-index probes made by reconstruct.
  std::uint64_t lookup_count() const { return lookups_.load(); }
  void reset_lookup_count() { lookups_ = 0; }

  std::size_t size() const;
  const Clock& clock() const { return clock_; }

 private:
  struct Entry {
    DelegationToken token;
    Digest hash{};
    std::string chain_id;
    bool revoked = false;
    nlohmann::json checks;
  };

  void insert_locked(std::shared_ptr<Entry> entry, bool check_parent);
  void write_line_locked(const AuditEvent& event, bool durable);
  void replay(std::string_view ndjson);

  const Clock& clock_;
  mutable std::shared_mutex mu_;
  std::map<Digest, std::shared_ptr<Entry>> by_hash_;
  std::map<std::string, Digest> by_id_;
  std::map<std::string, std::vector<std::string>> children_;
  std::vector<AuditEvent> events_;
  std::FILE* log_ = nullptr;
  bool replaying_ = false;
  mutable std::atomic<std::uint64_t> lookups_{0};
  std::atomic<std::uint64_t> revocation_epoch_{0};
};

enum class ViolationKind { kRoot, kContinuity, kHashLink, kSignature, kScopeEscalation, kPolicyDrop };
std::string_view violation_kind_name(ViolationKind k);

struct ChainViolation {
  std::size_t index = 0;
  ViolationKind kind = ViolationKind::kHashLink;
  std::string detail;
};

using SignatureVerifier = std::function<bool(const DelegationToken&)>;

// Checks every index: root sentinel on the first token, continuity, hash
// linking, signatures (skipped when verifier is empty), scope narrowing and
// root-policy preservation.
std::vector<ChainViolation> verify_chain(const DelegationChain& chain,
                                         const SignatureVerifier& verifier);

}  // namespace das
