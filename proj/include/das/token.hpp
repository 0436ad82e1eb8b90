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

// Delegation tokens and the pure containment checks every other module
// builds on. All types here are immutable values once constructed.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "das/crypto.hpp"

namespace das {

// A set of opaque string identifiers. The tag keeps scopes, policy controls
// and output tags from being mixed up at compile time.
template <class Tag>
class StringSet {
 public:
  using const_iterator = std::set<std::string>::const_iterator;

  StringSet() = default;
  StringSet(std::initializer_list<std::string> items) : items_(items) {}
  template <class It>
  StringSet(It first, It last) : items_(first, last) {}
  explicit StringSet(std::set<std::string> items) : items_(std::move(items)) {}

  void insert(std::string item) { items_.insert(std::move(item)); }
  bool contains(const std::string& item) const { return items_.count(item) > 0; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }
  const std::set<std::string>& items() const { return items_; }

  bool is_subset_of(const StringSet& other) const {
    for (const auto& item : items_) {
      if (!other.contains(item)) return false;
    }
    return true;
  }

  StringSet united(const StringSet& other) const {
    StringSet out = *this;
    out.items_.insert(other.items_.begin(), other.items_.end());
    return out;
  }

  // Elements of *this missing from other.
  StringSet minus(const StringSet& other) const {
    StringSet out;
    for (const auto& item : items_) {
      if (!other.contains(item)) out.items_.insert(item);
    }
    return out;
  }

  bool operator==(const StringSet&) const = default;

 private:
  std::set<std::string> items_;
};

using ScopeSet = StringSet<struct ScopeTag>;
using PolicySet = StringSet<struct PolicyTag>;
using TagSet = StringSet<struct OutputTag>;

enum class HttpMethod { kGet, kPost, kPut, kPatch, kDelete };

std::string_view method_name(HttpMethod m);
std::optional<HttpMethod> parse_method(std::string_view upper);

enum class RiskTier { kHigh, kMedium, kLow };

std::string_view tier_name(RiskTier t);
std::optional<RiskTier> parse_tier(std::string_view name);

// A method plus a normalized endpoint pattern. A pattern may end in a single
// "/*" segment, which matches exactly one further non-empty segment.
struct ApiOperation {
  HttpMethod method = HttpMethod::kGet;
  std::string pattern;

  // "GET /api/records/query"
  std::string to_string() const;
  bool is_wildcard() const;

  // Parses a manifest entry. Throws kParseError if the pattern is not already
  // in normal form (lowercase, no dot segments, no query, no empty segments).
  static ApiOperation parse(std::string_view text);

  auto operator<=>(const ApiOperation&) const = default;
};

// True when the concrete, normalized operation is covered by pattern.
bool operation_matches(const ApiOperation& pattern, const ApiOperation& concrete);

struct NormalizedPath {
  std::optional<std::string> path;  // set iff the input was well formed
  std::string error;
};

inline constexpr std::size_t kMaxPathLength = 4096;

// Percent-decodes once, rejects encoded separators, double encoding, dot
// segments, query strings, control and non-ASCII bytes; then lowercases and
// collapses empty segments. Idempotent on its own output.
NormalizedPath normalize_path(std::string_view raw);

struct ToolManifest {
  std::map<std::string, std::set<ApiOperation>> entries;  // scope -> ops
  std::map<ApiOperation, RiskTier> risk_tiers;

  // First pattern (in entry order) under any of the given scopes that covers op.
  std::optional<ApiOperation> match(const ScopeSet& scopes,
                                    const ApiOperation& op) const;
  std::set<ApiOperation> operations() const;
  bool operator==(const ToolManifest&) const = default;
};

struct OutputSchema {
  std::map<std::string, TagSet> permitted_tags;  // scope -> tags

  TagSet permitted_for(const ScopeSet& scopes) const;
  bool operator==(const OutputSchema&) const = default;
};

struct IntentRecord {
  std::string text;
  std::optional<std::vector<double>> vector;  // carried opaquely
  bool operator==(const IntentRecord&) const = default;
};

struct Signature {
  std::string key_id;
  Bytes mac;
  bool operator==(const Signature&) const = default;
};

struct DelegationToken {
  std::string id;
  std::string src;
  std::string dst;
  ScopeSet scope;
  IntentRecord intent;
  PolicySet policies;
  ToolManifest manifest;
  OutputSchema output_schema;
  Digest parent_hash = kRootHash;
  std::int64_t expires_at = 0;  // ms since epoch
  std::vector<Signature> signatures;

  bool is_root() const { return parent_hash == kRootHash; }
  bool operator==(const DelegationToken&) const = default;
};

struct DelegationChain {
  std::vector<DelegationToken> tokens;
  std::size_t depth() const { return tokens.size(); }
};

struct SigningKey {
  std::string key_id;
  Bytes secret;

  // key_id is derived from the secret so rotated keys get fresh ids.
  static SigningKey from_secret(Bytes secret);
  static SigningKey generate();
};

// Keys the DAS signs and verifies with. Verification keys include the active
// key plus any older generations still trusted.
class KeyStore {
 public:
  KeyStore() = default;
  explicit KeyStore(SigningKey active) { set_active(std::move(active)); }

  void set_active(SigningKey key);
  void clear_active() { active_.reset(); }
  void add_verification_key(SigningKey key);

  const SigningKey* active() const { return active_ ? &*active_ : nullptr; }
  const SigningKey* find(const std::string& key_id) const;

 private:
  std::optional<SigningKey> active_;
  std::vector<SigningKey> verification_;
};

// Payload bytes: every field except the signatures.
std::string canonical_serialize(const DelegationToken& token);
// Payload plus the signature set; this is what token_hash covers and what is
// carried on the wire.
std::string canonical_serialize_signed(const DelegationToken& token);
DelegationToken parse_token(std::string_view bytes);

std::string to_wire(const DelegationToken& token);  // base64
DelegationToken from_wire(std::string_view base64);

Digest token_hash(const DelegationToken& token);

Signature mac_token(const DelegationToken& token, const SigningKey& key);
// Replaces the signature set with one MAC from the store's active key.
DelegationToken sign_token(DelegationToken token, const KeyStore& keys);
// True if some attached signature verifies under a key the store knows.
bool verify_signature(const DelegationToken& token, const KeyStore& keys);

bool scope_narrows(const ScopeSet& parent, const ScopeSet& child);
bool policy_preserved(const PolicySet& root, const PolicySet& descendant);

// Restriction of the parent manifest to child_scope. Throws
// kScopeNotInParent when child_scope names a scope the parent has no entry for.
ToolManifest narrow_manifest(const ToolManifest& parent,
                             const ScopeSet& child_scope);
OutputSchema narrow_schema(const OutputSchema& parent,
                           const ScopeSet& child_scope);

}  // namespace das
