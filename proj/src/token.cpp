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

#include "das/token.hpp"

#include <charconv>

#include "das/canonical.hpp"
#include "das/error.hpp"

namespace das {

namespace {

constexpr std::int64_t kFormatVersion = 1;

template <class Range>
canon::List string_list(const Range& items) {
  canon::List out;
  for (const auto& s : items) out.emplace_back(std::string(s));
  return out;
}

// Sets must arrive strictly ascending; anything else would not re-encode to
// the same bytes.
std::set<std::string> parse_sorted_set(const canon::Value& v) {
  std::set<std::string> out;
  const std::string* previous = nullptr;
  for (const auto& item : v.as_list()) {
    const std::string& s = item.as_string();
    if (previous != nullptr && !(*previous < s)) {
      fail(ErrorCode::kParseError, "set elements not strictly ascending");
    }
    previous = &s;
    out.insert(s);
  }
  return out;
}

std::string double_to_text(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, ptr);
}

double text_to_double(const std::string& s) {
  double d = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::kParseError, "bad intent vector component: " + s);
  }
  return d;
}

canon::Dict payload_dict(const DelegationToken& t) {
  canon::Dict intent{{"text", t.intent.text}};
  if (t.intent.vector) {
    canon::List components;
    for (double d : *t.intent.vector) components.emplace_back(double_to_text(d));
    intent.emplace("vector", std::move(components));
  }

  canon::Dict entries;
  for (const auto& [scope, ops] : t.manifest.entries) {
    std::set<std::string> names;
    for (const auto& op : ops) names.insert(op.to_string());
    entries.emplace(scope, string_list(names));
  }
  canon::Dict tiers;
  for (const auto& [op, tier] : t.manifest.risk_tiers) {
    tiers.emplace(op.to_string(), std::string(tier_name(tier)));
  }
  canon::Dict schema;
  for (const auto& [scope, tags] : t.output_schema.permitted_tags) {
    schema.emplace(scope, string_list(tags));
  }

  return canon::Dict{
      {"dst", t.dst},
      {"expires_at", t.expires_at},
      {"id", t.id},
      {"intent", std::move(intent)},
      {"manifest", canon::Dict{{"entries", std::move(entries)},
                               {"risk_tiers", std::move(tiers)}}},
      {"output_schema", std::move(schema)},
      {"parent_hash", to_hex(t.parent_hash)},
      {"policies", string_list(t.policies)},
      {"scope", string_list(t.scope)},
      {"src", t.src},
      {"version", kFormatVersion},
  };
}

canon::List signature_list(const DelegationToken& t) {
  canon::List out;
  for (const auto& sig : t.signatures) {
    out.emplace_back(canon::Dict{{"key_id", sig.key_id}, {"mac", to_hex(sig.mac)}});
  }
  return out;
}

}  // namespace

std::optional<ApiOperation> ToolManifest::match(const ScopeSet& scopes,
                                                const ApiOperation& op) const {
  for (const auto& scope : scopes) {
    auto it = entries.find(scope);
    if (it == entries.end()) continue;
    for (const auto& pattern : it->second) {
      if (operation_matches(pattern, op)) return pattern;
    }
  }
  return std::nullopt;
}

std::set<ApiOperation> ToolManifest::operations() const {
  std::set<ApiOperation> out;
  for (const auto& [scope, ops] : entries) out.insert(ops.begin(), ops.end());
  return out;
}

TagSet OutputSchema::permitted_for(const ScopeSet& scopes) const {
  TagSet out;
  for (const auto& scope : scopes) {
    auto it = permitted_tags.find(scope);
    if (it != permitted_tags.end()) out = out.united(it->second);
  }
  return out;
}

SigningKey SigningKey::from_secret(Bytes secret) {
  Digest fp = sha256(std::string_view(reinterpret_cast<const char*>(secret.data()),
                                      secret.size()));
  return SigningKey{"k" + to_hex(fp).substr(0, 16), std::move(secret)};
}

SigningKey SigningKey::generate() { return from_secret(random_bytes(32)); }

void KeyStore::set_active(SigningKey key) {
  add_verification_key(key);
  active_ = std::move(key);
}

void KeyStore::add_verification_key(SigningKey key) {
  if (find(key.key_id) == nullptr) verification_.push_back(std::move(key));
}

const SigningKey* KeyStore::find(const std::string& key_id) const {
  for (const auto& k : verification_) {
    if (k.key_id == key_id) return &k;
  }
  return nullptr;
}

std::string canonical_serialize(const DelegationToken& token) {
  return canon::encode(payload_dict(token));
}

std::string canonical_serialize_signed(const DelegationToken& token) {
  canon::Dict d = payload_dict(token);
  d.emplace("signatures", signature_list(token));
  return canon::encode(d);
}

DelegationToken parse_token(std::string_view bytes) {
  canon::Value root = canon::decode(bytes);
  const canon::Dict& d = root.as_dict();
  if (canon::field(d, "version").as_int() != kFormatVersion) {
    fail(ErrorCode::kParseError, "unsupported token format version");
  }
  for (const auto& [key, value] : d) {
    static const std::set<std::string> kKnown{
        "dst",          "expires_at", "id",       "intent", "manifest",
        "output_schema", "parent_hash", "policies", "scope",  "signatures",
        "src",          "version"};
    if (!kKnown.count(key)) fail(ErrorCode::kParseError, "unknown token field: " + key);
  }

  DelegationToken t;
  t.id = canon::field(d, "id").as_string();
  t.src = canon::field(d, "src").as_string();
  t.dst = canon::field(d, "dst").as_string();
  t.expires_at = canon::field(d, "expires_at").as_int();
  t.scope = ScopeSet(parse_sorted_set(canon::field(d, "scope")));
  t.policies = PolicySet(parse_sorted_set(canon::field(d, "policies")));

  const canon::Dict& intent = canon::field(d, "intent").as_dict();
  t.intent.text = canon::field(intent, "text").as_string();
  if (auto it = intent.find("vector"); it != intent.end()) {
    std::vector<double> components;
    for (const auto& c : it->second.as_list()) {
      components.push_back(text_to_double(c.as_string()));
    }
    t.intent.vector = std::move(components);
  }

  const canon::Dict& manifest = canon::field(d, "manifest").as_dict();
  for (const auto& [scope, ops] : canon::field(manifest, "entries").as_dict()) {
    auto& target = t.manifest.entries[scope];
    for (const auto& name : parse_sorted_set(ops)) target.insert(ApiOperation::parse(name));
  }
  for (const auto& [op, tier] : canon::field(manifest, "risk_tiers").as_dict()) {
    auto parsed = parse_tier(tier.as_string());
    if (!parsed) fail(ErrorCode::kParseError, "bad risk tier for " + op);
    t.manifest.risk_tiers.emplace(ApiOperation::parse(op), *parsed);
  }
  for (const auto& [scope, tags] : canon::field(d, "output_schema").as_dict()) {
    t.output_schema.permitted_tags.emplace(scope, TagSet(parse_sorted_set(tags)));
  }

  auto parent = digest_from_hex(canon::field(d, "parent_hash").as_string());
  if (!parent) fail(ErrorCode::kParseError, "bad parent_hash");
  t.parent_hash = *parent;

  if (auto it = d.find("signatures"); it != d.end()) {
    for (const auto& item : it->second.as_list()) {
      const canon::Dict& sig = item.as_dict();
      auto mac = from_hex(canon::field(sig, "mac").as_string());
      if (!mac) fail(ErrorCode::kParseError, "bad signature mac");
      t.signatures.push_back({canon::field(sig, "key_id").as_string(), std::move(*mac)});
    }
  }
  return t;
}

std::string to_wire(const DelegationToken& token) {
  return base64_encode(canonical_serialize_signed(token));
}

DelegationToken from_wire(std::string_view base64) {
  auto bytes = base64_decode(base64);
  if (!bytes) fail(ErrorCode::kParseError, "token wire form is not base64");
  return parse_token(*bytes);
}

Digest token_hash(const DelegationToken& token) {
  return sha256(canonical_serialize_signed(token));
}

Signature mac_token(const DelegationToken& token, const SigningKey& key) {
  Digest mac = hmac_sha256(key.secret, canonical_serialize(token));
  return Signature{key.key_id, Bytes(mac.begin(), mac.end())};
}

DelegationToken sign_token(DelegationToken token, const KeyStore& keys) {
  const SigningKey* key = keys.active();
  if (key == nullptr) fail(ErrorCode::kKeyUnavailable, "no active signing key");
  token.signatures = {mac_token(token, *key)};
  return token;
}

bool verify_signature(const DelegationToken& token, const KeyStore& keys) {
  if (token.signatures.empty()) return false;
  std::string payload = canonical_serialize(token);
  for (const auto& sig : token.signatures) {
    const SigningKey* key = keys.find(sig.key_id);
    if (key == nullptr) continue;
    Digest expected = hmac_sha256(key->secret, payload);
    if (constant_time_equal(expected, sig.mac)) return true;
  }
  return false;
}

bool scope_narrows(const ScopeSet& parent, const ScopeSet& child) {
  return child.is_subset_of(parent);
}

bool policy_preserved(const PolicySet& root, const PolicySet& descendant) {
  return root.is_subset_of(descendant);
}

ToolManifest narrow_manifest(const ToolManifest& parent, const ScopeSet& child_scope) {
  ToolManifest out;
  for (const auto& scope : child_scope) {
    auto it = parent.entries.find(scope);
    if (it == parent.entries.end()) {
      fail(ErrorCode::kScopeNotInParent, "scope '" + scope + "' has no parent manifest entry");
    }
    out.entries.emplace(scope, it->second);
    for (const auto& op : it->second) {
      if (auto tier = parent.risk_tiers.find(op); tier != parent.risk_tiers.end()) {
        out.risk_tiers.emplace(op, tier->second);
      }
    }
  }
  return out;
}

OutputSchema narrow_schema(const OutputSchema& parent, const ScopeSet& child_scope) {
  OutputSchema out;
  for (const auto& scope : child_scope) {
    if (auto it = parent.permitted_tags.find(scope); it != parent.permitted_tags.end()) {
      out.permitted_tags.emplace(scope, it->second);
    }
  }
  return out;
}

}  // namespace das
