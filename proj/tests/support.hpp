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

// Random generators shared by the property tests. Everything is seeded so a
// failing case can be replayed.

#include <random>
#include <string>
#include <vector>

#include "das/token.hpp"

namespace das::testing {

inline const std::vector<std::string>& scope_universe() {
  static const std::vector<std::string> u{"read_records", "query_eligibility", "write_records",
                                          "send_notice", "read_public", "generate_report"};
  return u;
}

inline const std::vector<std::string>& control_universe() {
  static const std::vector<std::string> u{"AC-2", "AC-3", "AC-6", "AC-17", "AU-2",
                                          "AU-12", "SC-7", "SC-8", "IA-2", "SI-4"};
  return u;
}

inline std::string random_word(std::mt19937_64& rng, std::size_t max_len = 10) {
  static const char kAlpha[] = "abcdefghijklmnopqrstuvwxyz0123456789_-";
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(kAlpha) - 2);
  std::string out;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) out.push_back(kAlpha[pick(rng)]);
  return out;
}

template <class Set>
Set random_subset(std::mt19937_64& rng, const std::vector<std::string>& universe) {
  Set out;
  for (const auto& item : universe) {
    if (rng() & 1) out.insert(item);
  }
  return out;
}

inline ApiOperation op_for(const std::string& scope, int variant) {
  static const HttpMethod kMethods[] = {HttpMethod::kGet, HttpMethod::kPost, HttpMethod::kPut,
                                        HttpMethod::kPatch, HttpMethod::kDelete};
  return ApiOperation{kMethods[variant % 5], "/api/" + scope + "/op" + std::to_string(variant)};
}

// A manifest with 1-3 operations per scope; ops are disjoint across scopes.
inline ToolManifest random_manifest(std::mt19937_64& rng, const ScopeSet& scope) {
  ToolManifest m;
  for (const auto& s : scope) {
    int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) {
      ApiOperation op = op_for(s, static_cast<int>(rng() % 7));
      m.entries[s].insert(op);
      m.risk_tiers[op] = static_cast<RiskTier>(rng() % 3);
    }
  }
  return m;
}

inline OutputSchema random_schema(std::mt19937_64& rng, const ScopeSet& scope) {
  OutputSchema o;
  for (const auto& s : scope) {
    TagSet tags;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 3); i < n; ++i) tags.insert(random_word(rng));
    o.permitted_tags[s] = tags;
  }
  return o;
}

inline DelegationToken random_token(std::mt19937_64& rng) {
  DelegationToken t;
  t.id = random_word(rng, 32);
  t.src = random_word(rng);
  t.dst = random_word(rng);
  t.scope = random_subset<ScopeSet>(rng, scope_universe());
  t.policies = random_subset<PolicySet>(rng, control_universe());
  t.intent.text = random_word(rng, 40) + " " + random_word(rng, 20);
  if (rng() & 1) {
    std::normal_distribution<double> d;
    std::vector<double> v(1 + rng() % 8);
    for (auto& x : v) x = d(rng);
    t.intent.vector = v;
  }
  t.manifest = random_manifest(rng, t.scope);
  t.output_schema = random_schema(rng, t.scope);
  if (rng() & 1) {
    for (auto& b : t.parent_hash) b = static_cast<std::uint8_t>(rng());
  }
  t.expires_at = static_cast<std::int64_t>(rng() % 4'000'000'000'000ULL);
  return t;
}

}  // namespace das::testing

namespace das::testing {

// Hand-built chains, independent of the service's issuance path.
inline DelegationToken make_root(const std::string& id, const ScopeSet& scope,
                                 const PolicySet& policies, const KeyStore& keys) {
  DelegationToken t;
  t.id = id;
  t.src = "user";
  t.dst = "agent-" + id;
  t.scope = scope;
  t.intent.text = "root goal";
  t.policies = policies;
  for (const auto& s : scope) {
    ApiOperation op{HttpMethod::kGet, "/api/" + s};
    t.manifest.entries[s] = {op};
    t.manifest.risk_tiers[op] = RiskTier::kMedium;
  }
  t.expires_at = 4'000'000'000'000;
  return sign_token(t, keys);
}

inline DelegationToken make_child(const DelegationToken& parent, const std::string& id,
                                  const ScopeSet& scope, const PolicySet& policies,
                                  const KeyStore& keys) {
  DelegationToken t;
  t.id = id;
  t.src = parent.dst;
  t.dst = "agent-" + id;
  t.scope = scope;
  t.intent.text = "subtask " + id;
  t.policies = policies;
  for (const auto& s : scope) {
    ApiOperation op{HttpMethod::kGet, "/api/" + s};
    t.manifest.entries[s] = {op};
    t.manifest.risk_tiers[op] = RiskTier::kMedium;
  }
  t.parent_hash = token_hash(parent);
  t.expires_at = parent.expires_at;
  return sign_token(t, keys);
}

}  // namespace das::testing
