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

#include <doctest.h>

#include <random>

#include "das/canonical.hpp"
#include "das/error.hpp"
#include "das/token.hpp"
#include "support.hpp"

using namespace das;
using das::testing::random_token;

TEST_SUITE("token-core") {

TEST_CASE("canonical bytes do not depend on insertion order") {
  DelegationToken a;
  a.id = "t1";
  a.src = "alice";
  a.dst = "IntakeAgent";
  a.intent.text = "process benefits";
  a.expires_at = 1000;
  DelegationToken b = a;
  a.scope.insert("read_records");
  a.scope.insert("query_eligibility");
  b.scope.insert("query_eligibility");
  b.scope.insert("read_records");
  CHECK(canonical_serialize(a) == canonical_serialize(b));

  b.scope = ScopeSet{"read_records"};
  CHECK(canonical_serialize(a) != canonical_serialize(b));
}

TEST_CASE("serialize, parse, serialize is the identity over random tokens") {
  std::mt19937_64 rng(1);
  KeyStore keys(SigningKey::generate());
  for (int i = 0; i < 1000; ++i) {
    DelegationToken t = random_token(rng);
    if (i % 2) t = sign_token(t, keys);
    std::string bytes = canonical_serialize_signed(t);
    DelegationToken back = parse_token(bytes);
    REQUIRE(back == t);
    REQUIRE(canonical_serialize_signed(back) == bytes);
    REQUIRE(from_wire(to_wire(t)) == t);
  }
}

TEST_CASE("parser rejects non-canonical input") {
  std::mt19937_64 rng(2);
  DelegationToken t = random_token(rng);
  std::string bytes = canonical_serialize_signed(t);
  CHECK_THROWS_AS(parse_token(bytes + "x"), Error);
  CHECK_THROWS_AS(parse_token(bytes.substr(0, bytes.size() - 1)), Error);
  // Swapping the first two dict keys breaks the ordering rule.
  CHECK_THROWS_AS(canon::decode("d1:bi1e1:ai1ee"), Error);
  CHECK_THROWS_AS(canon::decode("i01e"), Error);
  CHECK_THROWS_AS(canon::decode("i-0e"), Error);
  CHECK(canon::decode("d1:ai1e1:bi2ee") ==
        canon::Value(canon::Dict{{"a", std::int64_t{1}}, {"b", std::int64_t{2}}}));
}

TEST_CASE("token hash is deterministic and covers every field") {
  std::mt19937_64 rng(3);
  KeyStore keys(SigningKey::generate());
  DelegationToken t = sign_token(random_token(rng), keys);
  CHECK(token_hash(t) == token_hash(t));
  DelegationToken u = t;
  u.expires_at += 1;
  CHECK(token_hash(u) != token_hash(t));
  u = t;
  u.signatures[0].mac[0] ^= 1;
  CHECK(token_hash(u) != token_hash(t));
}

TEST_CASE("sign and verify") {
  std::mt19937_64 rng(4);
  KeyStore keys(SigningKey::generate());
  KeyStore other(SigningKey::generate());
  DelegationToken t = sign_token(random_token(rng), keys);
  CHECK(verify_signature(t, keys));
  CHECK_FALSE(verify_signature(t, other));

  DelegationToken tampered = t;
  tampered.dst += "x";
  CHECK_FALSE(verify_signature(tampered, keys));

  KeyStore empty;
  CHECK_THROWS_AS(sign_token(t, empty), Error);
  try {
    sign_token(t, empty);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kKeyUnavailable);
  }
}

TEST_CASE("single-bit corruption of payload or MAC never verifies") {
  std::mt19937_64 rng(5);
  KeyStore keys(SigningKey::generate());
  for (int i = 0; i < 200; ++i) {
    DelegationToken t = sign_token(random_token(rng), keys);
    // Corrupt the MAC.
    DelegationToken bad_mac = t;
    std::size_t bit = rng() % (bad_mac.signatures[0].mac.size() * 8);
    bad_mac.signatures[0].mac[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    REQUIRE_FALSE(verify_signature(bad_mac, keys));

    // Corrupt the payload bytes; anything that still parses must fail to verify.
    std::string bytes = canonical_serialize_signed(t);
    std::size_t pos = rng() % bytes.size();
    bytes[pos] = static_cast<char>(bytes[pos] ^ (1 << (rng() % 8)));
    try {
      DelegationToken parsed = parse_token(bytes);
      if (canonical_serialize(parsed) != canonical_serialize(t)) {
        REQUIRE_FALSE(verify_signature(parsed, keys));
      }
    } catch (const Error&) {
    }
  }
}

TEST_CASE("scope_narrows agrees with a direct subset oracle") {
  const std::vector<std::string> u{"a", "b", "c", "d"};
  int checked = 0;
  for (unsigned pm = 0; pm < 16; ++pm) {
    for (unsigned cm = 0; cm < 16; ++cm) {
      ScopeSet parent, child;
      for (unsigned i = 0; i < 4; ++i) {
        if (pm >> i & 1) parent.insert(u[i]);
        if (cm >> i & 1) child.insert(u[i]);
      }
      bool oracle = (cm & ~pm) == 0;
      REQUIRE(scope_narrows(parent, child) == oracle);
      ++checked;
    }
  }
  CHECK(checked == 256);
  CHECK(scope_narrows(ScopeSet{"read_records", "query_eligibility"}, ScopeSet{"read_records"}));
  CHECK_FALSE(scope_narrows(ScopeSet{"read_records"}, ScopeSet{"read_records", "write_records"}));
}

TEST_CASE("scope narrowing is transitive over random triples") {
  std::mt19937_64 rng(6);
  const auto& u = das::testing::scope_universe();
  for (int i = 0; i < 1000; ++i) {
    auto a = das::testing::random_subset<ScopeSet>(rng, u);
    auto b = das::testing::random_subset<ScopeSet>(rng, u);
    auto c = das::testing::random_subset<ScopeSet>(rng, u);
    if (scope_narrows(a, b) && scope_narrows(b, c)) REQUIRE(scope_narrows(a, c));
  }
}

TEST_CASE("policy_preserved") {
  CHECK(policy_preserved(PolicySet{"AC-6"}, PolicySet{"AC-6", "SC-7"}));
  CHECK(policy_preserved(PolicySet{"AC-6"}, PolicySet{"AC-6"}));
  CHECK_FALSE(policy_preserved(PolicySet{"AC-6", "AU-2"}, PolicySet{"AC-6"}));
}

TEST_CASE("narrow_manifest restricts to the child scope") {
  ToolManifest parent;
  ApiOperation query{HttpMethod::kGet, "/api/records/query"};
  ApiOperation check{HttpMethod::kGet, "/api/eligibility/check"};
  parent.entries["read_records"] = {query};
  parent.entries["query_eligibility"] = {check};
  parent.risk_tiers[query] = RiskTier::kMedium;
  parent.risk_tiers[check] = RiskTier::kMedium;

  ToolManifest child = narrow_manifest(parent, ScopeSet{"read_records"});
  CHECK(child.entries.size() == 1);
  CHECK(child.entries.at("read_records") == std::set<ApiOperation>{query});
  CHECK(child.risk_tiers.size() == 1);
  CHECK(child.risk_tiers.at(query) == RiskTier::kMedium);

  CHECK(narrow_manifest(parent, ScopeSet{"read_records", "query_eligibility"}) == parent);
  CHECK_THROWS_AS(narrow_manifest(parent, ScopeSet{"write_records"}), Error);
}

TEST_CASE("narrowed manifests are subsets of their parent") {
  std::mt19937_64 rng(7);
  const auto& u = das::testing::scope_universe();
  for (int i = 0; i < 500; ++i) {
    auto scope = das::testing::random_subset<ScopeSet>(rng, u);
    ToolManifest parent = das::testing::random_manifest(rng, scope);
    auto child_scope = das::testing::random_subset<ScopeSet>(rng, {scope.begin(), scope.end()});
    ToolManifest child = narrow_manifest(parent, child_scope);
    auto parent_ops = parent.operations();
    for (const auto& [s, ops] : child.entries) {
      REQUIRE(child_scope.contains(s));
      for (const auto& op : ops) {
        REQUIRE(parent_ops.count(op) == 1);
        REQUIRE(parent.entries.at(s).count(op) == 1);
      }
    }
    // Monotone in the scope argument.
    auto smaller = das::testing::random_subset<ScopeSet>(rng, {child_scope.begin(), child_scope.end()});
    auto child_ops = child.operations();
    for (const auto& op : narrow_manifest(parent, smaller).operations()) {
      REQUIRE(child_ops.count(op) == 1);
    }
  }
}

TEST_CASE("path normalization") {
  auto ok = [](std::string_view raw) { return normalize_path(raw).path.value_or("<malformed>"); };
  CHECK(ok("/api/records/query") == "/api/records/query");
  CHECK(ok("/API//Records///Query/") == "/api/records/query");
  CHECK(ok("/api/records/%71uery") == "/api/records/query");
  CHECK_FALSE(normalize_path("/api/records/../admin").path);
  CHECK_FALSE(normalize_path("/api/records/%2e%2e/admin").path);
  CHECK_FALSE(normalize_path("/api/records/%2fadmin").path);
  CHECK_FALSE(normalize_path("/api/records/%252e%252e/admin").path);
  CHECK_FALSE(normalize_path("/api/records/query?_method=POST").path);
  CHECK_FALSE(normalize_path("/api/records\\query").path);
  CHECK_FALSE(normalize_path("/api/r\xc3\xa9" "cords").path);
  CHECK_FALSE(normalize_path("/api/records/query%").path);
  CHECK_FALSE(normalize_path("api/records").path);
  CHECK_FALSE(normalize_path(std::string(kMaxPathLength + 1, 'a')).path);
}

TEST_CASE("normalization is idempotent on random paths") {
  std::mt19937_64 rng(8);
  static const char kChars[] = "/abcXYZ.%2e5fF?#\\ ";
  for (int i = 0; i < 5000; ++i) {
    std::string raw;
    for (int j = 0, n = 1 + static_cast<int>(rng() % 24); j < n; ++j) {
      raw.push_back(kChars[rng() % (sizeof(kChars) - 1)]);
    }
    auto once = normalize_path(raw);
    if (!once.path) continue;
    auto twice = normalize_path(*once.path);
    REQUIRE(twice.path);
    REQUIRE(*twice.path == *once.path);
  }
}

TEST_CASE("wildcards match exactly one further segment") {
  ApiOperation pattern = ApiOperation::parse("GET /api/documents/*");
  CHECK(operation_matches(pattern, {HttpMethod::kGet, "/api/documents/42"}));
  CHECK_FALSE(operation_matches(pattern, {HttpMethod::kGet, "/api/documents"}));
  CHECK_FALSE(operation_matches(pattern, {HttpMethod::kGet, "/api/documents/42/raw"}));
  CHECK_FALSE(operation_matches(pattern, {HttpMethod::kPost, "/api/documents/42"}));
  CHECK_FALSE(operation_matches(pattern, {HttpMethod::kGet, "/api/documentsx/42"}));
  CHECK_THROWS_AS(ApiOperation::parse("GET /api/*/x"), Error);
  CHECK_THROWS_AS(ApiOperation::parse("GET /api/Records"), Error);
  CHECK_THROWS_AS(ApiOperation::parse("FETCH /api/records"), Error);
}

}  // TEST_SUITE
