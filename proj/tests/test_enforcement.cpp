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

#include <cctype>
#include <random>

#include "das/config.hpp"
#include "das/enforcement.hpp"
#include "das/error.hpp"
#include "support.hpp"

using namespace das;

namespace {

DelegationToken registry_token(const ScopeSet& scope) {
  auto config = DasConfig::defaults();
  DelegationToken t;
  t.id = "tok";
  t.scope = scope;
  t.manifest = config.manifest_for(scope);
  t.output_schema = config.schema_for(scope);
  return t;
}

EnforcementVerdict call(const DelegationToken& t, const std::string& method, const std::string& path,
                        TokenLiveness live = {}) {
  return enforce_scope(ApiCallAttempt::make(t.id, method, path), t, live);
}

AgentOutput output(const TagSet& tags) { return AgentOutput{"tok", "read_records", tags, "{}"}; }

}  // namespace

TEST_SUITE("enforcement") {

TEST_CASE("records agent manifest") {
  auto t = registry_token(ScopeSet{"read_records"});
  CHECK(call(t, "GET", "/api/records/query").allowed());
  CHECK(call(t, "get", "/API/Records//query/").allowed());
  CHECK(call(t, "GET", "/api/%72ecords/query").allowed());

  auto v = call(t, "POST", "/api/external/send");
  CHECK_FALSE(v.allowed());
  CHECK(v.reason == EnforcementReason::kNotInManifest);
  CHECK(v.offending == std::vector<std::string>{"POST /api/external/send"});

  CHECK(call(t, "POST", "/api/records/query").reason == EnforcementReason::kNotInManifest);
  CHECK(call(t, "GET", "/api/records/query/extra").reason == EnforcementReason::kNotInManifest);
  CHECK(call(t, "GET", "/api/records/../external/send").reason == EnforcementReason::kMalformedPath);
  CHECK(call(t, "GET", "/api/records/%2e%2e/external/send").reason == EnforcementReason::kMalformedPath);
  CHECK(call(t, "GET", "/api/records%2fquery").reason == EnforcementReason::kMalformedPath);
  CHECK(call(t, "GET", "/api/records/query?all=1").reason == EnforcementReason::kMalformedPath);
  CHECK(call(t, "GET", "/api/records/%252e%252e").reason == EnforcementReason::kMalformedPath);
  CHECK(call(t, "GE T", "/api/records/query").reason == EnforcementReason::kMalformedPath);
  CHECK(call(t, "TRACE", "/api/records/query").reason == EnforcementReason::kNotInManifest);
}

TEST_CASE("wildcard entries cover exactly one segment") {
  auto t = registry_token(ScopeSet{"read_documents"});
  CHECK(call(t, "GET", "/api/documents/a17").allowed());
  CHECK(call(t, "GET", "/api/documents/A17").allowed());
  CHECK_FALSE(call(t, "GET", "/api/documents").allowed());
  CHECK_FALSE(call(t, "GET", "/api/documents/").allowed());
  CHECK_FALSE(call(t, "GET", "/api/documents/a/b").allowed());
  CHECK(call(t, "GET", "/api/documents/a%2fb").reason == EnforcementReason::kMalformedPath);
}

TEST_CASE("revocation and expiry dominate") {
  auto t = registry_token(ScopeSet{"read_records"});
  CHECK(call(t, "GET", "/api/records/query", {true, false}).reason == EnforcementReason::kTokenRevoked);
  CHECK(call(t, "GET", "/api/records/query", {true, true}).reason == EnforcementReason::kTokenRevoked);
  CHECK(call(t, "GET", "/api/records/query", {false, true}).reason == EnforcementReason::kTokenExpired);
  CHECK(call(t, "GET", "/x/../y", {true, false}).reason == EnforcementReason::kTokenRevoked);

  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    auto tok = das::testing::random_token(rng);
    auto ops = tok.manifest.operations();
    std::string path = ops.empty() ? "/" : ops.begin()->pattern;
    auto v = call(tok, "GET", path, {true, (rng() & 1) != 0});
    REQUIRE(v.reason == EnforcementReason::kTokenRevoked);
  }
}

TEST_CASE("risk tiers") {
  auto t = registry_token(ScopeSet{"read_records", "write_records", "read_public"});
  auto tier = [&](const char* m, const char* p) {
    return risk_tier_of(ApiCallAttempt::make("tok", m, p), t.manifest);
  };
  CHECK(tier("POST", "/api/records/update") == RiskTier::kHigh);
  CHECK(tier("GET", "/api/records/query") == RiskTier::kMedium);
  CHECK(tier("GET", "/api/public/holidays") == RiskTier::kLow);
  CHECK_THROWS_AS(tier("POST", "/api/external/send"), Error);
}

// Attempts are built from a known operation by a mutation whose effect on
// membership is known in advance, so the expected verdict never consults the
// normalizer under test.
TEST_CASE("whitelist soundness over mutated attempts") {
  std::mt19937_64 rng(32);
  enum Mutation { kSame, kCase, kSlashes, kEncodeLetter, kDotDot, kDot, kEncodedSlash,
                  kQuery, kDoubleEncoded, kOtherMethod, kExtraSegment, kCount };
  int allowed = 0, blocked = 0;
  for (int i = 0; i < 5000; ++i) {
    DelegationToken t;
    t.id = "t";
    t.scope = das::testing::random_subset<ScopeSet>(rng, das::testing::scope_universe());
    t.manifest = das::testing::random_manifest(rng, t.scope);

    // Pick an op from the whole universe so about half are out of scope.
    const auto& u = das::testing::scope_universe();
    ApiOperation base = das::testing::op_for(u[rng() % u.size()], static_cast<int>(rng() % 7));
    bool member = false;
    for (const auto& [s, ops] : t.manifest.entries) member = member || ops.count(base) > 0;

    std::string method(method_name(base.method));
    std::string path = base.pattern;
    bool expect_allow = member;
    auto mutation = static_cast<Mutation>(rng() % kCount);
    switch (mutation) {
      case kSame: break;
      case kCase:
        for (auto& c : path) if (rng() & 1) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        for (auto& c : method) if (rng() & 1) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        break;
      case kSlashes: path = "/" + path + "/"; break;
      case kEncodeLetter: {
        auto pos = path.find('a');
        if (pos != std::string::npos) path.replace(pos, 1, "%61");
        break;
      }
      case kDotDot: path = path + "/../x"; expect_allow = false; break;
      case kDot: path = "/./" + path.substr(1); expect_allow = false; break;
      case kEncodedSlash: path.replace(path.find('/', 1), 1, "%2F"); expect_allow = false; break;
      case kQuery: path += "?x=1"; expect_allow = false; break;
      case kDoubleEncoded: path += "/%2561"; expect_allow = false; break;
      case kOtherMethod: {
        HttpMethod other = static_cast<HttpMethod>((static_cast<int>(base.method) + 1) % 5);
        method = std::string(method_name(other));
        bool other_member = false;
        for (const auto& [s, ops] : t.manifest.entries) {
          other_member = other_member || ops.count(ApiOperation{other, base.pattern}) > 0;
        }
        expect_allow = other_member;
        break;
      }
      case kExtraSegment: path += "/more"; expect_allow = false; break;
      case kCount: break;
    }
    auto v = enforce_scope(ApiCallAttempt::make("t", method, path), t, {});
    INFO(method << " " << path);
    REQUIRE(v.allowed() == expect_allow);
    (v.allowed() ? allowed : blocked)++;
  }
  CHECK(allowed > 100);
  CHECK(blocked > 500);
}

TEST_CASE("output validation examples") {
  auto t = registry_token(ScopeSet{"read_records"});
  CHECK(validate_output(output(TagSet{"record_data"}), t).allowed());
  CHECK(validate_output(output(TagSet{"record_data", "count"}), t).allowed());

  auto v = validate_output(output(TagSet{"record_data", "demographic_profile"}), t);
  CHECK(v.reason == EnforcementReason::kTagNotPermitted);
  CHECK(v.offending == std::vector<std::string>{"demographic_profile"});

  CHECK(validate_output(output(TagSet{"Record_Data"}), t).reason == EnforcementReason::kTagNotPermitted);
  CHECK(validate_output(output(TagSet{}), t).reason == EnforcementReason::kEmptyTags);
}

TEST_CASE("default deny for tags outside every held scope") {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 2000; ++i) {
    DelegationToken t;
    t.scope = das::testing::random_subset<ScopeSet>(rng, das::testing::scope_universe());
    t.output_schema = das::testing::random_schema(rng, t.scope);
    // Schema entries for scopes the token does not hold must not leak in.
    t.output_schema.permitted_tags["not_held"] = TagSet{"leak"};

    std::set<std::string> permitted;
    for (const auto& s : t.scope) {
      for (const auto& tag : t.output_schema.permitted_tags[s]) permitted.insert(tag);
    }
    TagSet tags;
    bool expect_allow = true;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 4); k < n; ++k) {
      std::string tag;
      if (!permitted.empty() && rng() % 2) {
        auto it = permitted.begin();
        std::advance(it, rng() % permitted.size());
        tag = *it;
      } else {
        tag = rng() % 4 ? das::testing::random_word(rng) : "leak";
        expect_allow = expect_allow && permitted.count(tag) > 0;
      }
      tags.insert(tag);
    }
    auto v = validate_output(AgentOutput{"t", "", tags, ""}, t);
    REQUIRE(v.allowed() == expect_allow);
    for (const auto& o : v.offending) REQUIRE(permitted.count(o) == 0);
  }
}

}  // TEST_SUITE
