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

#include <deque>
#include <map>
#include <random>

#include "das/cascade.hpp"
#include "das/error.hpp"
#include "support.hpp"

using namespace das;
using das::testing::make_child;
using das::testing::make_root;

TEST_SUITE("cascade") {

TEST_CASE("revoking a middle token takes its subtree only") {
  ManualClock clock;
  ChainStore store(clock);
  KeyStore keys(SigningKey::generate());
  auto t0 = make_root("t0", ScopeSet{"a"}, PolicySet{}, keys);
  auto t1 = make_child(t0, "t1", ScopeSet{"a"}, PolicySet{}, keys);
  auto t2 = make_child(t1, "t2", ScopeSet{"a"}, PolicySet{}, keys);
  for (const auto& t : {t0, t1, t2}) store.store_token(t);

  auto revoked = revoke_cascade("t1", store, "violation");
  CHECK(revoked == std::vector<std::string>{"t1", "t2"});
  CHECK_FALSE(store.is_revoked("t0"));
  CHECK(revoke_cascade("t2", store, "again") == std::vector<std::string>{"t2"});
  CHECK_THROWS_AS(revoke_cascade("zz", store, "x"), Error);
}

TEST_CASE("three-way tree of depth three") {
  ChainStore store;
  KeyStore keys(SigningKey::generate());
  std::vector<DelegationToken> level{make_root("r", ScopeSet{"a"}, PolicySet{}, keys)};
  store.store_token(level[0]);
  int n = 1;
  for (int depth = 1; depth < 3; ++depth) {
    std::vector<DelegationToken> next;
    for (const auto& p : level) {
      for (int k = 0; k < 3; ++k) {
        next.push_back(make_child(p, "n" + std::to_string(n++), ScopeSet{"a"}, PolicySet{}, keys));
        store.store_token(next.back());
      }
    }
    level = next;
  }
  CHECK(store.size() == 13);
  CHECK(revoke_cascade("r", store, "root compromised").size() == 13);
  CHECK(store.revoked_ids().size() == 13);
}

TEST_CASE("closure property over random trees") {
  std::mt19937_64 rng(51);
  KeyStore keys(SigningKey::generate());
  for (int round = 0; round < 200; ++round) {
    ChainStore store;
    std::vector<DelegationToken> tokens{make_root("r", ScopeSet{"a"}, PolicySet{}, keys)};
    std::map<std::string, std::vector<std::string>> kids;
    std::map<std::string, int> depth{{"r", 1}};
    store.store_token(tokens[0]);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto parent = tokens[i];
      if (depth[parent.id] >= 6) continue;
      for (int k = 0, fan = static_cast<int>(rng() % 4); k < fan; ++k) {
        std::string id = parent.id + "." + std::to_string(k);
        tokens.push_back(make_child(parent, id, ScopeSet{"a"}, PolicySet{}, keys));
        store.store_token(tokens.back());
        kids[parent.id].push_back(id);
        depth[id] = depth[parent.id] + 1;
      }
    }

    const auto& target = tokens[rng() % tokens.size()].id;
    bool propagate = rng() % 5 != 0;
    std::set<std::string> expected;
    std::deque<std::string> queue{target};
    while (!queue.empty()) {
      auto id = queue.front();
      queue.pop_front();
      expected.insert(id);
      if (propagate) for (const auto& c : kids[id]) queue.push_back(c);
    }

    auto returned = revoke_cascade(target, store, "random", propagate);
    REQUIRE(std::set<std::string>(returned.begin(), returned.end()) == expected);
    REQUIRE(returned.front() == target);
    for (const auto& t : tokens) REQUIRE(store.is_revoked(t.id) == (expected.count(t.id) > 0));
    if (propagate) {
      // Closed under children.
      for (const auto& id : store.revoked_ids()) {
        for (const auto& c : store.children_of(id)) REQUIRE(store.is_revoked(c));
      }
    }
  }
}

TEST_CASE("revocation view staleness") {
  ManualClock clock;
  ChainStore store(clock);
  KeyStore keys(SigningKey::generate());
  store.store_token(make_root("t", ScopeSet{"a"}, PolicySet{}, keys));
  RevocationView view(store, clock, 100);

  CHECK_FALSE(view.is_revoked("t", CheckMode::kHeartbeat));
  store.mark_revoked("t", "x");
  CHECK(view.is_revoked("t", CheckMode::kSynchronous));
  CHECK_FALSE(view.is_revoked("t", CheckMode::kHeartbeat));
  clock.advance(99);
  CHECK_FALSE(view.is_revoked("t", CheckMode::kHeartbeat));
  clock.advance(1);
  CHECK(view.is_revoked("t", CheckMode::kHeartbeat));
  CHECK(view.is_revoked("t", CheckMode::kAudit));
}

TEST_CASE("containment bounds") {
  CascadeConfig config;
  config.heartbeat = 5;
  auto high = containment_bound(RiskTier::kHigh, config, 2);
  CHECK(high.kind == ContainmentBound::Kind::kZero);
  auto medium = containment_bound(RiskTier::kMedium, config, 2);
  CHECK(medium.kind == ContainmentBound::Kind::kFinite);
  CHECK(medium.limit == 10);
  CHECK(containment_bound(RiskTier::kLow, config, 2).kind == ContainmentBound::Kind::kUntilAudit);
}

TEST_CASE("blast radius simulation meets each tier's bound") {
  std::mt19937_64 rng(52);
  for (std::int64_t h : {1, 5, 50, 100}) {
    auto r = simulate_blast_radius(RiskTier::kHigh, h, 3, 17, 400);
    CHECK(r.executed == 0);
    CHECK(r.attempted == 3 * (400 - 17 + 1));
  }
  // h = 5, throughput 2: at most 10 actions slip through after revocation.
  std::int64_t worst = 0;
  for (int i = 0; i < 100; ++i) {
    std::int64_t tick = static_cast<std::int64_t>(rng() % 200);
    auto r = simulate_blast_radius(RiskTier::kMedium, 5, 2, tick, 300);
    REQUIRE(r.executed <= 10);
    REQUIRE(r.flagged == r.executed);
    worst = std::max(worst, r.executed);
  }
  CHECK(worst > 0);

  auto low = simulate_blast_radius(RiskTier::kLow, 5, 2, 50, 300);
  CHECK(low.executed == low.attempted);
  CHECK(low.flagged == low.executed);
  CHECK(low.flagged == 2 * 251);
}

}  // TEST_SUITE
