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
#include <set>

#include "das/error.hpp"
#include "das/policy.hpp"
#include "das/service.hpp"
#include "support.hpp"

using namespace das;

TEST_SUITE("policy-compliance") {

TEST_CASE("shipped tables have the published shape") {
  const auto& controls = control_mappings();
  CHECK(controls.size() == 20);
  std::set<std::string> families, ids;
  for (const auto& c : controls) {
    families.insert(control_family(c.control_id));
    ids.insert(c.control_id);
  }
  CHECK(families.size() == 9);
  CHECK(ids.size() == 20);
  CHECK(families == std::set<std::string>{"AC", "AU", "CA", "IA", "IR", "PM", "SA", "SC", "SI"});

  const auto& asi = asi_mappings();
  CHECK(asi.size() == 10);
  int partial = 0;
  for (const auto& a : asi) partial += a.coverage == Coverage::kPartial;
  CHECK(partial == 1);
  CHECK(asi.front().asi_id == "ASI01");
  CHECK(asi.front().coverage == Coverage::kPartial);
}

TEST_CASE("loaders reject malformed tables") {
  CHECK_THROWS_AS(load_control_mappings(R"({"controls": []})"), Error);
  CHECK_THROWS_AS(load_control_mappings("not json"), Error);
  CHECK_THROWS_AS(load_asi_mappings(R"({"risks": [{"asi_id": "ASI01", "risk_name": "x",
      "properties": [], "coverage": "SOMETIMES"}]})"), Error);
}

TEST_CASE("apply_boundary_policies") {
  BoundaryPolicyTable table;
  table.set("AgencyA", "ContractorB", PolicySet{"SC-7", "AC-17"});
  CHECK(apply_boundary_policies(PolicySet{"AC-6"}, "AgencyA", "ContractorB", table) ==
        PolicySet{"AC-6", "SC-7", "AC-17"});
  CHECK(apply_boundary_policies(PolicySet{"AC-6"}, "AgencyA", "AgencyA", table) ==
        PolicySet{"AC-6"});
  CHECK(table.lookup("nowhere", "else").empty());
}

TEST_CASE("boundary crossings only grow the policy set") {
  std::mt19937_64 rng(21);
  const auto& u = das::testing::control_universe();
  std::vector<std::string> orgs{"A", "B", "C", "D"};
  BoundaryPolicyTable table;
  for (const auto& a : orgs) {
    for (const auto& b : orgs) {
      if (rng() % 3) table.set(a, b, das::testing::random_subset<PolicySet>(rng, u));
    }
  }
  for (int i = 0; i < 1000; ++i) {
    auto parent = das::testing::random_subset<PolicySet>(rng, u);
    const auto& src = orgs[rng() % orgs.size()];
    const auto& dst = orgs[rng() % orgs.size()];
    auto result = apply_boundary_policies(parent, src, dst, table);
    REQUIRE(parent.is_subset_of(result));
    // Union oracle.
    std::set<std::string> expected(parent.begin(), parent.end());
    for (const auto& c : table.lookup(src, dst)) expected.insert(c);
    REQUIRE(result.items() == expected);
  }
}

TEST_CASE("check_chain_compliance") {
  KeyStore keys(SigningKey::generate());
  PolicySet root_p{"AC-6", "AU-2"};
  auto t0 = das::testing::make_root("t0", ScopeSet{"a", "b"}, root_p, keys);
  auto t1 = das::testing::make_child(t0, "t1", ScopeSet{"a"}, PolicySet{"AC-6", "AU-2", "SC-7"}, keys);
  auto t2 = das::testing::make_child(t1, "t2", ScopeSet{"a"}, PolicySet{"AC-6", "SC-7"}, keys);

  CHECK(check_chain_compliance({{t0, t1}}).empty());
  auto v = check_chain_compliance({{t0, t1, t2}});
  REQUIRE(v.size() == 1);
  CHECK(v[0].index == 2);
  CHECK(v[0].token_id == "t2");
  CHECK(v[0].dropped == PolicySet{"AU-2"});

  CHECK_THROWS_AS(check_chain_compliance({{t0, t2}}), Error);
}

TEST_CASE("set-difference oracle over random chains") {
  std::mt19937_64 rng(22);
  KeyStore keys(SigningKey::generate());
  const auto& u = das::testing::control_universe();
  for (int n = 0; n < 200; ++n) {
    std::vector<DelegationToken> chain{
        das::testing::make_root("r", ScopeSet{"a"}, das::testing::random_subset<PolicySet>(rng, u), keys)};
    for (int i = 1, depth = 1 + static_cast<int>(rng() % 5); i <= depth; ++i) {
      chain.push_back(das::testing::make_child(chain.back(), "c" + std::to_string(i), ScopeSet{"a"},
                                               das::testing::random_subset<PolicySet>(rng, u), keys));
    }
    auto v = check_chain_compliance({chain});
    std::size_t k = 0;
    for (std::size_t i = 1; i < chain.size(); ++i) {
      std::set<std::string> dropped;
      for (const auto& c : chain[0].policies) {
        if (!chain[i].policies.contains(c)) dropped.insert(c);
      }
      if (dropped.empty()) continue;
      REQUIRE(k < v.size());
      REQUIRE(v[k].index == i);
      REQUIRE(v[k].dropped.items() == dropped);
      ++k;
    }
    REQUIRE(k == v.size());
  }
}

TEST_CASE("walkthrough chain is compliant and policy sets grow monotonically") {
  ManualClock clock;
  DasOptions opts;
  opts.clock = &clock;
  Das das(opts);
  auto t0 = das.initiate_chain("citizen-benefits", "process disability benefits applications");
  auto out = das.delegate({t0.id, "RecordsAgent", ScopeSet{"read_records"},
                           "retrieve applicant records", std::nullopt, std::nullopt});
  REQUIRE(out.issued());
  auto chain = das.reconstruct(out.token->id);
  CHECK(check_chain_compliance(chain).empty());
  CHECK(t0.policies.is_subset_of(out.token->policies));
  CHECK(out.token->policies.contains("SC-7"));
  CHECK(out.token->policies.contains("AC-17"));
}

}  // TEST_SUITE
