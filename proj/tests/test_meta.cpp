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

#include <algorithm>

#include "das/error.hpp"
#include "das/meta.hpp"

using namespace das;
using namespace das::meta;

namespace {

const std::vector<DamageEnvelope>& envelopes() {
  static const auto e = enumerate_evasions();
  return e;
}

bool subset(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::all_of(a.begin(), a.end(),
                     [&](const std::string& x) { return std::find(b.begin(), b.end(), x) != b.end(); });
}

}  // namespace

TEST_SUITE("meta-verifier") {

TEST_CASE("action universe") {
  const auto& u = action_universe();
  CHECK(u.size() == 11);
  CHECK(std::count_if(u.begin(), u.end(), [](const ActionSpec& a) { return a.baseline; }) == 4);
  CHECK_THROWS_AS(load_action_universe(R"({"actions": []})"), Error);
}

TEST_CASE("minimality matrix is diagonal") {
  auto rows = run_minimality_suite();
  REQUIRE(rows.size() == 7);
  for (const auto& r : rows) {
    INFO("A" << r.attack << ": " << r.with_all.detail << " / " << r.without_own.detail);
    CHECK(r.holds());
  }
  // Off-diagonal: A3 with only P1 disabled still fails.
  CHECK_FALSE(run_attack(3, Switchboard::all().with(1, false)).success);
  CHECK_FALSE(run_attack(7, Switchboard::all()).success);
  CHECK(is_diagonal(singleton_matrix(envelopes())));
}

TEST_CASE("every evasion envelope is bounded") {
  const auto& envs = envelopes();
  REQUIRE(envs.size() == 126);
  const auto& u = action_universe();
  std::set<std::set<int>> seen;
  for (const auto& e : envs) {
    seen.insert(e.evaded);
    REQUIRE(!e.evaded.empty());
    REQUIRE(e.evaded.size() <= 6);
    REQUIRE(e.strict_subset());
    // All four authorized actions remain available under every evasion.
    for (const auto& a : u) {
      if (!a.baseline) continue;
      REQUIRE(std::find(e.reachable.begin(), e.reachable.end(), a.id) != e.reachable.end());
    }
    // Documented mapping: capability i is reachable exactly when P_i is evaded.
    for (const auto& a : u) {
      if (a.baseline) continue;
      bool reached = std::find(e.reachable.begin(), e.reachable.end(), a.id) != e.reachable.end();
      REQUIRE(reached == (e.evaded.count(a.property) > 0));
    }
    REQUIRE(e.unauthorized == e.evaded.size());
    REQUIRE(e.fraction == doctest::Approx(static_cast<double>(e.evaded.size()) / 11.0));
    if (e.evaded.size() == 1) REQUIRE(e.fraction <= 1.0 / 11.0 + 1e-12);
  }
  CHECK(seen.size() == 126);

  // With nothing evaded only the authorized actions are reachable.
  auto none = compute_envelope({});
  CHECK(none.unauthorized == 0);
  CHECK(none.reachable.size() == 4);
  // Evading all seven is outside the enumeration and unconstrained.
  auto all = compute_envelope({1, 2, 3, 4, 5, 6, 7});
  CHECK(all.reachable.size() == 11);
}

TEST_CASE("envelopes are monotone in the evasion set") {
  const auto& envs = envelopes();
  for (const auto& a : envs) {
    for (const auto& b : envs) {
      if (std::includes(b.evaded.begin(), b.evaded.end(), a.evaded.begin(), a.evaded.end())) {
        REQUIRE(subset(a.reachable, b.reachable));
      }
    }
  }
}

TEST_CASE("composition suite") {
  auto scenarios = composition_scenarios();
  REQUIRE(scenarios.size() == 50);
  std::map<SharedMode, int> counts;
  for (const auto& s : scenarios) {
    counts[s.mode]++;
    if (s.mode == SharedMode::kWriteShared) {
      CHECK(!s.shared_resource.empty());
      CHECK(s.writer.has_value());
    }
  }
  CHECK(counts[SharedMode::kDisjoint] == 25);
  CHECK(counts[SharedMode::kReadShared] == 20);
  CHECK(counts[SharedMode::kWriteShared] == 5);

  auto off = run_composition_suite(scenarios, false);
  auto on = run_composition_suite(scenarios, true);
  CHECK(off.safe_count() == 45);
  CHECK(on.safe_count() == 50);
  for (const auto& r : off.results) CHECK(r.safe == (r.mode != SharedMode::kWriteShared));
  for (const auto& r : on.results) {
    CHECK(r.reverified == (r.mode == SharedMode::kWriteShared ? 1 : 0));
  }
}

TEST_CASE("write-impact notification revokes a chain that no longer verifies") {
  ManualClock clock;
  DasOptions o;
  o.clock = &clock;
  Das das(o);
  auto root = das.initiate_chain("citizen-benefits", "process disability benefits applications");
  auto reader = das.delegate({root.id, "RecordsAgent", ScopeSet{"read_records"}, "retrieve applicant records",
                              std::nullopt, 1000});
  auto writer_root = das.initiate_chain("supervisor", "review and update benefits records");
  REQUIRE(reader.issued());
  WriteImpactMonitor monitor(das, true);
  monitor.on_read(reader.token->id, "citizen/1");
  clock.advance(1000);  // the reader's token has expired by the time of the write
  auto touched = monitor.on_write(writer_root.id, "citizen/1");
  CHECK(touched == std::vector<std::string>{reader.token->id});
  CHECK(monitor.revoked() == 1);
  CHECK(das.store().is_revoked(reader.token->id));
}

TEST_CASE("ambiguity pairs") {
  LexicalClassifier classifier;
  auto report = run_ambiguity_suite(classifier, IntentConfig::defaults());
  REQUIRE(report.results.size() == 8);
  CHECK(report.keyword_hits() == 0);
  CHECK(ambiguity_pairs()[0].text == "Assess applicant records for potential program ineligibility");
  auto expected = ambiguity_expected_labels();
  REQUIRE(expected.size() == 8);
  for (const auto& r : report.results) {
    INFO("pair " << r.id);
    CHECK(std::string(nli_label_name(r.label)) == expected.at(r.id));
  }
}

}  // TEST_SUITE
