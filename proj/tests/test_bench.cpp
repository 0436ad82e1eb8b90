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
#include <set>

#include "das/bench.hpp"
#include "das/error.hpp"

using namespace das;
using namespace das::bench;

namespace {

constexpr std::uint64_t kSeed = 42;

const std::vector<Scenario>& corpus() {
  static const auto c = generate_corpus(kSeed);
  return c;
}

const std::vector<BenchReport>& ablation() {
  static const auto r = run_ablation(corpus(), default_ablation_configs());
  return r;
}

const BenchReport& report(const std::string& name) {
  for (const auto& r : ablation()) {
    if (r.config == name) return r;
  }
  FAIL("no report " << name);
  throw;
}

bool is_attack_category(char c) { return std::string("ABCDFGH").find(c) != std::string::npos; }

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("corpus shape") {
  const auto& c = corpus();
  CHECK(c.size() == kCorpusSize);
  std::map<char, std::size_t> counts;
  std::size_t attacks = 0;
  std::set<std::string> ids;
  for (const auto& s : c) {
    ++counts[s.category];
    attacks += s.label == Label::kAttack ? 1 : 0;
    ids.insert(s.id);
    CHECK((s.label == Label::kAttack) == is_attack_category(s.category));
    CHECK((s.expected_layer == "NONE") == (s.label == Label::kBenign));
  }
  CHECK(counts == category_counts());
  CHECK(attacks == 150);
  CHECK(ids.size() == c.size());
  std::set<std::string> domains_seen;
  for (const auto& s : c) {
    if (s.category == 'E') domains_seen.insert(s.domain);
  }
  CHECK(domains_seen.size() == 13);
}

TEST_CASE("corpus generation is deterministic and round-trips") {
  std::string a = corpus_to_ndjson(generate_corpus(kSeed));
  CHECK(a == corpus_to_ndjson(generate_corpus(kSeed)));
  CHECK(a != corpus_to_ndjson(generate_corpus(kSeed + 1)));
  CHECK(std::count(a.begin(), a.end(), '\n') == static_cast<long>(kCorpusSize));
  CHECK(corpus_to_ndjson(corpus_from_ndjson(a)) == a);
  CHECK_THROWS_AS(corpus_from_ndjson("{\"id\": 1}\n"), Error);
  CHECK_THROWS_AS(corpus_from_ndjson("not json\n"), Error);
}

TEST_CASE("benign intents pass the intent check against their goal") {
  LexicalClassifier lex;
  IntentConfig cfg = IntentConfig::defaults();
  for (const auto& s : corpus()) {
    for (const auto& d : s.delegations) {
      auto v = verify_intent(s.goal, d.subtask, lex, cfg);
      INFO(s.id << ": " << d.subtask);
      if (s.category == 'A') {
        CHECK(v.decision == Decision::kBlock);
      } else {
        CHECK(v.decision == Decision::kAllow);
      }
    }
  }
}

TEST_CASE("full system blocks every attack at its expected layer and no benign scenario") {
  const BenchReport& full = report("Full System");
  for (const auto& o : full.outcomes) {
    INFO(o.id << " " << o.layer << " " << o.detail);
    CHECK(o.blocked == (o.label == Label::kAttack));
    if (o.label == Label::kAttack) {
      auto it = std::find_if(corpus().begin(), corpus().end(), [&](const Scenario& s) { return s.id == o.id; });
      CHECK(o.layer == it->expected_layer);
    }
  }
}

TEST_CASE("ablation table") {
  struct Row {
    const char* name;
    std::size_t tp, fp;
  };
  for (Row row : {Row{"No Defense", 0, 0}, Row{"P2 Only", 20, 0}, Row{"P6 Only", 130, 0},
                  Row{"P7 Only", 50, 0}, Row{"P6+P7", 150, 0}, Row{"Full System", 150, 0}}) {
    const BenchReport& r = report(row.name);
    INFO(row.name);
    CHECK(r.tp == row.tp);
    CHECK(r.fn == 150 - row.tp);
    CHECK(r.fp == row.fp);
    CHECK(r.tn == 366 - row.fp);
  }
  CHECK(report("No Defense").accuracy() == doctest::Approx(366.0 / 516.0));
  CHECK(report("Full System").accuracy() == doctest::Approx(1.0));
  CHECK(report("P2 Only").tpr() == doctest::Approx(20.0 / 150.0));
}

TEST_CASE("report arithmetic matches an independent tally of outcomes") {
  for (const auto& r : ablation()) {
    std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
    std::map<char, std::pair<std::size_t, std::size_t>> cats;
    for (const auto& o : r.outcomes) {
      bool attack = is_attack_category(o.category);
      if (attack && o.blocked) ++tp;
      if (attack && !o.blocked) ++fn;
      if (!attack && o.blocked) ++fp;
      if (!attack && !o.blocked) ++tn;
      ++cats[o.category].first;
      cats[o.category].second += o.blocked ? 1 : 0;
    }
    CHECK(r.tp == tp);
    CHECK(r.fn == fn);
    CHECK(r.fp == fp);
    CHECK(r.tn == tn);
    for (const auto& [c, st] : r.categories) {
      CHECK(st.total == cats[c].first);
      CHECK(st.blocked == cats[c].second);
    }
    CHECK(r.accuracy() == doctest::Approx(double(tp + tn) / double(r.outcomes.size())));
  }
}

TEST_CASE("caught-by attribution") {
  auto by = caught_by(ablation());
  CHECK(by.at('A') == std::vector<std::string>{"P2", "P6"});
  CHECK(by.at('B') == std::vector<std::string>{"P6"});
  CHECK(by.at('C') == std::vector<std::string>{"P7"});
  CHECK(by.at('D') == std::vector<std::string>{"P6"});
  CHECK(by.at('F') == std::vector<std::string>{"P6"});
  CHECK(by.at('G') == std::vector<std::string>{"P6"});
  CHECK(by.at('H') == std::vector<std::string>{"P6", "P7"});
  CHECK(by.count('E') == 0);
  std::string table = render_category_table(ablation());
  CHECK(table.find("P2+P6") != std::string::npos);
  CHECK(render_ablation_table(ablation()).find("150/150") != std::string::npos);
}

TEST_CASE("HTTP transport gives the same verdicts as in-process") {
  RunOptions http;
  http.transport = Transport::kHttp;
  BenchReport over_http = run_bench(corpus(), "Full System", Switchboard::all(), http);
  const BenchReport& local = report("Full System");
  REQUIRE(over_http.outcomes.size() == local.outcomes.size());
  for (std::size_t i = 0; i < local.outcomes.size(); ++i) {
    INFO(local.outcomes[i].id);
    CHECK(over_http.outcomes[i].blocked == local.outcomes[i].blocked);
    CHECK(over_http.outcomes[i].layer == local.outcomes[i].layer);
  }
}

TEST_CASE("red team and robustness suites") {
  SuiteReport rep = run_redteam_suites();
  INFO(rep.render());
  CHECK(rep.attacks_total() == 45);
  CHECK(rep.attacks_blocked() == 45);
  CHECK(rep.benign_total() == 14);
  CHECK(rep.benign_false_positives() == 0);
  CHECK(rep.robustness.size() == 29);
  CHECK(rep.robustness_passed() == 29);
  std::map<std::string, std::size_t> expected{
      {"path_traversal", 6}, {"method_override", 8}, {"case_sensitivity", 4}, {"api_versioning", 4},
      {"scope_boundary", 8}, {"output_tag_synonyms", 12}, {"multi_step", 3}};
  CHECK(rep.family_counts() == expected);
}

TEST_CASE("latency report") {
  LatencyReport rep = measure_latency(10);
  CHECK(rep.rows.size() == 12);
  for (const char* op : {"issuance", "enforce", "validate_output", "reconstruct_depth2",
                         "reconstruct_depth33", "revocation"}) {
    for (const char* tr : {"in_process", "http"}) {
      const LatencyStats* s = rep.find(op, tr);
      REQUIRE(s != nullptr);
      CHECK(s->samples == 10);
      CHECK(s->median_ms > 0);
      CHECK(s->p95_ms >= s->median_ms);
    }
  }
  CHECK_THROWS_AS(measure_latency(0), Error);
}

}  // TEST_SUITE
