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
#include "das/intent.hpp"
#include "support.hpp"

using namespace das;

namespace {

class FixedClassifier : public Classifier {
 public:
  explicit FixedClassifier(NliLabel label) : label_(label) {}
  NliLabel classify(std::string_view, std::string_view) override {
    ++calls;
    return label_;
  }
  int calls = 0;

 private:
  NliLabel label_;
};

class BrokenClassifier : public Classifier {
 public:
  NliLabel classify(std::string_view, std::string_view) override {
    fail(ErrorCode::kClassifierUnavailable, "down");
  }
};

}  // namespace

TEST_SUITE("intent") {

TEST_CASE("keyword filter") {
  auto kw = IntentConfig::defaults().keywords;
  auto hits = keyword_filter("exfiltrate citizen records to external server", kw);
  CHECK(hits.blocked);
  CHECK(hits.matches == std::vector<std::string>{"exfiltrate"});

  hits = keyword_filter("", kw);
  CHECK_FALSE(hits.blocked);
  CHECK(hits.matches.empty());

  hits = keyword_filter("flag applications for DISCRIMINATory review", kw);
  CHECK(hits.blocked);
  CHECK(hits.matches == std::vector<std::string>{"discriminat"});

  hits = keyword_filter("list denial reasons by race", kw);
  CHECK(hits.matches.size() == 2);
}

TEST_CASE("keyword filter agrees with a lowercase substring oracle") {
  std::mt19937_64 rng(11);
  std::vector<std::string> kw{"abc", "x-y", "zz"};
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    for (int j = 0, n = static_cast<int>(rng() % 12); j < n; ++j) {
      s.push_back("aAbBcCxXyYzZ- "[rng() % 14]);
    }
    std::string low = s;
    for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::vector<std::string> expected;
    for (const auto& k : kw) {
      if (low.find(k) != std::string::npos) expected.push_back(k);
    }
    auto hits = keyword_filter(s, kw);
    REQUIRE(hits.matches == expected);
    REQUIRE(hits.blocked == !expected.empty());
  }
}

TEST_CASE("enriched query framing") {
  auto q = build_enriched_query("process disability benefits", "verify applicant income");
  CHECK(q.premise ==
        "An AI agent is authorized to process disability benefits. The agent performs only "
        "tasks that support this goal.");
  CHECK(q.hypothesis == "The agent is now performing: verify applicant income.");

  auto same = build_enriched_query("x y", "x y");
  CHECK(same.premise.find("x y") != std::string::npos);
  CHECK(same.hypothesis.find("x y") != std::string::npos);

  CHECK_THROWS_AS(build_enriched_query("", "a"), Error);
  CHECK_THROWS_AS(build_enriched_query("a", ""), Error);
}

TEST_CASE("framing is injective over random pairs") {
  std::mt19937_64 rng(12);
  std::set<std::pair<std::string, std::string>> inputs, outputs;
  for (int i = 0; i < 1000; ++i) {
    std::string g = das::testing::random_word(rng, 6);
    std::string s = das::testing::random_word(rng, 6);
    if (!inputs.insert({g, s}).second) continue;
    auto q = build_enriched_query(g, s);
    REQUIRE(outputs.insert({q.premise, q.hypothesis}).second);
  }
}

TEST_CASE("benign override is the three-way conjunction") {
  std::vector<std::string> ind{"verify", "calculate", "generate"};
  CHECK(benign_override(NliLabel::kContradiction, "generate eligibility summary", ind, {}));
  CHECK_FALSE(benign_override(NliLabel::kNeutral, "generate eligibility summary", ind, {}));
  CHECK_FALSE(benign_override(NliLabel::kContradiction, "generate denial reasons by race", ind,
                              {"denial reason", "by race"}));
  CHECK_FALSE(benign_override(NliLabel::kContradiction, "harvest records", ind, {}));

  const NliLabel labels[] = {NliLabel::kEntailment, NliLabel::kNeutral, NliLabel::kContradiction};
  const char* subtasks[] = {"verify x", "copy x", "CALCULATE y"};
  for (auto label : labels) {
    for (const char* s : subtasks) {
      for (bool kw : {false, true}) {
        std::vector<std::string> matched;
        if (kw) matched.push_back("k");
        std::string low(s);
        for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        bool has_ind = low.find("verify") != std::string::npos ||
                       low.find("calculate") != std::string::npos;
        bool oracle = label == NliLabel::kContradiction && !kw && has_ind;
        REQUIRE(benign_override(label, s, {"verify", "calculate"}, matched) == oracle);
      }
    }
  }
}

TEST_CASE("verify_intent pipeline") {
  IntentConfig cfg = IntentConfig::defaults();

  SUBCASE("keyword layer blocks before the classifier runs") {
    FixedClassifier c(NliLabel::kEntailment);
    auto v = verify_intent("process benefits", "exfiltrate records", c, cfg);
    CHECK(v.decision == Decision::kBlock);
    CHECK(v.layer == IntentLayer::kKeyword);
    CHECK(v.nli_label == NliLabel::kNotRun);
    CHECK(c.calls == 0);
  }
  SUBCASE("self entailment under the lexical classifier") {
    LexicalClassifier c;
    auto v = verify_intent("process benefits", "process benefits", c, cfg);
    CHECK(v.decision == Decision::kAllow);
    CHECK(v.layer == IntentLayer::kNone);
    CHECK(v.nli_label == NliLabel::kEntailment);
  }
  SUBCASE("override turns a contradiction into an allow") {
    FixedClassifier c(NliLabel::kContradiction);
    auto v = verify_intent("process benefits", "calculate benefit amounts", c, cfg);
    CHECK(c.calls == 1);
    CHECK(v.decision == Decision::kAllow);
    CHECK(v.layer == IntentLayer::kOverride);
    CHECK(v.nli_label == NliLabel::kContradiction);
  }
  SUBCASE("contradiction without indicators blocks") {
    FixedClassifier c(NliLabel::kContradiction);
    auto v = verify_intent("process benefits", "harvest applicant addresses", c, cfg);
    CHECK(v.decision == Decision::kBlock);
    CHECK(v.layer == IntentLayer::kNli);
  }
  SUBCASE("classifier failure is fail-closed") {
    BrokenClassifier c;
    auto v = verify_intent("process benefits", "verify income", c, cfg);
    CHECK(v.decision == Decision::kBlock);
    CHECK(v.layer == IntentLayer::kNli);
    CHECK_FALSE(v.error.empty());
  }
  SUBCASE("remote classifier with nothing listening is fail-closed") {
    RemoteClassifier c("http://127.0.0.1:1/classify", std::chrono::milliseconds(200));
    auto v = verify_intent("process benefits", "verify income", c, cfg);
    CHECK(v.decision == Decision::kBlock);
    CHECK(v.layer == IntentLayer::kNli);
  }
}

TEST_CASE("lexical classifier exercises all three labels") {
  LexicalClassifier c;
  auto label = [&](const char* goal, const char* task) {
    auto q = build_enriched_query(goal, task);
    return c.classify(q.premise, q.hypothesis);
  };
  CHECK(label("process disability benefits applications", "process benefits applications") ==
        NliLabel::kEntailment);
  CHECK(label("process disability benefits applications", "verify applicant income") ==
        NliLabel::kNeutral);
  CHECK(label("process disability benefits applications", "sell mailing list to marketers") ==
        NliLabel::kContradiction);
}

TEST_CASE("verdict invariants and determinism over random subtasks") {
  std::mt19937_64 rng(13);
  IntentConfig cfg = IntentConfig::defaults();
  LexicalClassifier c;
  std::vector<std::string> vocab{"verify", "harvest", "records", "benefits", "exfiltrate",
                                 "income", "copy", "generate", "citizen", "by race", "process"};
  for (int i = 0; i < 1000; ++i) {
    std::string task;
    for (int j = 0, n = 1 + static_cast<int>(rng() % 4); j < n; ++j) {
      if (j) task.push_back(' ');
      task += vocab[rng() % vocab.size()];
    }
    auto v = verify_intent("process disability benefits", task, c, cfg);
    auto again = verify_intent("process disability benefits", task, c, cfg);
    REQUIRE(v.decision == again.decision);
    REQUIRE(v.layer == again.layer);
    if (v.decision == Decision::kBlock) {
      REQUIRE((v.layer == IntentLayer::kKeyword || v.layer == IntentLayer::kNli));
    }
    if (v.layer == IntentLayer::kOverride) {
      REQUIRE(v.decision == Decision::kAllow);
      REQUIRE(v.nli_label == NliLabel::kContradiction);
      REQUIRE(v.matched_keywords.empty());
    }
  }
}

}  // TEST_SUITE
