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

// Scenario corpus, runner and reports for the three-point evaluation:
// corpus generation, ablations over the lifecycle layers, red-team and
// robustness suites, and latency measurement.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "das/api.hpp"
#include "das/service.hpp"

namespace das::bench {

struct Domain {
  std::string slug;
  std::string name;
  std::string subject;
  std::string goal;
};

const std::vector<Domain>& domains();

// Registry covering every domain: scopes are "<slug>.<scope>", endpoints
// live under /api/<slug>/, users are "<slug>-caseworker" and
// "<slug>-supervisor".
DasConfig bench_config();
std::string scoped(const std::string& domain, const std::string& scope);

enum class Label { kAttack, kBenign };

struct DelegationSpec {
  std::string dst;
  std::vector<std::string> scope;
  std::string subtask;
  std::optional<std::int64_t> ttl_ms;
  std::optional<std::vector<std::string>> policies;
};

struct Step {
  enum class Kind { kCall, kOutput, kWait };
  Kind kind = Kind::kCall;
  std::string method;
  std::string path;
  std::string scope;
  std::vector<std::string> tags;
  std::int64_t ms = 0;
};

// Steps act with the last token of the chain (the root when there are no
// delegations).
struct Scenario {
  std::string id;
  char category = 'E';
  std::string domain;
  Label label = Label::kBenign;
  std::string expected_layer = "NONE";  // P2, P6, P7 or NONE
  std::string user;
  std::string goal;
  std::string agent;
  std::vector<DelegationSpec> delegations;
  std::vector<Step> steps;

  nlohmann::json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
};

inline constexpr std::size_t kCorpusSize = 516;
inline const std::map<char, std::size_t>& category_counts() {
  static const std::map<char, std::size_t> counts{{'A', 20}, {'B', 20}, {'C', 20}, {'D', 20},
                                                  {'E', 156}, {'F', 30}, {'G', 20}, {'H', 20},
                                                  {'I', 30}, {'J', 180}};
  return counts;
}
std::string_view category_name(char category);

std::vector<Scenario> generate_corpus(std::uint64_t seed);
std::string corpus_to_ndjson(const std::vector<Scenario>& corpus);
std::vector<Scenario> corpus_from_ndjson(std::string_view text);

struct ScenarioOutcome {
  std::string id;
  char category = 'E';
  Label label = Label::kBenign;
  bool blocked = false;
  std::string layer = "NONE";  // first layer that blocked: P1..P7, C1, C5, ERROR or NONE
  std::string detail;
};

// Plays one scenario through the JSON API.
ScenarioOutcome run_scenario(DasClient& client, const Scenario& scenario);

struct CategoryStats {
  std::size_t total = 0;
  std::size_t blocked = 0;
};

struct BenchReport {
  std::string config;
  std::string switchboard;
  std::size_t tp = 0, fn = 0, fp = 0, tn = 0;
  std::map<char, CategoryStats> categories;
  std::vector<ScenarioOutcome> outcomes;

  double tpr() const;
  double fpr() const;
  double accuracy() const;
  nlohmann::json to_json(bool with_outcomes = false) const;
};

enum class Transport { kInProcess, kHttp };

struct RunOptions {
  Transport transport = Transport::kInProcess;
  std::shared_ptr<Classifier> classifier;  // lexical when null
};

BenchReport run_bench(const std::vector<Scenario>& corpus, const std::string& config_name,
                      const Switchboard& switchboard, const RunOptions& options = {});

struct AblationConfig {
  std::string name;
  Switchboard switchboard;
};

// No Defense, P2 Only, P6 Only, P7 Only, P6+P7 and the full system. The
// structural properties P1, P3, P4 and P5 stay enabled throughout.
std::vector<AblationConfig> default_ablation_configs();
std::vector<BenchReport> run_ablation(const std::vector<Scenario>& corpus,
                                      const std::vector<AblationConfig>& configs,
                                      const RunOptions& options = {});

// Single-layer configurations that block every scenario of the category.
std::map<char, std::vector<std::string>> caught_by(const std::vector<BenchReport>& reports);

std::string render_ablation_table(const std::vector<BenchReport>& reports);
std::string render_category_table(const std::vector<BenchReport>& reports);

// Red-team and robustness suites, run against a live HTTP server.
struct SuiteCase {
  std::string family;
  std::string name;
  bool attack = true;  // false for benign controls
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::vector<SuiteCase> redteam;     // 45 attacks + 14 benign controls
  std::vector<SuiteCase> robustness;  // 29 edge cases
  std::size_t attacks_blocked() const;
  std::size_t attacks_total() const;
  std::size_t benign_false_positives() const;
  std::size_t benign_total() const;
  std::size_t robustness_passed() const;
  std::map<std::string, std::size_t> family_counts() const;
  nlohmann::json to_json() const;
  std::string render() const;
};

SuiteReport run_redteam_suites();

struct LatencyStats {
  std::string operation;
  std::string transport;
  std::size_t samples = 0;
  double median_ms = 0;
  double p95_ms = 0;
};

struct LatencyReport {
  std::vector<LatencyStats> rows;
  const LatencyStats* find(const std::string& operation, const std::string& transport) const;
  nlohmann::json to_json() const;
  std::string render() const;
};

LatencyReport measure_latency(std::size_t iterations);

}  // namespace das::bench
