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

// Executable checks over the property set: per-property attack probes, the
// minimality matrix, damage envelopes for every evasion subset, two-chain
// composition with write-impact notification, and the ambiguity pairs.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "das/intent.hpp"
#include "das/service.hpp"

namespace das::meta {

inline constexpr int kPropertyCount = 7;

struct ActionSpec {
  std::string id;
  bool baseline = false;
  int property = 0;  // capability actions: the property whose hook prevents it
  std::string attack;
  std::string description;
};

// The shipped 11-action universe; throws kConfigError if malformed.
const std::vector<ActionSpec>& action_universe();
std::vector<ActionSpec> load_action_universe(std::string_view json_text);

struct ProbeResult {
  bool success = false;  // the attacker obtained the capability / the action ran
  std::string detail;
};

// Attack A{i} (1..7) against a sandboxed service with the given switchboard.
ProbeResult run_attack(int attack, const Switchboard& switchboard);
// One of the four baseline actions by id.
ProbeResult run_baseline(const std::string& action_id, const Switchboard& switchboard);

struct MinimalityRow {
  int attack = 0;
  ProbeResult with_all;      // base switchboard
  ProbeResult without_own;   // base with P{attack} disabled
  bool holds() const { return !with_all.success && without_own.success; }
};

std::vector<MinimalityRow> run_minimality_suite(const Switchboard& base = Switchboard::all());

struct DamageEnvelope {
  std::set<int> evaded;
  std::vector<std::string> reachable;  // universe order
  std::size_t unauthorized = 0;        // reachable capability actions
  double fraction = 0;                 // unauthorized / universe size

  bool strict_subset() const;
  nlohmann::json to_json() const;
};

// Envelope for one evasion set, computed by running every probe.
DamageEnvelope compute_envelope(const std::set<int>& evaded);
// All 126 proper non-empty subsets of {P1..P7}, ordered by mask.
std::vector<DamageEnvelope> enumerate_evasions(unsigned workers = 0);

// attack_succeeds[i][j]: A{i+1} succeeds when only P{j+1} is disabled.
using SingletonMatrix = std::array<std::array<bool, kPropertyCount>, kPropertyCount>;
SingletonMatrix singleton_matrix(const std::vector<DamageEnvelope>& envelopes);
bool is_diagonal(const SingletonMatrix& m);

// Composition of two chains over shared citizen records.
enum class SharedMode { kDisjoint, kReadShared, kWriteShared };
std::string_view shared_mode_name(SharedMode m);

struct CompositionStep {
  enum class Kind { kRead, kWrite, kAct };
  int chain = 0;  // 0 or 1
  Kind kind = Kind::kRead;
  std::string resource;
};

struct CompositionScenario {
  std::string id;
  SharedMode mode = SharedMode::kDisjoint;
  std::string shared_resource;  // empty for DISJOINT
  std::optional<int> writer;    // WRITE_SHARED: the chain that writes
  std::vector<CompositionStep> steps;
};

// 25 DISJOINT, 20 READ_SHARED and 5 WRITE_SHARED scenarios.
std::vector<CompositionScenario> composition_scenarios();

// Tracks which chains read which resources. A write bumps the resource's
// version; with notification on, every other chain that read it is
// re-verified (scope lineage and intent against its root goal) and then
// either acknowledges the new version or is revoked.
class WriteImpactMonitor {
 public:
  WriteImpactMonitor(Das& das, bool notification) : das_(das), notification_(notification) {}

  void on_read(const std::string& token_id, const std::string& resource);
  // Returns the tokens that were re-verified.
  std::vector<std::string> on_write(const std::string& token_id, const std::string& resource);
  // Resources the token read whose current version it has not acknowledged.
  std::vector<std::string> stale_reads(const std::string& token_id) const;
  int revoked() const { return revoked_; }

 private:
  bool reverify(const std::string& token_id);

  Das& das_;
  bool notification_;
  std::map<std::string, std::uint64_t> version_;
  std::map<std::string, std::map<std::string, std::uint64_t>> seen_;  // token -> resource -> version
  int revoked_ = 0;
};

struct CompositionResult {
  std::string id;
  SharedMode mode = SharedMode::kDisjoint;
  bool safe = true;
  std::string detail;
  int reverified = 0;
};

struct CompositionReport {
  bool notification = false;
  std::vector<CompositionResult> results;
  std::size_t safe_count() const;
  nlohmann::json to_json() const;
};

CompositionReport run_composition_suite(const std::vector<CompositionScenario>& scenarios,
                                        bool notification);

struct AmbiguityPair {
  int id = 0;
  std::string text;
  std::string parent_goal;
  std::string benign;
  std::string malicious;
};

const std::vector<AmbiguityPair>& ambiguity_pairs();

struct AmbiguityResult {
  int id = 0;
  bool keyword_hit = false;
  NliLabel label = NliLabel::kNotRun;
  Decision decision = Decision::kAllow;
};

struct AmbiguityReport {
  std::vector<AmbiguityResult> results;
  std::size_t keyword_hits() const;
  nlohmann::json to_json() const;
};

AmbiguityReport run_ambiguity_suite(Classifier& classifier, const IntentConfig& config);

// Frozen labels for the default classifier: id -> label name.
std::map<int, std::string> ambiguity_expected_labels();

// Everything above in one document, plus a rendered summary.
struct MetaReport {
  std::vector<MinimalityRow> minimality;
  std::vector<DamageEnvelope> envelopes;
  SingletonMatrix singletons{};
  CompositionReport without_notification;
  CompositionReport with_notification;
  AmbiguityReport ambiguity;

  nlohmann::json to_json() const;
  std::string summary() const;
};

MetaReport run_all(unsigned workers = 0);

}  // namespace das::meta
