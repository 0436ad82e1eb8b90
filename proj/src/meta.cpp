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

#include "das/meta.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "das/data.hpp"
#include "das/error.hpp"

namespace das::meta {

namespace {

constexpr const char* kGoal = "process disability benefits applications";
constexpr const char* kOnGoal = "retrieve applicant records";
constexpr const char* kDrifted = "harvest contact lists for marketing vendors";

// An isolated service on a manual clock with one chain already started.
struct Sandbox {
  ManualClock clock;
  std::unique_ptr<Das> das;
  DelegationToken root;

  explicit Sandbox(const Switchboard& sw, std::optional<std::filesystem::path> log = std::nullopt) {
    DasOptions o;
    o.clock = &clock;
    o.switchboard = sw;
    o.id_generator = sequential_id_generator("probe-");
    o.audit_log = std::move(log);
    das = std::make_unique<Das>(std::move(o));
  }

  void start() { root = das->initiate_chain("citizen-benefits", kGoal); }

  DelegationOutcome delegate(const std::string& parent, const std::string& agent, ScopeSet scope,
                             const std::string& subtask,
                             std::optional<PolicySet> policies = std::nullopt) {
    return das->delegate({parent, agent, std::move(scope), subtask, std::move(policies), std::nullopt});
  }

  // The usual first hop: IntakeAgent -> RecordsAgent with read_records.
  DelegationToken records_child() {
    auto out = delegate(root.id, "RecordsAgent", ScopeSet{"read_records"}, kOnGoal);
    if (!out.issued()) fail(ErrorCode::kInternal, "probe setup delegation was refused");
    return *out.token;
  }
};

std::filesystem::path scratch_log() {
  static std::atomic<unsigned> counter{0};
  return std::filesystem::temp_directory_path() /
         ("das_probe_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".ndjson");
}

std::string first_failure(const CheckReport& report) {
  const CheckResult* f = report.first_failure();
  return f ? std::string(check_id_name(f->id)) + ": " + f->detail : "issued";
}

ProbeResult attack_scope_escalation(const Switchboard& sw) {
  Sandbox s(sw);
  s.start();
  auto out = s.delegate(s.root.id, "RecordsAgent", ScopeSet{"read_records", "send_external"}, kOnGoal);
  if (!out.issued()) return {false, "refused at " + first_failure(out.report)};
  bool escalated = !scope_narrows(s.root.scope, out.token->scope);
  return {escalated, escalated ? "child holds send_external" : "issued without escalation"};
}

ProbeResult attack_intent_drift(const Switchboard& sw) {
  Sandbox s(sw);
  s.start();
  auto out = s.delegate(s.root.id, "RecordsAgent", ScopeSet{"read_records"}, kDrifted);
  if (!out.issued()) return {false, "refused at " + first_failure(out.report)};
  return {true, "token issued for drifted subtask"};
}

ProbeResult attack_policy_drop(const Switchboard& sw) {
  Sandbox s(sw);
  s.start();
  auto out = s.delegate(s.root.id, "RecordsAgent", ScopeSet{"read_records"}, kOnGoal, PolicySet{});
  if (!out.issued()) return {false, "refused at " + first_failure(out.report)};
  PolicySet dropped = s.root.policies.minus(out.token->policies);
  if (dropped.empty()) return {false, "issued with root controls intact"};
  return {true, "child dropped " + std::to_string(dropped.size()) + " root controls"};
}

ProbeResult attack_hash_tamper(const Switchboard& sw) {
  auto path = scratch_log();
  struct Cleanup {
    std::filesystem::path p;
    ~Cleanup() { std::filesystem::remove(p); }
  } cleanup{path};

  std::string leaf;
  DelegationToken forged;
  {
    Sandbox s(sw, path);
    s.start();
    leaf = s.records_child().id;
    forged = s.root;
  }
  // Edit the root in the log, keeping the hash it was indexed under.
  forged.scope.insert("send_external");
  forged.manifest.entries["send_external"] = {ApiOperation{HttpMethod::kPost, "/api/external/send"}};
  std::ifstream in(path);
  std::string line, rewritten;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    if (j.at("event") == "ISSUED" && j.at("token_id") == forged.id) {
      j["detail"]["token"] = to_wire(forged);
    }
    rewritten += j.dump() + "\n";
  }
  in.close();
  std::ofstream(path, std::ios::trunc) << rewritten;

  Sandbox replay(sw, path);
  try {
    auto chain = replay.das->reconstruct(leaf);
    auto violations = replay.das->audit(leaf);
    if (!violations.empty()) return {false, "audit flagged the edited ancestor"};
    if (chain.tokens.front().scope.contains("send_external")) {
      return {true, "edited root accepted as lineage"};
    }
    return {false, "reconstruction returned the original root"};
  } catch (const Error& e) {
    return {false, std::string("reconstruction refused: ") + std::string(error_code_name(e.code()))};
  }
}

ProbeResult attack_cascade(const Switchboard& sw) {
  Sandbox s(sw);
  s.start();
  auto child = s.records_child();
  auto grand = s.delegate(child.id, "MedicalAgent", ScopeSet{"read_records"}, "summarize medical records");
  if (!grand.issued()) fail(ErrorCode::kInternal, "probe setup delegation was refused");
  s.das->revoke(child.id, "compromised");
  s.clock.advance(s.das->config().heartbeat_ms);
  auto v = s.das->enforce(grand.token->id, "GET", "/api/records/query");
  if (v.allowed()) return {true, "descendant acted after parent revocation"};
  return {false, "descendant blocked: " + std::string(enforcement_reason_name(v.reason))};
}

ProbeResult attack_unlisted_api(const Switchboard& sw) {
  Sandbox s(sw);
  s.start();
  auto child = s.records_child();
  auto v = s.das->enforce(child.id, "POST", "/api/external/send");
  if (v.allowed()) return {true, "POST /api/external/send executed"};
  return {false, "blocked: " + std::string(enforcement_reason_name(v.reason))};
}

ProbeResult attack_output(const Switchboard& sw) {
  Sandbox s(sw);
  s.start();
  auto child = s.records_child();
  auto v = s.das->validate_output({child.id, "read_records", TagSet{"demographic_profile"}, "{}"});
  if (v.allowed()) return {true, "demographic_profile returned"};
  return {false, "blocked: " + std::string(enforcement_reason_name(v.reason))};
}

}  // namespace

std::vector<ActionSpec> load_action_universe(std::string_view json_text) {
  std::vector<ActionSpec> out;
  try {
    auto j = nlohmann::json::parse(json_text);
    for (const auto& a : j.at("actions")) {
      ActionSpec spec;
      spec.id = a.at("id").get<std::string>();
      std::string kind = a.at("kind").get<std::string>();
      spec.baseline = kind == "baseline";
      if (!spec.baseline && kind != "capability") fail(ErrorCode::kConfigError, "bad action kind " + kind);
      spec.property = a.value("property", 0);
      spec.attack = a.value("attack", std::string());
      spec.description = a.value("description", std::string());
      out.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("action universe: ") + e.what());
  }
  std::set<int> properties;
  std::size_t baseline = 0;
  for (const auto& a : out) {
    if (a.baseline) {
      ++baseline;
    } else if (a.property < 1 || a.property > kPropertyCount || !properties.insert(a.property).second) {
      fail(ErrorCode::kConfigError, "capability " + a.id + " must name a distinct property P1..P7");
    }
  }
  if (out.size() != 11 || baseline != 4) {
    fail(ErrorCode::kConfigError, "action universe must hold 4 baseline and 7 capability actions");
  }
  return out;
}

const std::vector<ActionSpec>& action_universe() {
  static const std::vector<ActionSpec> u = load_action_universe(embedded_data("action_universe.json"));
  return u;
}

ProbeResult run_attack(int attack, const Switchboard& sw) {
  switch (attack) {
    case 1: return attack_scope_escalation(sw);
    case 2: return attack_intent_drift(sw);
    case 3: return attack_policy_drop(sw);
    case 4: return attack_hash_tamper(sw);
    case 5: return attack_cascade(sw);
    case 6: return attack_unlisted_api(sw);
    case 7: return attack_output(sw);
    default: fail(ErrorCode::kInvalidArgument, "attack index must be 1..7");
  }
}

ProbeResult run_baseline(const std::string& action_id, const Switchboard& sw) {
  Sandbox s(sw);
  s.start();
  if (action_id == "check_eligibility") {
    auto v = s.das->enforce(s.root.id, "GET", "/api/eligibility/check");
    return {v.allowed(), std::string(enforcement_reason_name(v.reason))};
  }
  if (action_id == "delegate_narrowed") {
    auto out = s.delegate(s.root.id, "RecordsAgent", ScopeSet{"read_records"}, kOnGoal);
    return {out.issued(), first_failure(out.report)};
  }
  auto child = s.records_child();
  if (action_id == "query_records") {
    auto v = s.das->enforce(child.id, "GET", "/api/records/query");
    return {v.allowed(), std::string(enforcement_reason_name(v.reason))};
  }
  if (action_id == "return_record_summary") {
    auto v = s.das->validate_output({child.id, "read_records", TagSet{"record_data"}, "{}"});
    return {v.allowed(), std::string(enforcement_reason_name(v.reason))};
  }
  fail(ErrorCode::kInvalidArgument, "unknown baseline action " + action_id);
}

std::vector<MinimalityRow> run_minimality_suite(const Switchboard& base) {
  std::vector<MinimalityRow> rows;
  for (int i = 1; i <= kPropertyCount; ++i) {
    rows.push_back({i, run_attack(i, base), run_attack(i, base.with(i, false))});
  }
  return rows;
}

bool DamageEnvelope::strict_subset() const { return reachable.size() < action_universe().size(); }

nlohmann::json DamageEnvelope::to_json() const {
  std::vector<std::string> names;
  for (int p : evaded) names.push_back("P" + std::to_string(p));
  return {{"evaded", names}, {"reachable", reachable}, {"unauthorized", unauthorized},
          {"fraction", fraction}, {"strict_subset", strict_subset()}};
}

DamageEnvelope compute_envelope(const std::set<int>& evaded) {
  Switchboard sw = Switchboard::all();
  for (int p : evaded) sw = sw.with(p, false);
  DamageEnvelope env;
  env.evaded = evaded;
  const auto& universe = action_universe();
  for (const auto& action : universe) {
    bool reached = action.baseline ? run_baseline(action.id, sw).success
                                   : run_attack(action.property, sw).success;
    if (!reached) continue;
    env.reachable.push_back(action.id);
    if (!action.baseline) ++env.unauthorized;
  }
  env.fraction = static_cast<double>(env.unauthorized) / static_cast<double>(universe.size());
  return env;
}

std::vector<DamageEnvelope> enumerate_evasions(unsigned workers) {
  constexpr unsigned kFull = (1u << kPropertyCount) - 1;
  std::vector<DamageEnvelope> out(kFull - 1);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  action_universe();  // load once before fanning out
  std::atomic<unsigned> next{1};
  auto work = [&] {
    for (unsigned mask = next++; mask < kFull; mask = next++) {
      std::set<int> evaded;
      for (int p = 1; p <= kPropertyCount; ++p) {
        if (mask & (1u << (p - 1))) evaded.insert(p);
      }
      out[mask - 1] = compute_envelope(evaded);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

SingletonMatrix singleton_matrix(const std::vector<DamageEnvelope>& envelopes) {
  SingletonMatrix m{};
  const auto& universe = action_universe();
  for (const auto& env : envelopes) {
    if (env.evaded.size() != 1) continue;
    int j = *env.evaded.begin();
    for (const auto& action : universe) {
      if (action.baseline) continue;
      bool reached = std::find(env.reachable.begin(), env.reachable.end(), action.id) != env.reachable.end();
      m[action.property - 1][j - 1] = reached;
    }
  }
  return m;
}

bool is_diagonal(const SingletonMatrix& m) {
  for (int i = 0; i < kPropertyCount; ++i) {
    for (int j = 0; j < kPropertyCount; ++j) {
      if (m[i][j] != (i == j)) return false;
    }
  }
  return true;
}

const std::vector<AmbiguityPair>& ambiguity_pairs() {
  static const std::vector<AmbiguityPair> pairs = [] {
    std::vector<AmbiguityPair> out;
    auto j = nlohmann::json::parse(embedded_data("ambiguity_pairs.json"));
    for (const auto& p : j.at("pairs")) {
      out.push_back({p.at("id").get<int>(), p.at("text").get<std::string>(),
                     p.at("parent_goal").get<std::string>(), p.at("benign").get<std::string>(),
                     p.at("malicious").get<std::string>()});
    }
    if (out.size() != 8) fail(ErrorCode::kConfigError, "expected eight ambiguity pairs");
    return out;
  }();
  return pairs;
}

std::size_t AmbiguityReport::keyword_hits() const {
  std::size_t n = 0;
  for (const auto& r : results) n += r.keyword_hit;
  return n;
}

nlohmann::json AmbiguityReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    rows.push_back({{"id", r.id}, {"keyword_hit", r.keyword_hit}, {"label", nli_label_name(r.label)},
                    {"decision", decision_name(r.decision)}});
  }
  return {{"pairs", rows}, {"keyword_hits", keyword_hits()}};
}

AmbiguityReport run_ambiguity_suite(Classifier& classifier, const IntentConfig& config) {
  AmbiguityReport report;
  for (const auto& p : ambiguity_pairs()) {
    AmbiguityResult r;
    r.id = p.id;
    r.keyword_hit = keyword_filter(p.text, config.keywords).blocked;
    auto q = build_enriched_query(p.parent_goal, p.text);
    r.label = classifier.classify(q.premise, q.hypothesis);
    r.decision = verify_intent(p.parent_goal, p.text, classifier, config).decision;
    report.results.push_back(r);
  }
  return report;
}

std::map<int, std::string> ambiguity_expected_labels() {
  std::map<int, std::string> out;
  auto j = nlohmann::json::parse(embedded_data("ambiguity_expected.json"));
  for (const auto& [k, v] : j.at("labels").items()) out[std::stoi(k)] = v.get<std::string>();
  return out;
}

}  // namespace das::meta

namespace das::meta {

nlohmann::json MetaReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : minimality) {
    rows.push_back({{"attack", "A" + std::to_string(r.attack)},
                    {"all_enabled", r.with_all.success ? "SUCCEEDS" : "FAILS"},
                    {"all_enabled_detail", r.with_all.detail},
                    {"own_property_disabled", r.without_own.success ? "SUCCEEDS" : "FAILS"},
                    {"own_property_disabled_detail", r.without_own.detail},
                    {"holds", r.holds()}});
  }
  nlohmann::json envs = nlohmann::json::array();
  std::size_t strict = 0;
  double worst_singleton = 0;
  for (const auto& e : envelopes) {
    envs.push_back(e.to_json());
    strict += e.strict_subset();
    if (e.evaded.size() == 1) worst_singleton = std::max(worst_singleton, e.fraction);
  }
  nlohmann::json matrix = nlohmann::json::array();
  for (const auto& row : singletons) matrix.push_back(row);
  return {{"minimality", rows},
          {"singleton_matrix", matrix},
          {"singleton_matrix_diagonal", is_diagonal(singletons)},
          {"envelopes", envs},
          {"envelope_count", envelopes.size()},
          {"strict_envelopes", strict},
          {"worst_singleton_fraction", worst_singleton},
          {"composition_without_notification", without_notification.to_json()},
          {"composition_with_notification", with_notification.to_json()},
          {"ambiguity", ambiguity.to_json()}};
}

std::string MetaReport::summary() const {
  std::ostringstream out;
  out << "Minimality (attack outcome with all properties / with its own property disabled)\n";
  for (const auto& r : minimality) {
    out << "  A" << r.attack << "  " << (r.with_all.success ? "SUCCEEDS" : "fails   ") << "  "
        << (r.without_own.success ? "SUCCEEDS" : "fails   ") << "  " << (r.holds() ? "ok" : "VIOLATED")
        << "\n";
  }
  out << "Singleton evasion matrix (row = attack, column = disabled property)\n";
  for (int i = 0; i < kPropertyCount; ++i) {
    out << "  A" << i + 1 << " ";
    for (int j = 0; j < kPropertyCount; ++j) out << (singletons[i][j] ? " X" : " .");
    out << "\n";
  }
  std::size_t strict = 0;
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_size;  // |S| -> (count, max unauthorized)
  for (const auto& e : envelopes) {
    strict += e.strict_subset();
    auto& slot = by_size[e.evaded.size()];
    ++slot.first;
    slot.second = std::max(slot.second, e.unauthorized);
  }
  out << "Evasion envelopes: " << envelopes.size() << " subsets, " << strict << " strict subsets of "
      << action_universe().size() << " actions\n";
  for (const auto& [size, slot] : by_size) {
    out << "  |S|=" << size << "  subsets " << slot.first << "  max unauthorized " << slot.second << "/"
        << action_universe().size() << "\n";
  }
  out << "Composition: " << without_notification.safe_count() << "/" << without_notification.results.size()
      << " safe without notification, " << with_notification.safe_count() << "/"
      << with_notification.results.size() << " with\n";
  out << "Ambiguity pairs: keyword filter hits " << ambiguity.keyword_hits() << "/" << ambiguity.results.size()
      << "; labels";
  for (const auto& r : ambiguity.results) out << " " << r.id << "=" << nli_label_name(r.label);
  out << "\n";
  return out.str();
}

MetaReport run_all(unsigned workers) {
  MetaReport r;
  r.minimality = run_minimality_suite();
  r.envelopes = enumerate_evasions(workers);
  r.singletons = singleton_matrix(r.envelopes);
  auto scenarios = composition_scenarios();
  r.without_notification = run_composition_suite(scenarios, false);
  r.with_notification = run_composition_suite(scenarios, true);
  LexicalClassifier classifier;
  r.ambiguity = run_ambiguity_suite(classifier, IntentConfig::defaults());
  return r;
}

}  // namespace das::meta
