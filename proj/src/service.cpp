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

#include "das/service.hpp"

#include <algorithm>
#include <atomic>

#include "das/error.hpp"
#include "das/policy.hpp"

namespace das {

namespace {

std::string join(const std::set<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

Switchboard Switchboard::parse(std::string_view text) {
  if (text == "all" || text == "full") return all();
  if (text == "none" || text.empty()) return none();
  unsigned mask = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find_first_of("+,", pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    if (item.size() != 2 || (item[0] != 'P' && item[0] != 'p') || item[1] < '1' || item[1] > '7') {
      fail(ErrorCode::kInvalidArgument, "bad property list: " + std::string(text));
    }
    mask |= 1u << (item[1] - '1');
    pos = end + 1;
  }
  return Switchboard(mask);
}

Switchboard Switchboard::with(int property, bool on) const {
  Switchboard out = *this;
  out.bits_.set(static_cast<std::size_t>(property - 1), on);
  return out;
}

std::string Switchboard::to_string() const {
  if (bits_.none()) return "none";
  std::string out;
  for (int p = 1; p <= 7; ++p) {
    if (enabled(p)) out += (out.empty() ? "P" : "+P") + std::to_string(p);
  }
  return out;
}

std::string_view check_id_name(CheckId id) {
  switch (id) {
    case CheckId::kC1: return "C1";
    case CheckId::kC2: return "C2";
    case CheckId::kC2a: return "C2a";
    case CheckId::kC3: return "C3";
    case CheckId::kC4: return "C4";
    case CheckId::kC5: return "C5";
  }
  return "C1";
}

std::string_view check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "PASS";
    case CheckStatus::kFail: return "FAIL";
    case CheckStatus::kSkipped: return "SKIPPED";
  }
  return "PASS";
}

bool CheckReport::issuable() const { return first_failure() == nullptr; }

const CheckResult* CheckReport::first_failure() const {
  for (const auto& r : results) {
    if (r.status == CheckStatus::kFail) return &r;
  }
  return nullptr;
}

const CheckResult& CheckReport::get(CheckId id) const {
  for (const auto& r : results) {
    if (r.id == id) return r;
  }
  fail(ErrorCode::kInvalidArgument, "check not in report");
}

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : results) {
    j.push_back({{"check", check_id_name(r.id)},
                 {"status", check_status_name(r.status)},
                 {"detail", r.detail}});
  }
  nlohmann::json out{{"checks", j}};
  if (intent) out["intent"] = intent_verdict_to_json(*intent);
  return out;
}

IdGenerator random_id_generator() {
  return [] { return to_hex(random_bytes(16)); };
}

IdGenerator sequential_id_generator(std::string prefix) {
  auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
  return [prefix = std::move(prefix), counter] {
    return prefix + std::to_string(++*counter);
  };
}

Das::Das(DasOptions options) : options_(std::move(options)) {
  if (options_.clock == nullptr) options_.clock = &SystemClock::instance();
  if (!options_.classifier) {
    options_.classifier = std::make_shared<LexicalClassifier>(options_.intent_config);
  }
  if (!options_.signer) {
    options_.signer = std::make_shared<KeyStoreSigner>(KeyStore(SigningKey::generate()));
  }
  if (!options_.id_generator) options_.id_generator = random_id_generator();
  cascade_.heartbeat = options_.config.heartbeat_ms;
  store_ = std::make_unique<ChainStore>(*options_.clock, options_.audit_log);
  view_ = std::make_unique<RevocationView>(*store_, *options_.clock, cascade_.heartbeat);
}

std::mutex& Das::chain_lock(const std::string& chain_id) {
  std::lock_guard lock(locks_mu_);
  auto& slot = chain_locks_[chain_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

namespace {
bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}
}  // namespace

DelegationToken Das::initiate_chain(const std::string& user_id, const std::string& goal,
                                    std::optional<std::string> agent) {
  const DasConfig& cfg = options_.config;
  auto user = cfg.users.find(user_id);
  if (user == cfg.users.end()) fail(ErrorCode::kUnknownUser, "unknown user " + user_id);
  auto role = cfg.roles.find(user->second.role);
  if (role == cfg.roles.end()) fail(ErrorCode::kUnknownRole, "unknown role " + user->second.role);
  auto baseline = cfg.org_baselines.find(user->second.org);
  if (baseline == cfg.org_baselines.end()) {
    fail(ErrorCode::kConfigError, "no baseline for org " + user->second.org);
  }
  if (blank(goal)) fail(ErrorCode::kEmptyIntent, "goal must be non-empty");
  std::string first = agent.value_or(cfg.default_entry_agent);
  std::string agent_org = cfg.org_of_agent(first);
  if (agent_org.empty()) fail(ErrorCode::kInvalidArgument, "unregistered agent " + first);

  DelegationToken t;
  t.id = options_.id_generator();
  t.src = user_id;
  t.dst = first;
  t.scope = role->second;
  t.intent.text = goal;
  t.policies = apply_boundary_policies(baseline->second, user->second.org, agent_org, cfg.boundary);
  t.manifest = cfg.manifest_for(t.scope);
  t.output_schema = cfg.schema_for(t.scope);
  t.parent_hash = kRootHash;
  t.expires_at = clock().now_ms() + cfg.token_ttl_ms;
  t.signatures = options_.signer->sign(t);
  store_->store_token(t, {{"initiated_by", user_id}, {"role", user->second.role}}, true);
  return t;
}

DelegationOutcome Das::delegate(const DelegationRequest& req) {
  auto parent = store_->get(req.parent_token_id);
  if (!parent) fail(ErrorCode::kUnknownParentToken, "unknown parent token " + req.parent_token_id);
  if (blank(req.subtask)) fail(ErrorCode::kEmptyIntent, "subtask must be non-empty");

  std::string chain_id = store_->chain_id_of(parent->id);
  std::lock_guard chain_guard(chain_lock(chain_id));

  const DasConfig& cfg = options_.config;
  const Switchboard& sw = options_.switchboard;
  DelegationOutcome out;
  CheckReport& report = out.report;
  auto add = [&](CheckId id, CheckStatus st, std::string detail) {
    report.results.push_back({id, st, std::move(detail)});
  };

  // C1 identity
  std::string dst_org = cfg.org_of_agent(req.dst_agent);
  if (dst_org.empty()) {
    add(CheckId::kC1, CheckStatus::kFail, "agent " + req.dst_agent + " is not registered");
  } else {
    add(CheckId::kC1, CheckStatus::kPass, req.dst_agent + " registered to " + dst_org);
  }

  // C2 authority
  ScopeSet escalated = req.requested_scope.minus(parent->scope);
  if (!sw.enabled(1)) {
    add(CheckId::kC2, CheckStatus::kSkipped, "P1 disabled");
  } else if (escalated.empty()) {
    add(CheckId::kC2, CheckStatus::kPass, "requested scope within parent scope");
  } else {
    add(CheckId::kC2, CheckStatus::kFail, "requested scope adds " + join(escalated.items()));
  }

  // C2a manifest narrowing
  ToolManifest manifest;
  OutputSchema schema;
  if (sw.enabled(1)) {
    try {
      manifest = narrow_manifest(parent->manifest, req.requested_scope);
      schema = narrow_schema(parent->output_schema, req.requested_scope);
      add(CheckId::kC2a, CheckStatus::kPass,
          std::to_string(manifest.operations().size()) + " operations carried over");
    } catch (const Error& e) {
      add(CheckId::kC2a, CheckStatus::kFail, e.what());
    }
  } else {
    // Sandbox only: escalated scopes are filled from the registry.
    ScopeSet inherited = req.requested_scope.minus(escalated);
    for (const auto& s : inherited) {
      if (auto it = parent->manifest.entries.find(s); it != parent->manifest.entries.end()) {
        manifest.entries[s] = it->second;
        for (const auto& op : it->second) manifest.risk_tiers[op] = parent->manifest.risk_tiers.at(op);
      }
    }
    ToolManifest extra = cfg.manifest_for(escalated);
    for (auto& [s, ops] : extra.entries) manifest.entries[s] = ops;
    for (auto& [op, tier] : extra.risk_tiers) manifest.risk_tiers[op] = tier;
    schema = narrow_schema(parent->output_schema, inherited);
    for (auto& [s, tags] : cfg.schema_for(escalated).permitted_tags) schema.permitted_tags[s] = tags;
    add(CheckId::kC2a, CheckStatus::kSkipped, "P1 disabled; manifest taken from registry");
  }

  // C3 intent, always against the root goal
  DelegationChain lineage = store_->reconstruct(parent->id, sw.enabled(4));
  const std::string& root_goal = lineage.tokens.front().intent.text;
  if (!sw.enabled(2)) {
    add(CheckId::kC3, CheckStatus::kSkipped, "P2 disabled");
  } else {
    IntentVerdict v = verify_intent(root_goal, req.subtask, *options_.classifier,
                                    options_.intent_config);
    std::string detail = std::string(decision_name(v.decision)) + " at " +
                         std::string(intent_layer_name(v.layer)) + " (" +
                         std::string(nli_label_name(v.nli_label)) + ")";
    add(CheckId::kC3, v.decision == Decision::kAllow ? CheckStatus::kPass : CheckStatus::kFail,
        detail);
    report.intent = std::move(v);
  }

  // C4 policy conjunction
  std::string src_org = cfg.org_of_agent(parent->dst);
  PolicySet policies = apply_boundary_policies(req.requested_policies.value_or(parent->policies),
                                               src_org, dst_org, cfg.boundary);
  if (!sw.enabled(3)) {
    add(CheckId::kC4, CheckStatus::kSkipped, "P3 disabled");
  } else {
    PolicySet dropped = lineage.tokens.front().policies.minus(policies).united(
        parent->policies.minus(policies));
    if (dropped.empty()) {
      add(CheckId::kC4, CheckStatus::kPass, "root controls preserved");
    } else {
      add(CheckId::kC4, CheckStatus::kFail, "drops " + join(dropped.items()));
    }
  }

  // C5 parent liveness
  std::int64_t now = clock().now_ms();
  if (store_->is_revoked(parent->id)) {
    add(CheckId::kC5, CheckStatus::kFail, "parent token revoked");
  } else if (now >= parent->expires_at) {
    add(CheckId::kC5, CheckStatus::kFail, "parent token expired");
  } else {
    add(CheckId::kC5, CheckStatus::kPass, "parent active");
  }

  if (!report.issuable()) {
    store_->append_event({now, chain_id, parent->id, std::string(audit_event::kRejected),
                          {{"dst", req.dst_agent}, {"subtask", req.subtask}, {"report", report.to_json()}}});
    return out;
  }

  DelegationToken child;
  child.id = options_.id_generator();
  child.src = parent->dst;
  child.dst = req.dst_agent;
  child.scope = req.requested_scope;
  child.intent.text = req.subtask;
  child.policies = std::move(policies);
  child.manifest = std::move(manifest);
  child.output_schema = std::move(schema);
  child.parent_hash = *store_->recorded_hash(parent->id);
  child.expires_at = std::min(parent->expires_at, now + req.ttl_ms.value_or(cfg.token_ttl_ms));
  try {
    child.signatures = options_.signer->sign(child);
  } catch (const Error& e) {
    store_->append_event({now, chain_id, parent->id, std::string(audit_event::kRejected),
                          {{"dst", req.dst_agent}, {"error", e.what()}, {"report", report.to_json()}}});
    throw;
  }
  store_->store_token(child, report.to_json(), true);
  out.token = std::move(child);
  return out;
}

RiskTier Das::tier_for(const DelegationToken& token, const ApiCallAttempt& attempt) const {
  if (!attempt.normalized) return RiskTier::kHigh;
  auto matched = token.manifest.match(token.scope, *attempt.normalized);
  if (!matched) return RiskTier::kHigh;
  auto it = token.manifest.risk_tiers.find(*matched);
  return it == token.manifest.risk_tiers.end() ? RiskTier::kHigh : it->second;
}

bool Das::revoked_for(const std::string& token_id, RiskTier tier) {
  CheckMode mode = cascade_.mode_for(tier);
  // The live proxy never skips revocation: audit-tier calls read the
  // heartbeat view and are additionally logged for post-hoc review.
  if (mode == CheckMode::kAudit) mode = CheckMode::kHeartbeat;
  return view_->is_revoked(token_id, mode);
}

void Das::on_violation(const std::string& token_id, const std::string& reason) {
  if (options_.revoke_on_violation) revoke(token_id, reason);
}

EnforcementVerdict Das::enforce(const std::string& token_id, const std::string& method,
                                const std::string& path) {
  auto token = store_->get(token_id);
  if (!token) fail(ErrorCode::kUnknownToken, "unknown token " + token_id);
  auto attempt = ApiCallAttempt::make(token_id, method, path);
  RiskTier tier = tier_for(*token, attempt);
  bool revoked = revoked_for(token_id, tier);

  EnforcementVerdict verdict;
  if (!options_.switchboard.enabled(6)) {
    verdict = revoked ? EnforcementVerdict::block(EnforcementReason::kTokenRevoked, {token_id})
                      : EnforcementVerdict::allow();
  } else {
    bool expired = clock().now_ms() >= token->expires_at;
    verdict = enforce_scope(attempt, *token, {revoked, expired});
  }

  std::string shown = attempt.normalized ? attempt.normalized->to_string()
                                         : attempt.method + " " + attempt.raw_path.substr(0, 256);
  nlohmann::json detail{{"op", shown},
                        {"tier", tier_name(tier)},
                        {"mode", check_mode_name(cascade_.mode_for(tier))},
                        {"decision", decision_name(verdict.decision)},
                        {"reason", enforcement_reason_name(verdict.reason)}};
  store_->append_event({clock().now_ms(), store_->chain_id_of(token_id), token_id,
                        std::string(audit_event::kEnforce), std::move(detail)},
                       tier == RiskTier::kHigh);
  if (verdict.reason == EnforcementReason::kNotInManifest ||
      verdict.reason == EnforcementReason::kMalformedPath) {
    on_violation(token_id, "P6 " + std::string(enforcement_reason_name(verdict.reason)));
  }
  return verdict;
}

EnforcementVerdict Das::validate_output(const AgentOutput& output) {
  auto token = store_->get(output.token_id);
  if (!token) fail(ErrorCode::kUnknownToken, "unknown token " + output.token_id);
  EnforcementVerdict verdict;
  if (!options_.switchboard.enabled(7)) {
    verdict = EnforcementVerdict::allow();
  } else if (store_->is_revoked(output.token_id)) {
    verdict = EnforcementVerdict::block(EnforcementReason::kTokenRevoked, {output.token_id});
  } else if (clock().now_ms() >= token->expires_at) {
    verdict = EnforcementVerdict::block(EnforcementReason::kTokenExpired, {output.token_id});
  } else {
    verdict = das::validate_output(output, *token);
  }
  nlohmann::json detail{{"scope_element", output.scope_element},
                        {"tags", std::vector<std::string>(output.tags.begin(), output.tags.end())},
                        {"decision", decision_name(verdict.decision)},
                        {"reason", enforcement_reason_name(verdict.reason)}};
  store_->append_event({clock().now_ms(), store_->chain_id_of(output.token_id), output.token_id,
                        std::string(audit_event::kOutput), std::move(detail)});
  if (verdict.reason == EnforcementReason::kTagNotPermitted) {
    on_violation(output.token_id, "P7 TAG_NOT_PERMITTED");
  }
  return verdict;
}

std::vector<std::string> Das::revoke(const std::string& token_id, const std::string& reason) {
  return revoke_cascade(token_id, *store_, reason, options_.switchboard.enabled(5));
}

DelegationChain Das::reconstruct(const std::string& token_id) const {
  return store_->reconstruct(token_id, options_.switchboard.enabled(4));
}

std::vector<ChainViolation> Das::audit(const std::string& token_id) const {
  DelegationChain chain = reconstruct(token_id);
  if (!options_.switchboard.enabled(4)) return {};
  const TokenSigner& signer = *options_.signer;
  return verify_chain(chain, [&signer](const DelegationToken& t) { return signer.verify(t); });
}

nlohmann::json token_to_json(const DelegationToken& t) {
  nlohmann::json manifest = nlohmann::json::object();
  for (const auto& [scope, ops] : t.manifest.entries) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& op : ops) {
      auto tier = t.manifest.risk_tiers.find(op);
      list.push_back({{"op", op.to_string()},
                      {"tier", tier == t.manifest.risk_tiers.end() ? "HIGH" : tier_name(tier->second)}});
    }
    manifest[scope] = list;
  }
  nlohmann::json schema = nlohmann::json::object();
  for (const auto& [scope, tags] : t.output_schema.permitted_tags) {
    schema[scope] = std::vector<std::string>(tags.begin(), tags.end());
  }
  nlohmann::json sigs = nlohmann::json::array();
  for (const auto& s : t.signatures) sigs.push_back({{"key_id", s.key_id}, {"mac", to_hex(s.mac)}});
  nlohmann::json intent{{"text", t.intent.text}};
  if (t.intent.vector) intent["vector"] = *t.intent.vector;
  return {{"id", t.id},
          {"src", t.src},
          {"dst", t.dst},
          {"scope", std::vector<std::string>(t.scope.begin(), t.scope.end())},
          {"intent", intent},
          {"policies", std::vector<std::string>(t.policies.begin(), t.policies.end())},
          {"manifest", manifest},
          {"output_schema", schema},
          {"parent_hash", t.is_root() ? std::string("ROOT") : to_hex(t.parent_hash)},
          {"hash", to_hex(token_hash(t))},
          {"expires_at", t.expires_at},
          {"signatures", sigs}};
}

nlohmann::json verdict_to_json(const EnforcementVerdict& v) {
  return {{"decision", decision_name(v.decision)},
          {"reason", enforcement_reason_name(v.reason)},
          {"offending", v.offending}};
}

nlohmann::json intent_verdict_to_json(const IntentVerdict& v) {
  nlohmann::json j{{"decision", decision_name(v.decision)},
                   {"layer", intent_layer_name(v.layer)},
                   {"nli_label", nli_label_name(v.nli_label)},
                   {"matched_keywords", v.matched_keywords}};
  if (!v.error.empty()) j["error"] = v.error;
  return j;
}

nlohmann::json violations_to_json(const std::vector<ChainViolation>& violations) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : violations) {
    j.push_back({{"index", v.index}, {"kind", violation_kind_name(v.kind)}, {"detail", v.detail}});
  }
  return j;
}

}  // namespace das
