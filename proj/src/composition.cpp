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

#include <sstream>

#include "das/error.hpp"
#include "das/meta.hpp"

namespace das::meta {

std::string_view shared_mode_name(SharedMode m) {
  switch (m) {
    case SharedMode::kDisjoint: return "DISJOINT";
    case SharedMode::kReadShared: return "READ_SHARED";
    case SharedMode::kWriteShared: return "WRITE_SHARED";
  }
  return "DISJOINT";
}

void WriteImpactMonitor::on_read(const std::string& token_id, const std::string& resource) {
  seen_[token_id][resource] = version_[resource];
}

std::vector<std::string> WriteImpactMonitor::on_write(const std::string& token_id,
                                                      const std::string& resource) {
  std::uint64_t v = ++version_[resource];
  seen_[token_id][resource] = v;
  std::vector<std::string> reverified;
  if (!notification_) return reverified;
  for (auto& [other, reads] : seen_) {
    if (other == token_id || !reads.count(resource)) continue;
    reverified.push_back(other);
    if (reverify(other)) {
      for (auto& [r, seen] : reads) seen = version_[r];
    }
  }
  return reverified;
}

bool WriteImpactMonitor::reverify(const std::string& token_id) {
  if (das_.store().is_revoked(token_id)) return false;
  std::string reason;
  try {
    auto chain = das_.reconstruct(token_id);
    if (!das_.audit(token_id).empty()) reason = "lineage no longer verifies";
    const auto& goal = chain.tokens.front().intent.text;
    const auto& subtask = chain.tokens.back().intent.text;
    if (reason.empty() && chain.depth() > 1 &&
        verify_intent(goal, subtask, das_.classifier(), das_.intent_config()).decision != Decision::kAllow) {
      reason = "intent no longer holds";
    }
    if (reason.empty() && das_.store().status(token_id, das_.clock().now_ms()) != TokenStatus::kActive) {
      reason = "token not active";
    }
  } catch (const Error& e) {
    reason = e.what();
  }
  das_.store().append_event({0, das_.store().chain_id_of(token_id), token_id,
                             std::string(audit_event::kNotify),
                             {{"reverified", reason.empty()}, {"reason", reason}}});
  if (reason.empty()) return true;
  das_.revoke(token_id, "write-impact re-verification failed: " + reason);
  ++revoked_;
  return false;
}

std::vector<std::string> WriteImpactMonitor::stale_reads(const std::string& token_id) const {
  std::vector<std::string> out;
  auto it = seen_.find(token_id);
  if (it == seen_.end()) return out;
  for (const auto& [resource, seen] : it->second) {
    auto v = version_.find(resource);
    if (v != version_.end() && v->second > seen) out.push_back(resource);
  }
  return out;
}

std::vector<CompositionScenario> composition_scenarios() {
  using K = CompositionStep::Kind;
  std::vector<CompositionScenario> out;
  auto record = [](int n) { return "citizen/" + std::to_string(n); };
  int n = 1000;
  for (int i = 0; i < 25; ++i, n += 2) {
    // Chain 1 sometimes writes, but only to its own record.
    K second = i % 2 ? K::kWrite : K::kRead;
    out.push_back({"disjoint-" + std::to_string(i + 1), SharedMode::kDisjoint, "", std::nullopt,
                   {{0, K::kRead, record(n)}, {1, K::kRead, record(n + 1)}, {1, second, record(n + 1)},
                    {0, K::kAct, record(n)}, {1, K::kAct, record(n + 1)}}});
  }
  for (int i = 0; i < 20; ++i, ++n) {
    out.push_back({"read-shared-" + std::to_string(i + 1), SharedMode::kReadShared, record(n), std::nullopt,
                   {{0, K::kRead, record(n)}, {1, K::kRead, record(n)},
                    {0, K::kAct, record(n)}, {1, K::kAct, record(n)}}});
  }
  for (int i = 0; i < 5; ++i, ++n) {
    out.push_back({"write-shared-" + std::to_string(i + 1), SharedMode::kWriteShared, record(n), 1,
                   {{0, K::kRead, record(n)}, {1, K::kRead, record(n)}, {1, K::kWrite, record(n)},
                    {0, K::kAct, record(n)}, {1, K::kAct, record(n)}}});
  }
  return out;
}

namespace {

CompositionResult run_scenario(const CompositionScenario& sc, bool notification) {
  ManualClock clock;
  DasOptions o;
  o.clock = &clock;
  o.id_generator = sequential_id_generator("comp-");
  Das das(std::move(o));

  std::array<std::string, 2> tokens;
  auto r0 = das.initiate_chain("citizen-benefits", "determine applicant eligibility for benefits");
  auto c0 = das.delegate({r0.id, "RecordsAgent", ScopeSet{"read_records", "query_eligibility"},
                          "retrieve applicant records", std::nullopt, std::nullopt});
  auto r1 = das.initiate_chain("supervisor", "review and update benefits records");
  auto c1 = das.delegate({r1.id, "RecordsAgent", ScopeSet{"read_records", "write_records"},
                          "update applicant records", std::nullopt, std::nullopt});
  if (!c0.issued() || !c1.issued()) fail(ErrorCode::kInternal, "composition setup was refused");
  tokens = {c0.token->id, c1.token->id};

  WriteImpactMonitor monitor(das, notification);
  CompositionResult result{sc.id, sc.mode, true, "", 0};
  std::ostringstream detail;
  for (const auto& step : sc.steps) {
    const auto& tok = tokens[static_cast<std::size_t>(step.chain)];
    switch (step.kind) {
      case CompositionStep::Kind::kRead:
        if (das.enforce(tok, "GET", "/api/records/query").allowed()) monitor.on_read(tok, step.resource);
        break;
      case CompositionStep::Kind::kWrite:
        if (das.enforce(tok, "POST", "/api/records/update").allowed()) {
          result.reverified += static_cast<int>(monitor.on_write(tok, step.resource).size());
        }
        break;
      case CompositionStep::Kind::kAct: {
        const char* path = step.chain == 0 ? "/api/eligibility/check" : "/api/records/query";
        if (!das.enforce(tok, "GET", path).allowed()) break;
        auto stale = monitor.stale_reads(tok);
        if (!stale.empty()) {
          result.safe = false;
          detail << "chain " << step.chain << " acted on stale " << stale.front() << "; ";
        }
        break;
      }
    }
  }
  // Each chain must still verify on its own.
  for (const auto& tok : tokens) {
    if (!das.audit(tok).empty()) {
      result.safe = false;
      detail << "chain of " << tok << " fails verification; ";
    }
  }
  result.detail = detail.str();
  return result;
}

}  // namespace

std::size_t CompositionReport::safe_count() const {
  std::size_t n = 0;
  for (const auto& r : results) n += r.safe;
  return n;
}

nlohmann::json CompositionReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) {
    rows.push_back({{"id", r.id}, {"mode", shared_mode_name(r.mode)}, {"safe", r.safe},
                    {"reverified", r.reverified}, {"detail", r.detail}});
  }
  return {{"notification", notification}, {"safe", safe_count()}, {"total", results.size()},
          {"scenarios", rows}};
}

CompositionReport run_composition_suite(const std::vector<CompositionScenario>& scenarios,
                                        bool notification) {
  CompositionReport report;
  report.notification = notification;
  for (const auto& sc : scenarios) report.results.push_back(run_scenario(sc, notification));
  return report;
}

}  // namespace das::meta
