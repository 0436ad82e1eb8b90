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

#include "das/policy.hpp"

#include <set>

#include <json.hpp>

#include "das/data.hpp"
#include "das/error.hpp"

namespace das {

namespace {

constexpr std::size_t kControlRows = 20;
constexpr std::size_t kControlFamilies = 9;
constexpr std::size_t kAsiRows = 10;

nlohmann::json parse_config(std::string_view text, const char* what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string_view coverage_name(Coverage c) {
  switch (c) {
    case Coverage::kFull: return "FULL";
    case Coverage::kPartial: return "PARTIAL";
    case Coverage::kDetectPrevent: return "DETECT+PREVENT";
  }
  return "FULL";
}

std::string control_family(std::string_view control_id) {
  return std::string(control_id.substr(0, control_id.find('-')));
}

std::vector<ControlMapping> load_control_mappings(std::string_view json_text) {
  static const std::set<std::string> kProperties{"P1", "P2", "P3", "P4", "P5",
                                                 "P6", "P7", "IPDP", "DAS"};
  auto j = parse_config(json_text, "control mappings");
  std::vector<ControlMapping> out;
  std::set<std::string> ids, families;
  try {
    for (const auto& row : j.at("controls")) {
      ControlMapping m{row.at("control_id").get<std::string>(),
                       row.at("control_name").get<std::string>(),
                       row.at("agent_interpretation").get<std::string>(),
                       row.at("dcc_property").get<std::string>()};
      if (!kProperties.count(m.dcc_property)) {
        fail(ErrorCode::kConfigError, "bad dcc_property for " + m.control_id);
      }
      if (!ids.insert(m.control_id).second) {
        fail(ErrorCode::kConfigError, "duplicate control " + m.control_id);
      }
      families.insert(control_family(m.control_id));
      out.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("control mappings: ") + e.what());
  }
  if (out.size() != kControlRows) {
    fail(ErrorCode::kConfigError, "expected 20 control rows, got " + std::to_string(out.size()));
  }
  if (families.size() != kControlFamilies) {
    fail(ErrorCode::kConfigError, "expected 9 control families");
  }
  return out;
}

std::vector<AsiMapping> load_asi_mappings(std::string_view json_text) {
  auto j = parse_config(json_text, "ASI mappings");
  std::vector<AsiMapping> out;
  std::set<std::string> ids;
  try {
    for (const auto& row : j.at("risks")) {
      AsiMapping m;
      m.asi_id = row.at("asi_id").get<std::string>();
      m.risk_name = row.at("risk_name").get<std::string>();
      m.properties = row.at("properties").get<std::vector<std::string>>();
      auto cov = row.at("coverage").get<std::string>();
      if (cov == "FULL") {
        m.coverage = Coverage::kFull;
      } else if (cov == "PARTIAL") {
        m.coverage = Coverage::kPartial;
      } else if (cov == "DETECT+PREVENT") {
        m.coverage = Coverage::kDetectPrevent;
      } else {
        fail(ErrorCode::kConfigError, "bad coverage for " + m.asi_id);
      }
      if (!ids.insert(m.asi_id).second) fail(ErrorCode::kConfigError, "duplicate " + m.asi_id);
      out.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("ASI mappings: ") + e.what());
  }
  if (out.size() != kAsiRows) {
    fail(ErrorCode::kConfigError, "expected 10 ASI rows, got " + std::to_string(out.size()));
  }
  return out;
}

const std::vector<ControlMapping>& control_mappings() {
  static const auto table = load_control_mappings(embedded_data("nist_controls.json"));
  return table;
}

const std::vector<AsiMapping>& asi_mappings() {
  static const auto table = load_asi_mappings(embedded_data("owasp_asi.json"));
  return table;
}

void BoundaryPolicyTable::set(const std::string& src_org, const std::string& dst_org,
                              PolicySet controls) {
  entries_[{src_org, dst_org}] = std::move(controls);
}

PolicySet BoundaryPolicyTable::lookup(const std::string& src_org,
                                      const std::string& dst_org) const {
  auto it = entries_.find({src_org, dst_org});
  return it == entries_.end() ? PolicySet{} : it->second;
}

PolicySet apply_boundary_policies(const PolicySet& parent_policies, const std::string& src_org,
                                  const std::string& dst_org, const BoundaryPolicyTable& table) {
  return parent_policies.united(table.lookup(src_org, dst_org));
}

std::vector<ComplianceViolation> check_chain_compliance(const DelegationChain& chain) {
  const auto& tokens = chain.tokens;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i - 1].dst != tokens[i].src) {
      fail(ErrorCode::kMalformedChain, "continuity broken at index " + std::to_string(i));
    }
    if (tokens[i].parent_hash != token_hash(tokens[i - 1])) {
      fail(ErrorCode::kMalformedChain, "hash link broken at index " + std::to_string(i));
    }
  }
  std::vector<ComplianceViolation> out;
  if (tokens.empty()) return out;
  const PolicySet& root = tokens.front().policies;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    PolicySet dropped = root.minus(tokens[i].policies);
    if (!dropped.empty()) out.push_back({i, tokens[i].id, std::move(dropped)});
  }
  return out;
}

}  // namespace das
