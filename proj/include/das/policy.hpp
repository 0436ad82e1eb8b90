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

// Compliance tables and the policy-conjunction check. Controls are opaque
// identifiers; the engine only reasons about set containment.

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "das/token.hpp"

namespace das {

struct ControlMapping {
  std::string control_id;
  std::string control_name;
  std::string agent_interpretation;
  std::string dcc_property;  // P1..P7, IPDP or DAS
};

enum class Coverage { kFull, kPartial, kDetectPrevent };
std::string_view coverage_name(Coverage c);

struct AsiMapping {
  std::string asi_id;
  std::string risk_name;
  std::vector<std::string> properties;
  Coverage coverage = Coverage::kFull;
};

// Loaders validate shape and counts and throw kConfigError on mismatch.
std::vector<ControlMapping> load_control_mappings(std::string_view json_text);
std::vector<AsiMapping> load_asi_mappings(std::string_view json_text);
// The shipped tables.
const std::vector<ControlMapping>& control_mappings();
const std::vector<AsiMapping>& asi_mappings();

// "AC-17" -> "AC"
std::string control_family(std::string_view control_id);

// Controls added when a delegation crosses from one org to another. Lookups
// of unknown pairs yield the empty set.
class BoundaryPolicyTable {
 public:
  void set(const std::string& src_org, const std::string& dst_org, PolicySet controls);
  PolicySet lookup(const std::string& src_org, const std::string& dst_org) const;
  const std::map<std::pair<std::string, std::string>, PolicySet>& entries() const {
    return entries_;
  }

 private:
  std::map<std::pair<std::string, std::string>, PolicySet> entries_;
};

PolicySet apply_boundary_policies(const PolicySet& parent_policies, const std::string& src_org,
                                  const std::string& dst_org, const BoundaryPolicyTable& table);

struct ComplianceViolation {
  std::size_t index = 0;
  std::string token_id;
  PolicySet dropped;
};

// One entry per token that lost a root control. Throws kMalformedChain when
// the chain breaks continuity or hash linking.
std::vector<ComplianceViolation> check_chain_compliance(const DelegationChain& chain);

}  // namespace das
