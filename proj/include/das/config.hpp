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

// Registries the service consults: users and roles, org baselines, agent
// identities, the scope -> API registry, output schemas and boundary controls.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

#include "das/policy.hpp"
#include "das/token.hpp"

namespace das {

struct UserRecord {
  std::string role;
  std::string org;
};

struct DasConfig {
  std::int64_t token_ttl_ms = 3'600'000;
  std::int64_t heartbeat_ms = 100;
  std::string default_entry_agent;
  std::map<std::string, PolicySet> org_baselines;
  std::map<std::string, ScopeSet> roles;
  std::map<std::string, UserRecord> users;
  std::map<std::string, std::string> agents;  // agent id -> org
  ToolManifest registry;                      // every scope's operations
  OutputSchema schemas;
  BoundaryPolicyTable boundary;

  // Throws kConfigError on missing or inconsistent entries (a user whose
  // role or org is undeclared, an operation without a tier, ...).
  static DasConfig from_json(const nlohmann::json& j);
  static DasConfig from_text(std::string_view text);
  static DasConfig defaults();
  nlohmann::json to_json() const;

  // Manifest/schema for a scope set straight from the registry.
  ToolManifest manifest_for(const ScopeSet& scope) const;
  OutputSchema schema_for(const ScopeSet& scope) const;
  std::string org_of_agent(const std::string& agent) const;  // "" if unknown
};

}  // namespace das
