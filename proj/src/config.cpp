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

#include "das/config.hpp"

#include "das/data.hpp"
#include "das/error.hpp"

namespace das {

namespace {

template <class Set>
Set string_set(const nlohmann::json& j) {
  Set out;
  for (const auto& item : j) out.insert(item.get<std::string>());
  return out;
}

template <class Set>
nlohmann::json set_json(const Set& s) {
  return nlohmann::json(std::vector<std::string>(s.begin(), s.end()));
}

}  // namespace

DasConfig DasConfig::from_json(const nlohmann::json& j) {
  DasConfig c;
  try {
    c.token_ttl_ms = j.value("token_ttl_ms", c.token_ttl_ms);
    c.heartbeat_ms = j.value("heartbeat_ms", c.heartbeat_ms);
    c.default_entry_agent = j.value("default_entry_agent", std::string());
    for (const auto& [org, controls] : j.at("orgs").items()) {
      c.org_baselines[org] = string_set<PolicySet>(controls);
    }
    for (const auto& [role, scopes] : j.at("roles").items()) {
      c.roles[role] = string_set<ScopeSet>(scopes);
    }
    for (const auto& [user, rec] : j.at("users").items()) {
      c.users[user] = {rec.at("role").get<std::string>(), rec.at("org").get<std::string>()};
    }
    for (const auto& [agent, org] : j.at("agents").items()) {
      c.agents[agent] = org.get<std::string>();
    }
    for (const auto& [scope, entry] : j.at("scopes").items()) {
      auto& ops = c.registry.entries[scope];
      for (const auto& op : entry.at("operations")) {
        ApiOperation parsed = ApiOperation::parse(op.at("op").get<std::string>());
        auto tier = parse_tier(op.at("tier").get<std::string>());
        if (!tier) fail(ErrorCode::kConfigError, "bad tier for " + parsed.to_string());
        ops.insert(parsed);
        c.registry.risk_tiers[parsed] = *tier;
      }
      c.schemas.permitted_tags[scope] = string_set<TagSet>(entry.value("output_tags", nlohmann::json::array()));
    }
    for (const auto& row : j.value("boundary_policies", nlohmann::json::array())) {
      c.boundary.set(row.at("from").get<std::string>(), row.at("to").get<std::string>(),
                     string_set<PolicySet>(row.at("add")));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    fail(ErrorCode::kConfigError, std::string("config: ") + e.what());
  }

  for (const auto& [user, rec] : c.users) {
    if (!c.roles.count(rec.role)) fail(ErrorCode::kConfigError, user + ": undeclared role " + rec.role);
    if (!c.org_baselines.count(rec.org)) fail(ErrorCode::kConfigError, user + ": undeclared org " + rec.org);
  }
  for (const auto& [role, scopes] : c.roles) {
    for (const auto& s : scopes) {
      if (!c.registry.entries.count(s)) fail(ErrorCode::kConfigError, role + ": undeclared scope " + s);
    }
  }
  for (const auto& [agent, org] : c.agents) {
    if (!c.org_baselines.count(org)) fail(ErrorCode::kConfigError, agent + ": undeclared org " + org);
  }
  if (!c.default_entry_agent.empty() && !c.agents.count(c.default_entry_agent)) {
    fail(ErrorCode::kConfigError, "default entry agent is not registered");
  }
  if (c.token_ttl_ms <= 0 || c.heartbeat_ms <= 0) {
    fail(ErrorCode::kConfigError, "ttl and heartbeat must be positive");
  }
  return c;
}

DasConfig DasConfig::from_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("config: ") + e.what());
  }
  return from_json(j);
}

DasConfig DasConfig::defaults() { return from_text(embedded_data("default_config.json")); }

nlohmann::json DasConfig::to_json() const {
  nlohmann::json j;
  j["token_ttl_ms"] = token_ttl_ms;
  j["heartbeat_ms"] = heartbeat_ms;
  j["default_entry_agent"] = default_entry_agent;
  for (const auto& [org, controls] : org_baselines) j["orgs"][org] = set_json(controls);
  for (const auto& [role, scopes] : roles) j["roles"][role] = set_json(scopes);
  for (const auto& [user, rec] : users) j["users"][user] = {{"role", rec.role}, {"org", rec.org}};
  for (const auto& [agent, org] : agents) j["agents"][agent] = org;
  for (const auto& [scope, ops] : registry.entries) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& op : ops) {
      list.push_back({{"op", op.to_string()}, {"tier", tier_name(registry.risk_tiers.at(op))}});
    }
    j["scopes"][scope]["operations"] = list;
    auto tags = schemas.permitted_tags.find(scope);
    j["scopes"][scope]["output_tags"] =
        tags == schemas.permitted_tags.end() ? nlohmann::json::array() : set_json(tags->second);
  }
  j["boundary_policies"] = nlohmann::json::array();
  for (const auto& [pair, controls] : boundary.entries()) {
    j["boundary_policies"].push_back({{"from", pair.first}, {"to", pair.second}, {"add", set_json(controls)}});
  }
  return j;
}

ToolManifest DasConfig::manifest_for(const ScopeSet& scope) const {
  ToolManifest out;
  for (const auto& s : scope) {
    auto it = registry.entries.find(s);
    if (it == registry.entries.end()) continue;
    out.entries[s] = it->second;
    for (const auto& op : it->second) out.risk_tiers[op] = registry.risk_tiers.at(op);
  }
  return out;
}

OutputSchema DasConfig::schema_for(const ScopeSet& scope) const {
  return narrow_schema(schemas, scope);
}

std::string DasConfig::org_of_agent(const std::string& agent) const {
  auto it = agents.find(agent);
  return it == agents.end() ? std::string() : it->second;
}

}  // namespace das
