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

#include "das/api.hpp"

#include <chrono>
#include <thread>

#include "das/error.hpp"

namespace das {

namespace {

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
  return {status, {{"error", code}, {"message", message}}};
}

template <class Set>
Set set_field(const nlohmann::json& body, const char* key) {
  Set out;
  for (const auto& item : body.at(key)) out.insert(item.get<std::string>());
  return out;
}

const std::string& str_field(const nlohmann::json& body, const char* key) {
  return body.at(key).get_ref<const std::string&>();
}

ApiResponse post_chains(Das& das, const nlohmann::json& body) {
  std::optional<std::string> agent;
  if (body.contains("agent")) agent = body.at("agent").get<std::string>();
  DelegationToken t = das.initiate_chain(str_field(body, "user_id"), str_field(body, "goal"), agent);
  return {201,
          {{"token_id", t.id},
           {"chain_id", das.store().chain_id_of(t.id)},
           {"wire", to_wire(t)},
           {"token", token_to_json(t)}}};
}

ApiResponse post_delegations(Das& das, const nlohmann::json& body) {
  DelegationRequest req;
  req.parent_token_id = str_field(body, "parent_token_id");
  req.dst_agent = str_field(body, "dst_agent");
  req.requested_scope = set_field<ScopeSet>(body, "requested_scope");
  req.subtask = str_field(body, "subtask");
  if (body.contains("requested_policies")) {
    req.requested_policies = set_field<PolicySet>(body, "requested_policies");
  }
  if (body.contains("ttl_ms")) req.ttl_ms = body.at("ttl_ms").get<std::int64_t>();
  DelegationOutcome out = das.delegate(req);
  nlohmann::json j = out.report.to_json();
  j["issued"] = out.issued();
  if (out.issued()) {
    j["token_id"] = out.token->id;
    j["wire"] = to_wire(*out.token);
    j["token"] = token_to_json(*out.token);
    return {201, j};
  }
  const CheckResult* failed = out.report.first_failure();
  j["failed_check"] = failed ? check_id_name(failed->id) : "";
  return {403, j};
}

ApiResponse post_enforce(Das& das, const nlohmann::json& body) {
  auto v = das.enforce(str_field(body, "token_id"), str_field(body, "method"),
                       str_field(body, "path"));
  nlohmann::json j = verdict_to_json(v);
  // The proxy does not forward traffic; an allowed call gets a stub reply.
  if (v.allowed()) j["upstream"] = {{"status", 200}, {"stub", true}};
  return {v.allowed() ? 200 : 403, j};
}

ApiResponse post_validate(Das& das, const nlohmann::json& body) {
  AgentOutput out;
  out.token_id = str_field(body, "token_id");
  out.scope_element = body.value("scope_element", std::string());
  out.tags = set_field<TagSet>(body, "tags");
  out.payload = body.contains("payload") ? body.at("payload").dump() : std::string();
  auto v = das.validate_output(out);
  return {v.allowed() ? 200 : 403, verdict_to_json(v)};
}

ApiResponse post_revoke(Das& das, const nlohmann::json& body) {
  auto revoked = das.revoke(str_field(body, "token_id"), body.value("reason", std::string("manual")));
  return {200, {{"revoked", revoked}}};
}

ApiResponse get_reconstruct(Das& das, const std::string& token_id) {
  DelegationChain chain = das.reconstruct(token_id);
  nlohmann::json tokens = nlohmann::json::array();
  std::int64_t now = das.clock().now_ms();
  for (const auto& t : chain.tokens) {
    nlohmann::json tj = token_to_json(t);
    tj["status"] = token_status_name(das.store().status(t.id, now));
    tj["checks"] = das.store().issuance_checks(t.id).value_or(nullptr);
    tj["wire"] = to_wire(t);
    tokens.push_back(std::move(tj));
  }
  return {200,
          {{"token_id", token_id},
           {"chain_id", das.store().chain_id_of(token_id)},
           {"depth", chain.depth()},
           {"tokens", tokens},
           {"violations", violations_to_json(das.audit(token_id))}}};
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
    case ErrorCode::kEmptyIntent:
      return 400;
    case ErrorCode::kUnknownToken:
    case ErrorCode::kUnknownParentToken:
    case ErrorCode::kUnknownUser:
    case ErrorCode::kUnknownRole:
      return 404;
    case ErrorCode::kBrokenChain:
    case ErrorCode::kMalformedChain:
    case ErrorCode::kDuplicateToken:
    case ErrorCode::kOrphanToken:
      return 409;
    case ErrorCode::kThresholdNotMet:
    case ErrorCode::kKeyUnavailable:
    case ErrorCode::kClassifierUnavailable:
      return 503;
    default:
      return 500;
  }
}

ApiResponse handle_request(Das& das, const std::string& method, const std::string& path,
                           const nlohmann::json& body) {
  try {
    if (method == "GET" && path == "/health") {
      return {200, {{"status", "ok"}, {"tokens", das.store().size()},
                    {"switchboard", das.switchboard().to_string()}}};
    }
    constexpr std::string_view kChains = "/chains/";
    constexpr std::string_view kReconstruct = "/reconstruct";
    if (method == "GET" && path.size() > kChains.size() + kReconstruct.size() &&
        path.compare(0, kChains.size(), kChains) == 0 &&
        path.compare(path.size() - kReconstruct.size(), kReconstruct.size(), kReconstruct) == 0) {
      std::string id = path.substr(kChains.size(), path.size() - kChains.size() - kReconstruct.size());
      return get_reconstruct(das, id);
    }
    if (method == "POST") {
      if (!body.is_object()) return error_response(400, "INVALID_ARGUMENT", "body must be an object");
      if (path == "/chains") return post_chains(das, body);
      if (path == "/delegations") return post_delegations(das, body);
      if (path == "/enforce") return post_enforce(das, body);
      if (path == "/validate-output") return post_validate(das, body);
      if (path == "/revoke") return post_revoke(das, body);
    }
    return error_response(404, "NOT_FOUND", method + " " + path);
  } catch (const Error& e) {
    return error_response(http_status_for(e.code()), error_code_name(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "INVALID_ARGUMENT", e.what());
  }
}

ApiResponse InProcessClient::call(const std::string& method, const std::string& path,
                                  const nlohmann::json& body) {
  return handle_request(das_, method, path, body);
}

void InProcessClient::wait_ms(std::int64_t ms) {
  if (clock_ != nullptr) {
    clock_->advance(ms);
  } else {
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  }
}

}  // namespace das
