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

#include "das/forensics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "das/error.hpp"

namespace das::forensics {

namespace {

using nlohmann::json;

template <class Set>
std::vector<std::string> list(const Set& s) {
  return {s.begin(), s.end()};
}

std::string joined(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& i : items) out += (out.empty() ? "" : ", ") + i;
  return out;
}

Hop hop_from_token(std::size_t index, const DelegationToken& t, const DelegationToken* parent) {
  Hop h;
  h.index = index;
  h.token_id = t.id;
  h.src = t.src;
  h.dst = t.dst;
  h.scope = list(t.scope);
  h.intent = t.intent.text;
  if (parent != nullptr) {
    h.scope_removed = list(parent->scope.minus(t.scope));
    h.scope_added = list(t.scope.minus(parent->scope));
    h.policies_added = list(t.policies.minus(parent->policies));
    h.policies_removed = list(parent->policies.minus(t.policies));
  } else {
    h.policies_added = list(t.policies);
  }
  return h;
}

std::vector<std::string> strings(const json& j) {
  std::vector<std::string> out;
  if (j.is_array()) {
    for (const auto& s : j) out.push_back(s.get<std::string>());
  }
  return out;
}

std::vector<std::string> minus(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  for (const auto& x : a) {
    if (std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
  }
  return out;
}

std::optional<ViolationKind> kind_from_name(const std::string& name) {
  for (auto k : {ViolationKind::kRoot, ViolationKind::kContinuity, ViolationKind::kHashLink,
                 ViolationKind::kSignature, ViolationKind::kScopeEscalation, ViolationKind::kPolicyDrop}) {
    if (violation_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

AuditReport audit_chain(const ChainStore& store, const std::string& token_id,
                        const SignatureVerifier& verifier, std::int64_t now_ms) {
  AuditReport rep;
  rep.token_id = token_id;
  rep.signatures_checked = static_cast<bool>(verifier);
  DelegationChain chain;
  try {
    chain = store.reconstruct(token_id, true);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBrokenChain) throw;
    rep.broken = e.what();
    chain = store.reconstruct_partial(token_id);
  }
  rep.chain_id = store.chain_id_of(token_id);
  for (std::size_t i = 0; i < chain.tokens.size(); ++i) {
    const DelegationToken& t = chain.tokens[i];
    Hop h = hop_from_token(i, t, i == 0 ? nullptr : &chain.tokens[i - 1]);
    h.checks = store.issuance_checks(t.id).value_or(json());
    h.status = store.contains(t.id) ? std::string(token_status_name(store.status(t.id, now_ms))) : "UNKNOWN";
    auto recorded = store.recorded_hash(t.id);
    h.hash_mismatch = !recorded || *recorded != token_hash(t);
    rep.hops.push_back(std::move(h));
  }
  rep.violations = verify_chain(chain, verifier);
  return rep;
}

AuditReport audit_service(const Das& das, const std::string& token_id) {
  const TokenSigner& signer = das.signer();
  return audit_chain(das.store(), token_id, [&signer](const DelegationToken& t) { return signer.verify(t); },
                     das.clock().now_ms());
}

AuditReport audit_log_text(std::string_view ndjson, const std::string& token_id, const KeyStore* keys) {
  auto store = ChainStore::from_export(ndjson);
  SignatureVerifier verifier;
  if (keys != nullptr) verifier = [keys](const DelegationToken& t) { return verify_signature(t, *keys); };
  return audit_chain(*store, token_id, verifier, SystemClock::instance().now_ms());
}

AuditReport audit_log_file(const std::filesystem::path& path, const std::string& token_id, const KeyStore* keys) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return audit_log_text(ss.str(), token_id, keys);
}

AuditReport audit_response(int status, const json& body, const std::string& token_id) {
  AuditReport rep;
  rep.token_id = token_id;
  if (status == 409 && body.value("error", std::string()) == error_code_name(ErrorCode::kBrokenChain)) {
    rep.broken = body.value("message", std::string("broken chain"));
    return rep;
  }
  if (status != 200) {
    std::string code = body.value("error", std::string("INTERNAL"));
    ErrorCode ec = code == error_code_name(ErrorCode::kUnknownToken) ? ErrorCode::kUnknownToken : ErrorCode::kIoError;
    fail(ec, "server returned " + std::to_string(status) + ": " + body.value("message", code));
  }
  try {
    rep.chain_id = body.at("chain_id");
    const json& tokens = body.at("tokens");
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const json& t = tokens[i];
      Hop h;
      h.index = i;
      h.token_id = t.at("id");
      h.src = t.at("src");
      h.dst = t.at("dst");
      h.scope = strings(t.at("scope"));
      h.intent = t.at("intent").is_object() ? t.at("intent").value("text", std::string()) : t.at("intent").get<std::string>();
      auto policies = strings(t.at("policies"));
      if (i > 0) {
        const json& p = tokens[i - 1];
        auto pscope = strings(p.at("scope"));
        auto ppol = strings(p.at("policies"));
        h.scope_removed = minus(pscope, h.scope);
        h.scope_added = minus(h.scope, pscope);
        h.policies_added = minus(policies, ppol);
        h.policies_removed = minus(ppol, policies);
      } else {
        h.policies_added = policies;
      }
      h.checks = t.value("checks", json());
      h.status = t.value("status", std::string("UNKNOWN"));
      rep.hops.push_back(std::move(h));
    }
    for (const auto& v : body.at("violations")) {
      ChainViolation cv;
      cv.index = v.at("index");
      cv.kind = kind_from_name(v.at("kind")).value_or(ViolationKind::kHashLink);
      cv.detail = v.value("detail", std::string());
      rep.violations.push_back(std::move(cv));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParseError, std::string("unexpected reconstruction response: ") + e.what());
  }
  return rep;
}

std::string AuditReport::lineage() const {
  std::string out;
  for (auto it = hops.rbegin(); it != hops.rend(); ++it) out += it->token_id + " -> ";
  return out + "ROOT";
}

json AuditReport::to_json() const {
  json hs = json::array();
  for (const auto& h : hops) {
    hs.push_back({{"index", h.index},
                  {"token_id", h.token_id},
                  {"src", h.src},
                  {"dst", h.dst},
                  {"scope", h.scope},
                  {"scope_removed", h.scope_removed},
                  {"scope_added", h.scope_added},
                  {"policies_added", h.policies_added},
                  {"policies_removed", h.policies_removed},
                  {"intent", h.intent},
                  {"checks", h.checks},
                  {"status", h.status},
                  {"hash_mismatch", h.hash_mismatch}});
  }
  json vs = json::array();
  for (const auto& v : violations) {
    vs.push_back({{"index", v.index}, {"kind", violation_kind_name(v.kind)}, {"detail", v.detail}});
  }
  json j{{"token_id", token_id}, {"chain_id", chain_id},         {"depth", hops.size()},
         {"lineage", lineage()}, {"hops", hs},                    {"violations", vs},
         {"clean", clean()},     {"signatures_checked", signatures_checked}};
  if (broken) j["broken"] = *broken;
  return j;
}

std::string AuditReport::render_table() const {
  std::ostringstream os;
  os << "Chain " << (chain_id.empty() ? "?" : chain_id) << ", depth " << hops.size() << "\n";
  os << "Lineage: " << lineage() << "\n";
  if (!signatures_checked) os << "Signatures: not checked (no keys supplied)\n";
  for (const auto& h : hops) {
    bool flagged = h.hash_mismatch && broken;
    for (const auto& v : violations) flagged = flagged || v.index == h.index;
    os << "\n" << (flagged ? "!! " : "   ") << "[" << h.index << "] " << h.token_id << "  "
       << (h.src.empty() ? "(user)" : h.src) << " -> " << h.dst << "  " << h.status;
    if (h.hash_mismatch && broken) os << "  HASH MISMATCH";
    os << "\n";
    os << "     scope:    " << joined(h.scope) << "\n";
    if (!h.scope_removed.empty()) os << "     narrowed: -" << joined(h.scope_removed) << "\n";
    if (!h.scope_added.empty()) os << "     ESCALATED: +" << joined(h.scope_added) << "\n";
    if (!h.policies_added.empty()) os << "     policy:   +" << joined(h.policies_added) << "\n";
    if (!h.policies_removed.empty()) os << "     DROPPED:  -" << joined(h.policies_removed) << "\n";
    os << "     intent:   " << h.intent << "\n";
    if (h.checks.is_object() && h.checks.contains("checks")) {
      os << "     checks:  ";
      for (const auto& c : h.checks.at("checks")) {
        os << " " << c.value("check", std::string()) << "=" << c.value("status", std::string());
      }
      os << "\n";
    }
  }
  os << "\n";
  if (broken) os << "BROKEN CHAIN: " << *broken << "\n";
  if (violations.empty()) {
    os << (broken ? "" : "No violations.\n");
  } else {
    os << violations.size() << " violation(s):\n";
    for (const auto& v : violations) {
      os << "  [" << v.index << "] " << violation_kind_name(v.kind) << ": " << v.detail << "\n";
    }
  }
  return os.str();
}

}  // namespace das::forensics
