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

// Red-team and robustness suites. Both drive a live HTTP server so the
// transport's own parsing is part of what gets exercised.

#include <atomic>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "das/bench.hpp"
#include "das/error.hpp"

namespace das::bench {

namespace {

using nlohmann::json;

constexpr const char* kSubtask = "retrieve applicant records for case review";

class Harness {
 public:
  Harness() {
    DasOptions o;
    o.config = bench_config();
    o.id_generator = sequential_id_generator("rt");
    das_ = std::make_unique<Das>(std::move(o));
    server_ = std::make_unique<DasServer>(*das_);
    int port = server_->start("127.0.0.1", 0);
    client_ = std::make_unique<HttpClient>("127.0.0.1", port);
  }
  ~Harness() { server_->stop(); }

  DasClient& client() { return *client_; }
  std::int64_t heartbeat_ms() const { return das_->config().heartbeat_ms; }

  std::string root(const std::string& user = "benefits-caseworker") {
    ApiResponse r = client_->call("POST", "/chains",
                                  {{"user_id", user}, {"goal", "process disability benefits applications"}});
    if (r.status != 201) fail(ErrorCode::kInternal, "root issuance failed: " + r.body.dump());
    return r.body.at("token_id");
  }

  ApiResponse delegate(const std::string& parent, const std::string& agent,
                       const std::vector<std::string>& scope, json extra = json::object()) {
    json body{{"parent_token_id", parent}, {"dst_agent", agent}, {"requested_scope", scope},
              {"subtask", kSubtask}};
    body.update(extra);
    return client_->call("POST", "/delegations", body);
  }

  // Fresh RecordsAgent token holding benefits.read_records.
  std::string records_token() {
    ApiResponse r = delegate(root(), "RecordsAgent", {"benefits.read_records"});
    if (r.status != 201) fail(ErrorCode::kInternal, "delegation failed: " + r.body.dump());
    return r.body.at("token_id");
  }

  ApiResponse enforce(const std::string& token, const std::string& method, const std::string& path) {
    return client_->call("POST", "/enforce", {{"token_id", token}, {"method", method}, {"path", path}});
  }

  ApiResponse output(const std::string& token, const std::vector<std::string>& tags) {
    return client_->call("POST", "/validate-output",
                         {{"token_id", token}, {"scope_element", "benefits.read_records"}, {"tags", tags}});
  }

 private:
  std::unique_ptr<Das> das_;
  std::unique_ptr<DasServer> server_;
  std::unique_ptr<HttpClient> client_;
};

std::string reason_of(const ApiResponse& r) {
  if (r.body.contains("reason")) return r.body.at("reason");
  if (r.body.contains("failed_check")) return "failed " + r.body.at("failed_check").get<std::string>();
  if (r.body.contains("error")) return r.body.at("error");
  return "";
}

SuiteCase judged(std::string family, std::string name, bool attack, const ApiResponse& r) {
  SuiteCase c{std::move(family), std::move(name), attack, false, ""};
  bool allowed = r.status == 200 || r.status == 201;
  c.passed = attack ? !allowed : allowed;
  c.detail = std::to_string(r.status) + " " + reason_of(r);
  return c;
}

void redteam(Harness& h, std::vector<SuiteCase>& out) {
  auto probe = [&](const std::string& family, const std::string& method, const std::string& path) {
    out.push_back(judged(family, method + " " + path, true, h.enforce(h.records_token(), method, path)));
  };

  for (const char* p : {"/api/benefits/records/../../admin", "/api/benefits/records/%2e%2e/%2e%2e/admin",
                        "/api/benefits/documents/..%2f..%2fadmin", "/api/benefits/documents/%252e%252e",
                        "/api/benefits/records/query/../../../etc/passwd",
                        "/api/benefits/records/.%2e/update"}) {
    probe("path_traversal", "GET", p);
  }
  for (const char* m : {"POST", "PUT", "PATCH", "DELETE", "HEAD", "OPTIONS", "GET POST", "G3T"}) {
    probe("method_override", m, "/api/benefits/records/query");
  }
  probe("case_sensitivity", "POST", "/API/BENEFITS/RECORDS/UPDATE");
  probe("case_sensitivity", "POST", "/Api/Benefits/External/Send");
  probe("case_sensitivity", "GET", "/api/BENEFITS/Admin/Records");
  probe("case_sensitivity", "GET", "/API/Benefits/Records/Export");
  for (const char* p : {"/api/v2/benefits/records/query", "/api/benefits/v1/records/query",
                        "/v1/api/benefits/records/query", "/api/benefits/records/query/v2"}) {
    probe("api_versioning", "GET", p);
  }
  probe("scope_boundary", "POST", "/api/benefits/records/update");
  probe("scope_boundary", "POST", "/api/benefits/notices/send");
  probe("scope_boundary", "GET", "/api/benefits/eligibility/check");
  probe("scope_boundary", "POST", "/api/benefits/reports/generate");
  probe("scope_boundary", "GET", "/api/benefits/public/holidays");
  probe("scope_boundary", "GET", "/api/tax/records/query");
  probe("scope_boundary", "GET", "/api/benefits/documents/a/b");
  probe("scope_boundary", "GET", "/api/benefits/records");

  for (const char* tag : {"Record_Data", "record-data", "records_data", "RECORD_DATA", "record_data ",
                          "recorddata", "demographics", "demographic_profile", "ssn", "contact_info",
                          "summary_full", "eligibility_status"}) {
    out.push_back(judged("output_tag_synonyms", tag, true, h.output(h.records_token(), {tag})));
  }

  {
    std::string child = h.records_token();
    out.push_back(judged("multi_step", "grandchild escalates to write_records", true,
                         h.delegate(child, "AnalyticsAgent", {"benefits.read_records", "benefits.write_records"})));
  }
  {
    std::string child = h.records_token();
    out.push_back(judged("multi_step", "grandchild sheds inherited controls", true,
                         h.delegate(child, "AnalyticsAgent", {"benefits.read_records"},
                                    {{"requested_policies", json::array()}})));
  }
  {
    std::string child = h.records_token();
    ApiResponse g = h.delegate(child, "AnalyticsAgent", {"benefits.read_records"});
    SuiteCase c{"multi_step", "grandchild acts after parent revoked", true, false, ""};
    if (g.status == 201) {
      h.client().call("POST", "/revoke", {{"token_id", child}, {"reason", "red team"}});
      h.client().wait_ms(h.heartbeat_ms() + 20);
      c = judged(c.family, c.name, true, h.enforce(g.body.at("token_id"), "GET", "/api/benefits/records/query"));
    } else {
      c.detail = "setup delegation failed";
    }
    out.push_back(c);
  }

  auto benign_call = [&](const std::string& method, const std::string& path) {
    out.push_back(judged("benign_control", method + " " + path, false, h.enforce(h.records_token(), method, path)));
  };
  benign_call("GET", "/api/benefits/records/query");
  benign_call("GET", "/API/BENEFITS/RECORDS/QUERY");
  benign_call("GET", "/api/benefits/records/query/");
  benign_call("GET", "//api/benefits//records/query");
  benign_call("GET", "/api/benefits/records/%71uery");
  benign_call("get", "/api/benefits/records/query");
  benign_call("GET", "/api/benefits/documents/x");
  benign_call("GET", "/api/benefits/documents/Form_1");
  for (const auto& tags : std::vector<std::vector<std::string>>{
           {"record_data"}, {"summary"}, {"count"}, {"count", "record_data"}}) {
    std::string name = "output";
    for (const auto& t : tags) name += " " + t;
    out.push_back(judged("benign_control", name, false, h.output(h.records_token(), tags)));
  }
  {
    std::string child = h.records_token();
    out.push_back(judged("benign_control", "narrowed grandchild delegation", false,
                         h.delegate(child, "AnalyticsAgent", {"benefits.read_records"})));
  }
  {
    std::string child = h.records_token();
    ApiResponse r = h.client().call("GET", "/chains/" + child + "/reconstruct");
    SuiteCase c = judged("benign_control", "reconstruct chain", false, r);
    if (c.passed && !r.body.at("violations").empty()) {
      c.passed = false;
      c.detail = "violations reported";
    }
    out.push_back(c);
  }
}

void robustness(Harness& h, std::vector<SuiteCase>& out) {
  auto expect_block = [&](const std::string& family, const std::string& name, const std::string& method,
                          const std::string& path, const std::string& reason) {
    ApiResponse r = h.enforce(h.records_token(), method, path);
    SuiteCase c = judged(family, name, true, r);
    if (!reason.empty() && reason_of(r) != reason) c.passed = false;
    out.push_back(c);
  };

  expect_block("traversal", "dot segments", "GET", "/api/benefits/../admin", "MALFORMED_PATH");
  expect_block("traversal", "encoded dot segments", "GET", "/api/benefits/%2e%2e%2fadmin", "MALFORMED_PATH");
  expect_block("traversal", "backslash", "GET", "/api/benefits\\..\\admin", "MALFORMED_PATH");

  expect_block("url_encoding", "encoded slash", "GET", "/api/benefits/records%2Fquery", "MALFORMED_PATH");
  expect_block("url_encoding", "encoded NUL", "GET", "/api/benefits/records/query%00", "MALFORMED_PATH");
  expect_block("url_encoding", "invalid escape", "GET", "/api/benefits/records/%zzuery", "MALFORMED_PATH");
  expect_block("url_encoding", "truncated escape", "GET", "/api/benefits/records/query%", "MALFORMED_PATH");

  expect_block("method_injection", "CRLF in method", "GET\r\nX-Override: POST", "/api/benefits/records/query",
               "MALFORMED_PATH");
  expect_block("method_injection", "path in method", "GET /api/benefits/records/update", "/api/benefits/records/query",
               "MALFORMED_PATH");
  expect_block("method_injection", "empty method", "", "/api/benefits/records/query", "MALFORMED_PATH");

  expect_block("unicode", "accented letter", "GET", "/api/benefits/r\xc3\xa9" "cords/query", "MALFORMED_PATH");
  expect_block("unicode", "fullwidth solidus", "GET", "/api/benefits/records\xef\xbc\x8fquery", "MALFORMED_PATH");
  expect_block("unicode", "encoded accent", "GET", "/api/benefits/r%C3%A9cords/query", "MALFORMED_PATH");
  expect_block("unicode", "zero-width space", "GET", "/api/benefits/records/\xe2\x80\x8bquery", "MALFORMED_PATH");

  expect_block("oversized", "1 MB path", "GET", "/api/" + std::string(1 << 20, 'a'), "MALFORMED_PATH");
  out.push_back(judged("oversized", "health after 1 MB request", false, h.client().call("GET", "/health")));
  expect_block("oversized", "path just over limit", "GET", "/" + std::string(kMaxPathLength, 'b'),
               "MALFORMED_PATH");

  {
    std::string t = h.records_token();
    h.client().call("POST", "/revoke", {{"token_id", t}, {"reason", "robustness"}});
    h.client().wait_ms(h.heartbeat_ms() + 20);
    SuiteCase c = judged("revoked", "call with revoked token", true,
                         h.enforce(t, "GET", "/api/benefits/records/query"));
    if (c.detail.find("TOKEN_REVOKED") == std::string::npos) c.passed = false;
    out.push_back(c);
    out.push_back(judged("revoked", "delegate from revoked token", true,
                         h.delegate(t, "AnalyticsAgent", {"benefits.read_records"})));
    out.push_back(judged("revoked", "output from revoked token", true, h.output(t, {"record_data"})));
  }
  {
    ApiResponse d = h.delegate(h.root(), "RecordsAgent", {"benefits.read_records"}, {{"ttl_ms", 100}});
    std::string t = d.body.value("token_id", std::string());
    h.client().wait_ms(150);
    SuiteCase c = judged("replay", "call after expiry", true, h.enforce(t, "GET", "/api/benefits/records/query"));
    if (c.detail.find("TOKEN_EXPIRED") == std::string::npos) c.passed = false;
    out.push_back(c);
    out.push_back(judged("replay", "delegate from expired token", true,
                         h.delegate(t, "AnalyticsAgent", {"benefits.read_records"})));
    out.push_back(judged("replay", "unknown token id", true,
                         h.enforce("forged-token-id", "GET", "/api/benefits/records/query")));
  }
  {
    std::string t = h.root();
    bool all_issued = true;
    for (int i = 1; i < 32; ++i) {
      ApiResponse r = h.delegate(t, "RecordsAgent", {"benefits.read_records"});
      if (r.status != 201) {
        all_issued = false;
        break;
      }
      t = r.body.at("token_id");
    }
    SuiteCase issued{"depth", "31 delegations issued", false, all_issued, all_issued ? "ok" : "stopped early"};
    out.push_back(issued);
    ApiResponse rec = h.client().call("GET", "/chains/" + t + "/reconstruct");
    SuiteCase c = judged("depth", "reconstruct depth 32", false, rec);
    if (c.passed && (rec.body.at("depth") != 32 || !rec.body.at("violations").empty())) c.passed = false;
    out.push_back(c);
    out.push_back(judged("depth", "leaf call at depth 32", false, h.enforce(t, "GET", "/api/benefits/records/query")));
  }
  {
    constexpr int kThreads = 8;
    std::vector<std::string> tokens;
    for (int i = 0; i < kThreads; ++i) tokens.push_back(h.records_token());
    h.client().call("POST", "/revoke", {{"token_id", tokens[0]}, {"reason", "isolation"}});
    h.client().wait_ms(h.heartbeat_ms() + 20);
    std::atomic<int> others_allowed{0};
    std::atomic<int> revoked_blocked{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < kThreads; ++i) {
      threads.emplace_back([&, i] {
        for (int k = 0; k < 10; ++k) {
          ApiResponse r = h.enforce(tokens[static_cast<std::size_t>(i)], "GET", "/api/benefits/records/query");
          if (i == 0 && r.status == 403) ++revoked_blocked;
          if (i != 0 && r.status == 200) ++others_allowed;
        }
      });
    }
    for (auto& t : threads) t.join();
    out.push_back({"concurrency", "revoked chain blocked under load", true, revoked_blocked == 10,
                   std::to_string(revoked_blocked.load()) + "/10 blocked"});
    out.push_back({"concurrency", "sibling chains unaffected", false, others_allowed == 70,
                   std::to_string(others_allowed.load()) + "/70 allowed"});
    std::set<std::string> chains;
    for (const auto& t : tokens) {
      chains.insert(h.client().call("GET", "/chains/" + t + "/reconstruct").body.value("chain_id", std::string()));
    }
    out.push_back({"concurrency", "chains stay distinct", false, chains.size() == kThreads,
                   std::to_string(chains.size()) + " chain ids"});
  }
}

}  // namespace

std::size_t SuiteReport::attacks_total() const {
  std::size_t n = 0;
  for (const auto& c : redteam) n += c.attack ? 1 : 0;
  return n;
}

std::size_t SuiteReport::attacks_blocked() const {
  std::size_t n = 0;
  for (const auto& c : redteam) n += c.attack && c.passed ? 1 : 0;
  return n;
}

std::size_t SuiteReport::benign_total() const { return redteam.size() - attacks_total(); }

std::size_t SuiteReport::benign_false_positives() const {
  std::size_t n = 0;
  for (const auto& c : redteam) n += !c.attack && !c.passed ? 1 : 0;
  return n;
}

std::size_t SuiteReport::robustness_passed() const {
  std::size_t n = 0;
  for (const auto& c : robustness) n += c.passed ? 1 : 0;
  return n;
}

std::map<std::string, std::size_t> SuiteReport::family_counts() const {
  std::map<std::string, std::size_t> out;
  for (const auto& c : redteam) {
    if (c.attack) ++out[c.family];
  }
  return out;
}

json SuiteReport::to_json() const {
  auto list = [](const std::vector<SuiteCase>& cases) {
    json out = json::array();
    for (const auto& c : cases) {
      out.push_back({{"family", c.family}, {"name", c.name}, {"attack", c.attack},
                     {"passed", c.passed}, {"detail", c.detail}});
    }
    return out;
  };
  return {{"redteam", list(redteam)},
          {"robustness", list(robustness)},
          {"attacks_blocked", attacks_blocked()},
          {"attacks_total", attacks_total()},
          {"benign_false_positives", benign_false_positives()},
          {"benign_total", benign_total()},
          {"robustness_passed", robustness_passed()},
          {"robustness_total", robustness.size()}};
}

std::string SuiteReport::render() const {
  std::ostringstream os;
  os << "Red team: " << attacks_blocked() << "/" << attacks_total() << " attacks blocked, "
     << benign_false_positives() << "/" << benign_total() << " benign controls blocked\n";
  std::map<std::string, std::pair<std::size_t, std::size_t>> fam;
  for (const auto& c : redteam) {
    if (!c.attack) continue;
    auto& [blocked, total] = fam[c.family];
    ++total;
    blocked += c.passed ? 1 : 0;
  }
  for (const auto& [name, counts] : fam) {
    os << "  " << std::left << std::setw(22) << name << counts.first << "/" << counts.second << "\n";
  }
  os << "Robustness: " << robustness_passed() << "/" << robustness.size() << " passed\n";
  for (const auto& c : robustness) {
    if (!c.passed) os << "  FAIL " << c.family << ": " << c.name << " (" << c.detail << ")\n";
  }
  for (const auto& c : redteam) {
    if (!c.passed) os << "  FAIL " << c.family << ": " << c.name << " (" << c.detail << ")\n";
  }
  return os.str();
}

SuiteReport run_redteam_suites() {
  Harness h;
  SuiteReport rep;
  redteam(h, rep.redteam);
  robustness(h, rep.robustness);
  return rep;
}

}  // namespace das::bench
