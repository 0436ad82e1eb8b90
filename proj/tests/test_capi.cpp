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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "das.h"

namespace {

using nlohmann::json;

struct Owned {
  char* p = nullptr;
  ~Owned() { das_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct Service {
  das_service* s = nullptr;
  explicit Service(const char* options = nullptr, const char* config = nullptr) {
    REQUIRE(das_service_create(config, options, &s) == DAS_OK);
  }
  ~Service() { das_service_destroy(s); }

  json call(const char* method, const std::string& path, const json& body, int* status) {
    Owned out;
    std::string b = body.is_null() ? std::string() : body.dump();
    REQUIRE(das_request(s, method, path.c_str(), body.is_null() ? nullptr : b.c_str(), status, &out.p) == DAS_OK);
    return json::parse(out.str());
  }
};

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(das_status_name(DAS_OK)) == "OK");
  CHECK(std::string(das_status_name(DAS_ERR_BROKEN_CHAIN)) == "BrokenChain");
  CHECK(std::string(das_status_name(DAS_ERR_INTERNAL)) == "Internal");
  CHECK(std::string(das_status_name(static_cast<das_status>(99))) == "UNKNOWN");

  das_service* s = nullptr;
  CHECK(das_service_create("{not json", nullptr, &s) == DAS_ERR_CONFIG);
  CHECK(s == nullptr);
  CHECK(std::string(das_last_error()).size() > 0);
  CHECK(das_service_create(nullptr, R"({"switchboard": "P9"})", &s) == DAS_ERR_INVALID_ARGUMENT);
  CHECK(das_service_create(nullptr, "[1", &s) == DAS_ERR_PARSE);
  CHECK(das_service_create(nullptr, nullptr, nullptr) == DAS_ERR_INVALID_ARGUMENT);
  CHECK(das_service_create(R"({"orgs": {}})", nullptr, &s) == DAS_ERR_CONFIG);
}

TEST_CASE("request round trip and audit") {
  Service svc;
  int status = 0;
  json root = svc.call("POST", "/chains",
                       {{"user_id", "citizen-benefits"}, {"goal", "process disability benefits applications"}}, &status);
  REQUIRE(status == 201);
  json child = svc.call("POST", "/delegations",
                        {{"parent_token_id", root["token_id"]}, {"dst_agent", "RecordsAgent"},
                         {"requested_scope", {"read_records"}}, {"subtask", "retrieve applicant records"}},
                        &status);
  REQUIRE(status == 201);
  std::string id = child["token_id"];
  json v = svc.call("POST", "/enforce", {{"token_id", id}, {"method", "GET"}, {"path", "/api/records/query"}}, &status);
  CHECK(status == 200);
  v = svc.call("POST", "/enforce", {{"token_id", id}, {"method", "POST"}, {"path", "/api/records/update"}}, &status);
  CHECK(status == 403);
  CHECK(v["reason"] == "NOT_IN_MANIFEST");

  svc.call("GET", "/nope", nullptr, &status);
  CHECK(status == 404);

  Owned report;
  int clean = -1;
  REQUIRE(das_audit_chain(svc.s, root["token_id"].get<std::string>().c_str(), "raw", &report.p, &clean) == DAS_OK);
  CHECK(clean == 1);
  CHECK(json::parse(report.str())["depth"] == 1);
  Owned bad;
  CHECK(das_audit_chain(svc.s, "missing", "table", &bad.p, &clean) == DAS_ERR_UNKNOWN_TOKEN);
  CHECK(das_audit_chain(svc.s, id.c_str(), "xml", &bad.p, &clean) == DAS_ERR_INVALID_ARGUMENT);

  Owned out;
  CHECK(das_request(svc.s, "POST", "/chains", "{oops", &status, &out.p) == DAS_ERR_PARSE);
}

TEST_CASE("offline audit with a key file") {
  auto dir = std::filesystem::temp_directory_path();
  auto log = dir / "das_capi_test.log";
  auto keys = dir / "das_capi_test_keys.json";
  std::filesystem::remove(log);
  std::filesystem::remove(keys);
  std::string leaf;
  {
    json opts{{"audit_log", log.string()}, {"key_file", keys.string()}};
    Service svc(opts.dump().c_str());
    int status = 0;
    json root = svc.call("POST", "/chains",
                         {{"user_id", "citizen-benefits"}, {"goal", "process disability benefits applications"}},
                         &status);
    json child = svc.call("POST", "/delegations",
                          {{"parent_token_id", root["token_id"]}, {"dst_agent", "RecordsAgent"},
                           {"requested_scope", {"read_records"}}, {"subtask", "retrieve applicant records"}},
                          &status);
    leaf = child["token_id"];
  }
  Owned table;
  int clean = 0;
  REQUIRE(das_audit_log(log.string().c_str(), keys.string().c_str(), leaf.c_str(), "table", &table.p, &clean) ==
          DAS_OK);
  CHECK(clean == 1);
  CHECK(table.str().find("ROOT") != std::string::npos);
  CHECK(table.str().find("not checked") == std::string::npos);
  Owned r2;
  CHECK(das_audit_log("/nonexistent/log", nullptr, leaf.c_str(), "table", &r2.p, &clean) == DAS_ERR_IO);
  std::filesystem::remove(log);
  std::filesystem::remove(keys);
}

TEST_CASE("server lifecycle and remote audit") {
  Service svc;
  das_server* srv = nullptr;
  int port = 0;
  REQUIRE(das_server_start(svc.s, "127.0.0.1", 0, &srv, &port) == DAS_OK);
  CHECK(port > 0);
  int status = 0;
  json root = svc.call("POST", "/chains",
                       {{"user_id", "citizen-benefits"}, {"goal", "process disability benefits applications"}}, &status);
  Owned report;
  int clean = 0;
  CHECK(das_audit_server("127.0.0.1", port, root["token_id"].get<std::string>().c_str(), "table", &report.p,
                         &clean) == DAS_OK);
  CHECK(clean == 1);
  Owned missing;
  CHECK(das_audit_server("127.0.0.1", port, "missing", "table", &missing.p, &clean) == DAS_ERR_UNKNOWN_TOKEN);
  CHECK(das_server_stop(srv) == DAS_OK);
  das_server_destroy(srv);
}

TEST_CASE("bench entry points") {
  Owned corpus;
  REQUIRE(das_bench_generate_corpus(42, &corpus.p) == DAS_OK);
  Owned again;
  REQUIRE(das_bench_generate_corpus(42, &again.p) == DAS_OK);
  CHECK(corpus.str() == again.str());
  Owned report;
  REQUIRE(das_bench_run(corpus.p, R"({"switchboard": "all"})", &report.p) == DAS_OK);
  json j = json::parse(report.str());
  CHECK(j["tp"] == 150);
  CHECK(j["fp"] == 0);
  Owned bad;
  CHECK(das_bench_run("garbage\n", nullptr, &bad.p) == DAS_ERR_PARSE);
  CHECK(das_bench_run(corpus.p, R"({"transport": "carrier-pigeon"})", &bad.p) == DAS_ERR_INVALID_ARGUMENT);
  CHECK(das_latency(0, &bad.p) == DAS_ERR_INVALID_ARGUMENT);
}
