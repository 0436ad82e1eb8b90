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

#include "das.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "das/api.hpp"
#include "das/bench.hpp"
#include "das/error.hpp"
#include "das/forensics.hpp"
#include "das/meta.hpp"
#include "das/service.hpp"
#include "das/signer.hpp"

struct das_service {
  std::unique_ptr<das::Das> das;
};

struct das_server {
  std::unique_ptr<das::DasServer> server;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

das_status to_status(das::ErrorCode code) {
  // ErrorCode and das_status share an order, offset by one.
  return static_cast<das_status>(static_cast<int>(code) + 1);
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
das_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return DAS_OK;
  } catch (const das::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return DAS_ERR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DAS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return DAS_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) das::fail(das::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

json parse_optional(const char* text) {
  if (text == nullptr || *text == '\0') return json::object();
  json j = json::parse(text);
  if (!j.is_object()) das::fail(das::ErrorCode::kInvalidArgument, "options must be a JSON object");
  return j;
}

void emit_audit(const das::forensics::AuditReport& rep, const char* format, char** report, int* clean) {
  std::string f = format == nullptr ? "table" : format;
  if (f != "table" && f != "raw") das::fail(das::ErrorCode::kInvalidArgument, "format must be table or raw");
  *report = dup(f == "raw" ? rep.to_json().dump(2) : rep.render_table());
  *clean = rep.clean() ? 1 : 0;
}

das::bench::RunOptions run_options(const json& o) {
  das::bench::RunOptions ro;
  std::string transport = o.value("transport", std::string("in_process"));
  if (transport == "http") {
    ro.transport = das::bench::Transport::kHttp;
  } else if (transport != "in_process") {
    das::fail(das::ErrorCode::kInvalidArgument, "transport must be in_process or http");
  }
  return ro;
}

}  // namespace

extern "C" {

const char* das_status_name(das_status status) {
  if (status == DAS_OK) return "OK";
  if (status < DAS_OK || status > DAS_ERR_INTERNAL) return "UNKNOWN";
  static thread_local std::string name;
  name = std::string(das::error_code_name(static_cast<das::ErrorCode>(static_cast<int>(status) - 1)));
  return name.c_str();
}

const char* das_last_error(void) { return g_last_error.c_str(); }

void das_string_free(char* s) { std::free(s); }

das_status das_service_create(const char* config_json, const char* options_json, das_service** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    json o = parse_optional(options_json);
    das::DasOptions opts;
    if (config_json != nullptr) {
      opts.config = das::DasConfig::from_text(config_json);
    } else if (o.value("bench_registry", false)) {
      opts.config = das::bench::bench_config();
    }
    if (o.contains("switchboard")) opts.switchboard = das::Switchboard::parse(o.at("switchboard").get<std::string>());
    if (o.contains("audit_log")) opts.audit_log = o.at("audit_log").get<std::string>();
    if (o.contains("key_file")) {
      opts.signer = std::make_shared<das::KeyStoreSigner>(
          das::load_or_create_key_file(o.at("key_file").get<std::string>()));
    }
    opts.revoke_on_violation = o.value("revoke_on_violation", true);
    auto svc = std::make_unique<das_service>();
    svc->das = std::make_unique<das::Das>(std::move(opts));
    *out = svc.release();
  });
}

void das_service_destroy(das_service* service) { delete service; }

das_status das_request(das_service* service, const char* method, const char* path, const char* body_json,
                       int* http_status, char** response_json) {
  return guarded([&] {
    require(service, "service");
    require(method, "method");
    require(path, "path");
    require(http_status, "http_status");
    require(response_json, "response_json");
    json body = body_json == nullptr ? json() : json::parse(body_json);
    das::ApiResponse r = das::handle_request(*service->das, method, path, body);
    *http_status = r.status;
    *response_json = dup(r.body.dump());
  });
}

das_status das_server_start(das_service* service, const char* host, int port, das_server** out,
                            int* bound_port) {
  return guarded([&] {
    require(service, "service");
    require(out, "out");
    auto srv = std::make_unique<das_server>();
    srv->server = std::make_unique<das::DasServer>(*service->das);
    int p = srv->server->start(host == nullptr ? "127.0.0.1" : host, port);
    if (bound_port != nullptr) *bound_port = p;
    *out = srv.release();
  });
}

das_status das_server_wait(das_server* server) {
  return guarded([&] {
    require(server, "server");
    server->server->wait();
  });
}

das_status das_server_stop(das_server* server) {
  return guarded([&] {
    require(server, "server");
    server->server->stop();
  });
}

void das_server_destroy(das_server* server) { delete server; }

das_status das_audit_chain(das_service* service, const char* token_id, const char* format, char** report,
                           int* clean) {
  return guarded([&] {
    require(service, "service");
    require(token_id, "token_id");
    require(report, "report");
    require(clean, "clean");
    emit_audit(das::forensics::audit_service(*service->das, token_id), format, report, clean);
  });
}

das_status das_audit_log(const char* log_path, const char* key_file, const char* token_id, const char* format,
                         char** report, int* clean) {
  return guarded([&] {
    require(log_path, "log_path");
    require(token_id, "token_id");
    require(report, "report");
    require(clean, "clean");
    std::optional<das::KeyStore> keys;
    if (key_file != nullptr) keys = das::load_key_file(key_file);
    emit_audit(das::forensics::audit_log_file(log_path, token_id, keys ? &*keys : nullptr), format, report,
               clean);
  });
}

das_status das_audit_server(const char* host, int port, const char* token_id, const char* format,
                            char** report, int* clean) {
  return guarded([&] {
    require(host, "host");
    require(token_id, "token_id");
    require(report, "report");
    require(clean, "clean");
    das::HttpClient client(host, port);
    das::ApiResponse r = client.call("GET", std::string("/chains/") + token_id + "/reconstruct");
    emit_audit(das::forensics::audit_response(r.status, r.body, token_id), format, report, clean);
  });
}

das_status das_bench_generate_corpus(uint64_t seed, char** ndjson) {
  return guarded([&] {
    require(ndjson, "ndjson");
    *ndjson = dup(das::bench::corpus_to_ndjson(das::bench::generate_corpus(seed)));
  });
}

das_status das_bench_run(const char* corpus_ndjson, const char* options_json, char** report_json) {
  return guarded([&] {
    require(corpus_ndjson, "corpus_ndjson");
    require(report_json, "report_json");
    json o = parse_optional(options_json);
    auto corpus = das::bench::corpus_from_ndjson(corpus_ndjson);
    auto sw = das::Switchboard::parse(o.value("switchboard", std::string("all")));
    auto rep = das::bench::run_bench(corpus, o.value("name", sw.to_string()), sw, run_options(o));
    json j = rep.to_json(o.value("outcomes", false));
    j["text"] = das::bench::render_ablation_table({rep});
    *report_json = dup(j.dump(2));
  });
}

das_status das_bench_ablate(const char* corpus_ndjson, const char* options_json, char** report_json) {
  return guarded([&] {
    require(corpus_ndjson, "corpus_ndjson");
    require(report_json, "report_json");
    json o = parse_optional(options_json);
    auto corpus = das::bench::corpus_from_ndjson(corpus_ndjson);
    auto reports = das::bench::run_ablation(corpus, das::bench::default_ablation_configs(), run_options(o));
    json list = json::array();
    for (const auto& r : reports) list.push_back(r.to_json(o.value("outcomes", false)));
    json caught = json::object();
    for (const auto& [cat, layers] : das::bench::caught_by(reports)) caught[std::string(1, cat)] = layers;
    json j{{"reports", list},
           {"caught_by", caught},
           {"text", das::bench::render_ablation_table(reports) + "\n" +
                        das::bench::render_category_table(reports)}};
    *report_json = dup(j.dump(2));
  });
}

das_status das_redteam(char** report_json) {
  return guarded([&] {
    require(report_json, "report_json");
    auto rep = das::bench::run_redteam_suites();
    json j = rep.to_json();
    j["text"] = rep.render();
    *report_json = dup(j.dump(2));
  });
}

das_status das_latency(uint32_t iterations, char** report_json) {
  return guarded([&] {
    require(report_json, "report_json");
    auto rep = das::bench::measure_latency(iterations);
    json j{{"rows", rep.to_json()}, {"text", rep.render()}};
    *report_json = dup(j.dump(2));
  });
}

das_status das_meta_verify(uint32_t workers, char** report_json) {
  return guarded([&] {
    require(report_json, "report_json");
    auto rep = das::meta::run_all(workers);
    json j = rep.to_json();
    j["text"] = rep.summary();
    *report_json = dup(j.dump(2));
  });
}

}  // extern "C"
