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

// dasctl: operator CLI over the C interface.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "das.h"

namespace {

using nlohmann::json;

struct Failure {
  das_status status;
  std::string message;
};

// Owns a string returned through the C API.
class CString {
 public:
  ~CString() { das_string_free(p_); }
  char** out() { return &p_; }
  std::string str() const { return p_ == nullptr ? std::string() : std::string(p_); }

 private:
  char* p_ = nullptr;
};

void check(das_status s) {
  if (s != DAS_OK) throw Failure{s, das_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{DAS_ERR_IO, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{DAS_ERR_IO, "cannot write " + path};
  out << text;
}

// Prints either the "text" rendering or the JSON document without it.
void print_report(const std::string& report, const std::string& format) {
  json j = json::parse(report);
  if (format == "json") {
    j.erase("text");
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << j.value("text", std::string());
  }
}

std::string corpus_text(const std::string& path, std::uint64_t seed) {
  if (!path.empty()) return read_file(path);
  CString c;
  check(das_bench_generate_corpus(seed, c.out()));
  return c.str();
}

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delegation Authority Service tools"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  std::string corpus_path, out_path, format = "table", switchboard = "all", transport = "in_process";
  bool outcomes = false;

  auto* gen = app.add_subcommand("gen-corpus", "Write the scenario corpus as NDJSON");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out,-o", out_path, "Output file (default stdout)");

  auto add_corpus_opts = [&](CLI::App* cmd) {
    cmd->add_option("--corpus", corpus_path, "NDJSON corpus (generated from --seed when absent)");
    cmd->add_option("--seed", seed, "Generator seed");
    cmd->add_option("--transport", transport, "in_process or http")
        ->check(CLI::IsMember({"in_process", "http"}));
    cmd->add_flag("--outcomes", outcomes, "Include per-scenario outcomes in JSON output");
  };
  auto add_format = [&](CLI::App* cmd, std::vector<std::string> choices) {
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember(choices));
  };

  auto* run = app.add_subcommand("run-bench", "Run the corpus under one switchboard");
  add_corpus_opts(run);
  run->add_option("--switchboard", switchboard, "Enabled properties, e.g. P1+P6 or all");
  add_format(run, {"table", "json"});

  auto* ablate = app.add_subcommand("ablate", "Run the ablation configurations");
  add_corpus_opts(ablate);
  add_format(ablate, {"table", "json"});

  auto* redteam = app.add_subcommand("redteam", "Run the red-team and robustness suites");
  add_format(redteam, {"table", "json"});

  std::uint32_t iterations = 200;
  auto* latency = app.add_subcommand("latency", "Measure per-operation latency");
  latency->add_option("--iterations,-n", iterations, "Samples per operation")->check(CLI::PositiveNumber);
  add_format(latency, {"table", "json"});

  std::uint32_t workers = 0;
  auto* meta = app.add_subcommand("meta-verify", "Run the meta-theorem checks");
  meta->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
  add_format(meta, {"table", "json"});

  std::string token_id, log_path, server, key_file;
  auto* audit = app.add_subcommand("audit-chain", "Render and verify one chain's lineage");
  audit->add_option("--token-id", token_id, "Leaf token id")->required();
  auto* from_log = audit->add_option("--from-log", log_path, "Exported audit log");
  auto* from_server = audit->add_option("--server", server, "host:port of a running service");
  audit->add_option("--key-file", key_file, "Service key file, to check signatures offline")->needs(from_log);
  from_log->excludes(from_server);
  from_server->excludes(from_log);
  audit->add_option("--format", format, "table or raw")->check(CLI::IsMember({"table", "raw"}));

  std::string host = "127.0.0.1", config_path, audit_log;
  int port = 8080;
  bool bench_registry = false;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks one)");
  serve->add_option("--config", config_path, "Registry JSON (default: shipped config)");
  serve->add_option("--switchboard", switchboard, "Enabled properties");
  serve->add_option("--audit-log", audit_log, "Append-only audit log file");
  serve->add_option("--key-file", key_file, "Signing key file (created when absent)");
  serve->add_flag("--bench-registry", bench_registry, "Serve the multi-domain benchmark registry");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      CString c;
      check(das_bench_generate_corpus(seed, c.out()));
      write_output(out_path, c.str());
    } else if (*run || *ablate) {
      std::string corpus = corpus_text(corpus_path, seed);
      json opts{{"switchboard", switchboard}, {"transport", transport}, {"outcomes", outcomes}};
      CString r;
      if (*run) {
        check(das_bench_run(corpus.c_str(), opts.dump().c_str(), r.out()));
      } else {
        check(das_bench_ablate(corpus.c_str(), opts.dump().c_str(), r.out()));
      }
      print_report(r.str(), format);
    } else if (*redteam) {
      CString r;
      check(das_redteam(r.out()));
      print_report(r.str(), format);
      json j = json::parse(r.str());
      bool ok = j.at("attacks_blocked") == j.at("attacks_total") && j.at("benign_false_positives") == 0 &&
                j.at("robustness_passed") == j.at("robustness_total");
      return ok ? 0 : 1;
    } else if (*latency) {
      CString r;
      check(das_latency(iterations, r.out()));
      print_report(r.str(), format);
    } else if (*meta) {
      CString r;
      check(das_meta_verify(workers, r.out()));
      print_report(r.str(), format);
    } else if (*audit) {
      CString r;
      int clean = 0;
      if (!log_path.empty()) {
        check(das_audit_log(log_path.c_str(), key_file.empty() ? nullptr : key_file.c_str(), token_id.c_str(),
                            format.c_str(), r.out(), &clean));
      } else if (!server.empty()) {
        auto colon = server.rfind(':');
        if (colon == std::string::npos) throw Failure{DAS_ERR_INVALID_ARGUMENT, "--server wants host:port"};
        std::string h = server.substr(0, colon);
        if (h.rfind("http://", 0) == 0) h = h.substr(7);
        check(das_audit_server(h.c_str(), std::stoi(server.substr(colon + 1)), token_id.c_str(), format.c_str(),
                               r.out(), &clean));
      } else {
        throw Failure{DAS_ERR_INVALID_ARGUMENT, "audit-chain needs --from-log or --server"};
      }
      std::cout << r.str();
      if (format == "raw") std::cout << "\n";
      return clean ? 0 : 1;
    } else if (*serve) {
      json opts{{"switchboard", switchboard}, {"bench_registry", bench_registry}};
      if (!audit_log.empty()) opts["audit_log"] = audit_log;
      if (!key_file.empty()) opts["key_file"] = key_file;
      std::string config = config_path.empty() ? std::string() : read_file(config_path);
      das_service* svc = nullptr;
      check(das_service_create(config_path.empty() ? nullptr : config.c_str(), opts.dump().c_str(), &svc));
      int bound = 0;
      das_server* srv = nullptr;
      das_status st = das_server_start(svc, host.c_str(), port, &srv, &bound);
      if (st != DAS_OK) {
        das_service_destroy(svc);
        check(st);
      }
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << host << ":" << bound << std::endl;
      std::thread watcher([srv] {
        while (g_stop == 0) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        das_server_stop(srv);
      });
      das_server_wait(srv);
      g_stop = 1;
      watcher.join();
      das_server_destroy(srv);
      das_service_destroy(svc);
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << das_status_name(f.status) << ": " << f.message << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
