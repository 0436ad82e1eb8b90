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

// Per-operation latency, in process and over loopback HTTP. Both paths run
// the same JSON handlers, so the difference is transport cost.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "das/bench.hpp"
#include "das/error.hpp"

namespace das::bench {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kGoal = "process disability benefits applications";
constexpr const char* kSubtask = "retrieve applicant records for case review";

LatencyStats summarize(std::string op, std::string transport, std::vector<double> samples) {
  LatencyStats s;
  s.operation = std::move(op);
  s.transport = std::move(transport);
  s.samples = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  std::size_t n = samples.size();
  s.median_ms = n % 2 == 1 ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2;
  std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95_ms = samples[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

std::string expect_id(const ApiResponse& r, const char* what) {
  if (r.status != 201) fail(ErrorCode::kInternal, std::string(what) + " failed: " + r.body.dump());
  return r.body.at("token_id");
}

class Probe {
 public:
  explicit Probe(DasClient& c) : c_(c) {}

  std::string root() {
    return expect_id(c_.call("POST", "/chains", {{"user_id", "benefits-caseworker"}, {"goal", kGoal}}), "root");
  }
  ApiResponse delegate_raw(const std::string& parent) {
    return c_.call("POST", "/delegations",
                   {{"parent_token_id", parent}, {"dst_agent", "RecordsAgent"},
                    {"requested_scope", {"benefits.read_records"}}, {"subtask", kSubtask}});
  }
  std::string delegate(const std::string& parent) { return expect_id(delegate_raw(parent), "delegation"); }

  template <class F>
  static double time_ms(F&& f) {
    auto start = Clock::now();
    f();
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }

  std::vector<LatencyStats> run(const std::string& transport, std::size_t iterations) {
    std::vector<LatencyStats> out;
    std::string root_id = root();
    std::string child = delegate(root_id);
    std::string deep = root_id;
    for (int i = 1; i < 33; ++i) deep = delegate(deep);

    auto sample = [&](const std::string& op, const std::function<void()>& f) {
      for (int w = 0; w < 3; ++w) f();
      std::vector<double> v;
      v.reserve(iterations);
      for (std::size_t i = 0; i < iterations; ++i) v.push_back(time_ms(f));
      out.push_back(summarize(op, transport, std::move(v)));
    };
    auto check = [](const ApiResponse& r, int status, const char* what) {
      if (r.status != status) fail(ErrorCode::kInternal, std::string(what) + ": " + r.body.dump());
    };

    sample("issuance", [&] { check(delegate_raw(root_id), 201, "issuance"); });
    sample("enforce", [&] {
      check(c_.call("POST", "/enforce",
                    {{"token_id", child}, {"method", "GET"}, {"path", "/api/benefits/records/query"}}),
            200, "enforce");
    });
    sample("validate_output", [&] {
      check(c_.call("POST", "/validate-output",
                    {{"token_id", child}, {"scope_element", "benefits.read_records"}, {"tags", {"summary"}}}),
            200, "validate_output");
    });
    sample("reconstruct_depth2", [&] { check(c_.call("GET", "/chains/" + child + "/reconstruct"), 200, "reconstruct"); });
    sample("reconstruct_depth33", [&] { check(c_.call("GET", "/chains/" + deep + "/reconstruct"), 200, "reconstruct"); });

    // Each revocation needs a live target; those are minted outside the timer.
    std::vector<std::string> targets;
    for (std::size_t i = 0; i < iterations + 3; ++i) targets.push_back(delegate(root_id));
    std::size_t next = 0;
    sample("revocation", [&] {
      check(c_.call("POST", "/revoke", {{"token_id", targets[next++]}, {"reason", "latency"}}), 200, "revoke");
    });
    return out;
  }

 private:
  DasClient& c_;
};

}  // namespace

const LatencyStats* LatencyReport::find(const std::string& operation, const std::string& transport) const {
  for (const auto& r : rows) {
    if (r.operation == operation && r.transport == transport) return &r;
  }
  return nullptr;
}

json LatencyReport::to_json() const {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"operation", r.operation}, {"transport", r.transport}, {"samples", r.samples},
                   {"median_ms", r.median_ms}, {"p95_ms", r.p95_ms}});
  }
  return out;
}

std::string LatencyReport::render() const {
  std::ostringstream os;
  os << std::left << std::setw(22) << "Operation" << std::setw(12) << "Transport" << std::setw(8) << "N"
     << std::setw(14) << "Median (ms)" << "p95 (ms)\n";
  os << std::fixed << std::setprecision(3);
  for (const auto& r : rows) {
    os << std::setw(22) << r.operation << std::setw(12) << r.transport << std::setw(8) << r.samples
       << std::setw(14) << r.median_ms << r.p95_ms << "\n";
  }
  return os.str();
}

LatencyReport measure_latency(std::size_t iterations) {
  if (iterations == 0) fail(ErrorCode::kInvalidArgument, "iterations must be positive");
  LatencyReport rep;
  {
    DasOptions o;
    o.config = bench_config();
    Das das(std::move(o));
    InProcessClient client(das, nullptr);
    auto rows = Probe(client).run("in_process", iterations);
    rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
  }
  {
    DasOptions o;
    o.config = bench_config();
    Das das(std::move(o));
    DasServer server(das);
    int port = server.start("127.0.0.1", 0);
    HttpClient client("127.0.0.1", port);
    auto rows = Probe(client).run("http", iterations);
    rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
    server.stop();
  }
  return rep;
}

}  // namespace das::bench
