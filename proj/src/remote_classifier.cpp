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

#include <httplib.h>

#include <json.hpp>

#include "das/error.hpp"
#include "das/intent.hpp"

namespace das {

namespace {

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/classify"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

RemoteClassifier::RemoteClassifier(std::string url, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  std::tie(scheme_host_port_, path_) = split_url(url);
}

NliLabel RemoteClassifier::classify(std::string_view premise, std::string_view hypothesis) {
  // One client per call keeps concurrent in-flight requests independent.
  httplib::Client client(scheme_host_port_);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  nlohmann::json body{{"premise", premise}, {"hypothesis", hypothesis}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    fail(ErrorCode::kClassifierUnavailable,
         "classifier request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    fail(ErrorCode::kClassifierUnavailable,
         "classifier returned HTTP " + std::to_string(res->status));
  }
  std::string label;
  try {
    label = nlohmann::json::parse(res->body).at("label").get<std::string>();
  } catch (const std::exception& e) {
    fail(ErrorCode::kClassifierUnavailable, std::string("malformed classifier reply: ") + e.what());
  }
  if (label == "ENTAILMENT") return NliLabel::kEntailment;
  if (label == "NEUTRAL") return NliLabel::kNeutral;
  if (label == "CONTRADICTION") return NliLabel::kContradiction;
  fail(ErrorCode::kClassifierUnavailable, "unknown classifier label: " + label);
}

}  // namespace das
