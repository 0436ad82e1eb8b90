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

// JSON request handlers shared by the HTTP server and the in-process client,
// so both transports produce identical responses.

#include <memory>
#include <string>

#include <json.hpp>

#include "das/clock.hpp"
#include "das/error.hpp"
#include "das/service.hpp"

namespace das {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Routes "POST /chains", "GET /chains/{id}/reconstruct", ... Unknown routes
// yield 404; malformed bodies 400; service errors map by code.
ApiResponse handle_request(Das& das, const std::string& method, const std::string& path,
                           const nlohmann::json& body);

int http_status_for(ErrorCode code);

class DasClient {
 public:
  virtual ~DasClient() = default;
  virtual ApiResponse call(const std::string& method, const std::string& path,
                           const nlohmann::json& body = nullptr) = 0;
  // Lets time pass: advances a manual clock or sleeps.
  virtual void wait_ms(std::int64_t ms) = 0;
};

class InProcessClient final : public DasClient {
 public:
  // clock may be null, in which case wait_ms sleeps.
  InProcessClient(Das& das, ManualClock* clock) : das_(das), clock_(clock) {}
  ApiResponse call(const std::string& method, const std::string& path,
                   const nlohmann::json& body = nullptr) override;
  void wait_ms(std::int64_t ms) override;

 private:
  Das& das_;
  ManualClock* clock_;
};

class HttpClient final : public DasClient {
 public:
  HttpClient(std::string host, int port);
  ~HttpClient() override;
  ApiResponse call(const std::string& method, const std::string& path,
                   const nlohmann::json& body = nullptr) override;
  void wait_ms(std::int64_t ms) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP/1.1 front end over one Das. Runs its accept loop on a background
// thread.
class DasServer {
 public:
  explicit DasServer(Das& das);
  ~DasServer();
  DasServer(const DasServer&) = delete;
  DasServer& operator=(const DasServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws kIoError.
  int start(const std::string& host, int port);
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace das
