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

// The only translation unit that includes httplib for the server side.
#include <httplib.h>

#include <chrono>
#include <thread>

#include "das/api.hpp"
#include "das/error.hpp"

namespace das {

namespace {

constexpr std::size_t kMaxBody = 4 * 1024 * 1024;

void reply(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(api.body.dump(), "application/json");
}

}  // namespace

struct DasServer::Impl {
  Das& das;
  httplib::Server server;
  std::thread thread;
  explicit Impl(Das& d) : das(d) {}
};

DasServer::DasServer(Das& das) : impl_(std::make_unique<Impl>(das)) {
  auto& srv = impl_->server;
  srv.set_payload_max_length(kMaxBody);
  srv.set_tcp_nodelay(true);
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    if (!req.body.empty()) {
      body = nlohmann::json::parse(req.body, nullptr, false);
      if (body.is_discarded()) {
        reply(res, {400, {{"error", "INVALID_ARGUMENT"}, {"message", "body is not JSON"}}});
        return;
      }
    }
    reply(res, handle_request(impl_->das, req.method, req.path, body));
  };
  srv.Post(R"(/.*)", handler);
  srv.Get(R"(/.*)", handler);
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    reply(res, {500, {{"error", "INTERNAL"}, {"message", message}}});
  });
}

DasServer::~DasServer() { stop(); }

int DasServer::start(const std::string& host, int port) {
  auto& srv = impl_->server;
  int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) fail(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  port_ = bound;
  impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  return port_;
}

void DasServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void DasServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

struct HttpClient::Impl {
  httplib::Client client;
  Impl(const std::string& host, int port) : client(host, port) {
    client.set_keep_alive(true);
    client.set_tcp_nodelay(true);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
  }
};

HttpClient::HttpClient(std::string host, int port) : impl_(std::make_unique<Impl>(host, port)) {}
HttpClient::~HttpClient() = default;

ApiResponse HttpClient::call(const std::string& method, const std::string& path,
                             const nlohmann::json& body) {
  httplib::Result res = method == "GET"
                            ? impl_->client.Get(path)
                            : impl_->client.Post(path, body.is_null() ? std::string("{}") : body.dump(),
                                                 "application/json");
  if (!res) fail(ErrorCode::kIoError, "HTTP " + method + " " + path + ": " + httplib::to_string(res.error()));
  ApiResponse out;
  out.status = res->status;
  out.body = nlohmann::json::parse(res->body, nullptr, false);
  if (out.body.is_discarded()) out.body = {{"error", "INVALID_RESPONSE"}, {"raw", res->body}};
  return out;
}

void HttpClient::wait_ms(std::int64_t ms) {
  std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

}  // namespace das
