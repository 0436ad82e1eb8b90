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

#include <algorithm>
#include <array>

#include "das/error.hpp"
#include "das/token.hpp"

namespace das {

namespace {

constexpr std::array<std::pair<HttpMethod, std::string_view>, 5> kMethods{{
    {HttpMethod::kGet, "GET"},
    {HttpMethod::kPost, "POST"},
    {HttpMethod::kPut, "PUT"},
    {HttpMethod::kPatch, "PATCH"},
    {HttpMethod::kDelete, "DELETE"},
}};

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

NormalizedPath malformed(std::string why) { return {std::nullopt, std::move(why)}; }

}  // namespace

std::string_view method_name(HttpMethod m) {
  for (const auto& [method, name] : kMethods) {
    if (method == m) return name;
  }
  return "GET";
}

std::optional<HttpMethod> parse_method(std::string_view upper) {
  for (const auto& [method, name] : kMethods) {
    if (name == upper) return method;
  }
  return std::nullopt;
}

std::string_view tier_name(RiskTier t) {
  switch (t) {
    case RiskTier::kHigh:
      return "HIGH";
    case RiskTier::kMedium:
      return "MEDIUM";
    case RiskTier::kLow:
      return "LOW";
  }
  return "HIGH";
}

std::optional<RiskTier> parse_tier(std::string_view name) {
  if (name == "HIGH") return RiskTier::kHigh;
  if (name == "MEDIUM") return RiskTier::kMedium;
  if (name == "LOW") return RiskTier::kLow;
  return std::nullopt;
}

NormalizedPath normalize_path(std::string_view raw) {
  if (raw.size() > kMaxPathLength) return malformed("path exceeds length limit");
  if (raw.find_first_of("?#") != std::string_view::npos) {
    return malformed("query or fragment not permitted");
  }

  std::string decoded;
  decoded.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c != '%') {
      decoded.push_back(c);
      continue;
    }
    if (i + 2 >= raw.size()) {
      return malformed("truncated percent escape");
    }
    int hi = hex_digit(raw[i + 1]);
    int lo = hex_digit(raw[i + 2]);
    if (hi < 0 || lo < 0) return malformed("invalid percent escape");
    char d = static_cast<char>(hi << 4 | lo);
    if (d == '/' || d == '\\') return malformed("encoded path separator");
    if (d == '%') return malformed("double percent encoding");
    decoded.push_back(d);
    i += 2;
  }

  for (char c : decoded) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x21 || u > 0x7e) return malformed("control, space or non-ASCII byte");
    if (c == '\\') return malformed("backslash in path");
  }
  if (decoded.empty() || decoded.front() != '/') {
    return malformed("path must start with '/'");
  }

  std::string out;
  out.reserve(decoded.size());
  std::size_t pos = 1;
  while (pos <= decoded.size()) {
    std::size_t next = decoded.find('/', pos);
    if (next == std::string::npos) next = decoded.size();
    std::string_view segment(decoded.data() + pos, next - pos);
    if (!segment.empty()) {
      if (segment == "." || segment == "..") return malformed("dot segment");
      out.push_back('/');
      for (char c : segment) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    pos = next + 1;
  }
  if (out.empty()) out = "/";
  return {std::move(out), {}};
}

std::string ApiOperation::to_string() const {
  return std::string(method_name(method)) + " " + pattern;
}

bool ApiOperation::is_wildcard() const {
  return pattern.size() >= 2 && pattern.compare(pattern.size() - 2, 2, "/*") == 0;
}

ApiOperation ApiOperation::parse(std::string_view text) {
  auto space = text.find(' ');
  if (space == std::string_view::npos) {
    fail(ErrorCode::kParseError, "api operation needs 'METHOD /path': " + std::string(text));
  }
  auto method = parse_method(text.substr(0, space));
  if (!method) {
    fail(ErrorCode::kParseError, "unsupported method in: " + std::string(text));
  }
  std::string pattern(text.substr(space + 1));
  auto star = pattern.find('*');
  if (star != std::string::npos &&
      (star != pattern.size() - 1 || star == 0 || pattern[star - 1] != '/')) {
    fail(ErrorCode::kParseError, "wildcard must be a single trailing '/*': " + pattern);
  }
  auto normalized = normalize_path(pattern);
  if (!normalized.path || *normalized.path != pattern) {
    fail(ErrorCode::kParseError, "endpoint pattern not in normal form: " + pattern);
  }
  return ApiOperation{*method, std::move(pattern)};
}

bool operation_matches(const ApiOperation& pattern, const ApiOperation& concrete) {
  if (pattern.method != concrete.method) return false;
  if (!pattern.is_wildcard()) return pattern.pattern == concrete.pattern;
  std::string_view prefix(pattern.pattern.data(), pattern.pattern.size() - 1);  // keeps '/'
  std::string_view path(concrete.pattern);
  if (path.size() <= prefix.size() || path.substr(0, prefix.size()) != prefix) {
    return false;
  }
  return path.substr(prefix.size()).find('/') == std::string_view::npos;
}

}  // namespace das
