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

// Length-prefixed, sorted-key text encoding used for token hashing and
// signing. Grammar:
//   string  := <decimal length> ':' <bytes>
//   integer := 'i' <canonical decimal> 'e'
//   list    := 'l' value* 'e'
//   dict    := 'd' (string value)* 'e'     keys unique, bytewise ascending
// Decoding is strict, so decode(encode(v)) == v and encode(decode(b)) == b
// for every accepted b.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace das::canon {

struct Value;
using List = std::vector<Value>;
using Dict = std::map<std::string, Value>;

struct Value {
  std::variant<std::int64_t, std::string, List, Dict> data;

  Value() : data(std::int64_t{0}) {}
  Value(std::int64_t v) : data(v) {}
  Value(std::string v) : data(std::move(v)) {}
  Value(const char* v) : data(std::string(v)) {}
  Value(List v) : data(std::move(v)) {}
  Value(Dict v) : data(std::move(v)) {}

  bool operator==(const Value&) const = default;

  const std::string& as_string() const;
  std::int64_t as_int() const;
  const List& as_list() const;
  const Dict& as_dict() const;
};

std::string encode(const Value& value);

// Throws das::Error(kParseError) on any deviation from the canonical form.
Value decode(std::string_view bytes);

// Dict lookup that throws kParseError when the key is missing.
const Value& field(const Dict& dict, const std::string& key);

}  // namespace das::canon
