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

#include "das/canonical.hpp"

#include <charconv>

#include "das/error.hpp"

namespace das::canon {

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  fail(ErrorCode::kParseError, "canonical decode: " + what);
}

void encode_into(const Value& value, std::string& out) {
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          out += 'i';
          out += std::to_string(v);
          out += 'e';
        } else if constexpr (std::is_same_v<T, std::string>) {
          out += std::to_string(v.size());
          out += ':';
          out += v;
        } else if constexpr (std::is_same_v<T, List>) {
          out += 'l';
          for (const auto& item : v) encode_into(item, out);
          out += 'e';
        } else {
          out += 'd';
          for (const auto& [key, item] : v) {
            out += std::to_string(key.size());
            out += ':';
            out += key;
            encode_into(item, out);
          }
          out += 'e';
        }
      },
      value.data);
}

class Decoder {
 public:
  explicit Decoder(std::string_view in) : in_(in) {}

  Value document() {
    Value v = value(0);
    if (pos_ != in_.size()) parse_fail("trailing bytes");
    return v;
  }

 private:
  static constexpr int kMaxDepth = 64;

  char peek() const {
    if (pos_ >= in_.size()) parse_fail("unexpected end of input");
    return in_[pos_];
  }

  Value value(int depth) {
    if (depth > kMaxDepth) parse_fail("nesting too deep");
    char c = peek();
    if (c == 'i') return integer();
    if (c == 'l') {
      ++pos_;
      List items;
      while (peek() != 'e') items.push_back(value(depth + 1));
      ++pos_;
      return items;
    }
    if (c == 'd') {
      ++pos_;
      Dict items;
      const std::string* previous = nullptr;
      while (peek() != 'e') {
        std::string key = string();
        if (previous != nullptr && !(*previous < key)) {
          parse_fail("dict keys not strictly ascending");
        }
        auto [it, inserted] = items.emplace(std::move(key), value(depth + 1));
        previous = &it->first;
      }
      ++pos_;
      return items;
    }
    if (c >= '0' && c <= '9') return string();
    parse_fail(std::string("unexpected byte '") + c + "'");
  }

  std::string_view digits_until(char terminator) {
    std::size_t end = in_.find(terminator, pos_);
    if (end == std::string_view::npos) parse_fail("unterminated number");
    std::string_view d = in_.substr(pos_, end - pos_);
    pos_ = end + 1;
    return d;
  }

  Value integer() {
    ++pos_;
    std::string_view d = digits_until('e');
    bool negative = !d.empty() && d.front() == '-';
    std::string_view magnitude = negative ? d.substr(1) : d;
    if (magnitude.empty() || (magnitude.size() > 1 && magnitude[0] == '0') ||
        (negative && magnitude == "0")) {
      parse_fail("non-canonical integer");
    }
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(d.data(), d.data() + d.size(), v);
    if (ec != std::errc() || ptr != d.data() + d.size()) {
      parse_fail("bad integer");
    }
    return v;
  }

  std::string string() {
    std::string_view d = digits_until(':');
    if (d.empty() || (d.size() > 1 && d[0] == '0')) {
      parse_fail("non-canonical length");
    }
    std::size_t len = 0;
    auto [ptr, ec] = std::from_chars(d.data(), d.data() + d.size(), len);
    if (ec != std::errc() || ptr != d.data() + d.size()) {
      parse_fail("bad length");
    }
    if (len > in_.size() - pos_) parse_fail("string overruns input");
    std::string s(in_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

const std::string& Value::as_string() const {
  if (auto* p = std::get_if<std::string>(&data)) return *p;
  parse_fail("expected string");
}

std::int64_t Value::as_int() const {
  if (auto* p = std::get_if<std::int64_t>(&data)) return *p;
  parse_fail("expected integer");
}

const List& Value::as_list() const {
  if (auto* p = std::get_if<List>(&data)) return *p;
  parse_fail("expected list");
}

const Dict& Value::as_dict() const {
  if (auto* p = std::get_if<Dict>(&data)) return *p;
  parse_fail("expected dict");
}

std::string encode(const Value& value) {
  std::string out;
  encode_into(value, out);
  return out;
}

Value decode(std::string_view bytes) { return Decoder(bytes).document(); }

const Value& field(const Dict& dict, const std::string& key) {
  auto it = dict.find(key);
  if (it == dict.end()) parse_fail("missing field '" + key + "'");
  return it->second;
}

}  // namespace das::canon
