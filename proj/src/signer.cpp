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

#include "das/signer.hpp"

#include <fstream>
#include <future>
#include <optional>
#include <set>

#include <json.hpp>

#include "das/error.hpp"

namespace das {

std::string_view replica_state_name(ReplicaState s) {
  switch (s) {
    case ReplicaState::kHonest: return "HONEST";
    case ReplicaState::kCrashed: return "CRASHED";
    case ReplicaState::kByzantine: return "BYZANTINE";
    case ReplicaState::kPartitioned: return "PARTITIONED";
  }
  return "HONEST";
}

std::vector<Signature> KeyStoreSigner::sign(const DelegationToken& token) {
  return sign_token(token, keys_).signatures;
}

bool KeyStoreSigner::verify(const DelegationToken& token) const {
  return verify_signature(token, keys_);
}

namespace {

SigningKey key_from_hex(const nlohmann::json& j) {
  if (!j.is_string()) fail(ErrorCode::kConfigError, "key file: secrets must be hex strings");
  auto secret = from_hex(j.get<std::string>());
  if (!secret || secret->size() < 16) fail(ErrorCode::kConfigError, "key file: bad secret");
  return SigningKey::from_secret(std::move(*secret));
}

}  // namespace

KeyStore load_key_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot read key file " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("active")) {
    fail(ErrorCode::kConfigError, "key file " + path.string() + " needs an \"active\" secret");
  }
  KeyStore keys(key_from_hex(j.at("active")));
  if (j.contains("trusted")) {
    for (const auto& s : j.at("trusted")) keys.add_verification_key(key_from_hex(s));
  }
  return keys;
}

KeyStore load_or_create_key_file(const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) return load_key_file(path);
  SigningKey key = SigningKey::generate();
  {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::kIoError, "cannot write key file " + path.string());
    out << nlohmann::json{{"active", to_hex(key.secret)}, {"trusted", nlohmann::json::array()}}.dump() << "\n";
  }
  std::filesystem::permissions(path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
  return KeyStore(std::move(key));
}

SignerCluster::SignerCluster(std::size_t replicas, std::size_t threshold) : threshold_(threshold) {
  for (std::size_t i = 0; i < replicas; ++i) replicas_.push_back({SigningKey::generate()});
}

SignerCluster::SignerCluster(std::vector<SigningKey> keys, std::size_t threshold)
    : threshold_(threshold) {
  for (auto& k : keys) replicas_.push_back({std::move(k)});
}

void SignerCluster::set_state(std::size_t replica, ReplicaState state) {
  std::lock_guard lock(mu_);
  replicas_.at(replica).state = state;
}

ReplicaState SignerCluster::state(std::size_t replica) const {
  std::lock_guard lock(mu_);
  return replicas_.at(replica).state;
}

std::size_t SignerCluster::size() const {
  std::lock_guard lock(mu_);
  return replicas_.size();
}

std::string SignerCluster::key_id(std::size_t replica) const {
  std::lock_guard lock(mu_);
  return replicas_.at(replica).key.key_id;
}

std::vector<Signature> SignerCluster::sign(const DelegationToken& token) {
  std::vector<Replica> snapshot;
  {
    std::lock_guard lock(mu_);
    snapshot = replicas_;
  }
  std::vector<std::future<std::optional<Signature>>> pending;
  for (const auto& replica : snapshot) {
    pending.push_back(std::async(std::launch::async, [&token, replica] {
      std::optional<Signature> out;
      switch (replica.state) {
        case ReplicaState::kCrashed:
        case ReplicaState::kPartitioned:
          break;
        case ReplicaState::kHonest:
          out = mac_token(token, replica.key);
          break;
        case ReplicaState::kByzantine: {
          Signature sig = mac_token(token, replica.key);
          for (auto& b : sig.mac) b = static_cast<std::uint8_t>(~b);
          out = std::move(sig);
          break;
        }
      }
      return out;
    }));
  }
  std::vector<Signature> collected;
  for (auto& f : pending) {
    if (auto sig = f.get()) collected.push_back(std::move(*sig));
  }
  DelegationToken probe = token;
  probe.signatures = collected;
  std::size_t valid = valid_signatures(probe);
  if (valid < threshold_) {
    fail(ErrorCode::kThresholdNotMet, std::to_string(valid) + " valid signatures, need " +
                                          std::to_string(threshold_));
  }
  return collected;
}

std::size_t SignerCluster::valid_signatures(const DelegationToken& token) const {
  std::vector<SigningKey> keys;
  {
    std::lock_guard lock(mu_);
    for (const auto& r : replicas_) keys.push_back(r.key);
  }
  std::string payload = canonical_serialize(token);
  std::set<std::size_t> verified;
  for (const auto& sig : token.signatures) {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i].key_id != sig.key_id) continue;
      Digest expected = hmac_sha256(keys[i].secret, payload);
      if (constant_time_equal(expected, sig.mac)) verified.insert(i);
    }
  }
  return verified.size();
}

bool SignerCluster::verify(const DelegationToken& token) const {
  return valid_signatures(token) >= threshold_;
}

void SignerCluster::rotate_key(std::size_t replica) {
  std::lock_guard lock(mu_);
  replicas_.at(replica).key = SigningKey::generate();
}

}  // namespace das
