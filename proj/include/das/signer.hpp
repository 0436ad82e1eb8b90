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

// Token signing backends: a single key store, or a replicated cluster that
// signs with a 2-of-3 quorum.

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "das/token.hpp"

namespace das {

class TokenSigner {
 public:
  virtual ~TokenSigner() = default;
  // Signature set for the token's payload. Throws kKeyUnavailable or
  // kThresholdNotMet when no acceptable set can be produced.
  virtual std::vector<Signature> sign(const DelegationToken& token) = 0;
  virtual bool verify(const DelegationToken& token) const = 0;
};

class KeyStoreSigner final : public TokenSigner {
 public:
  explicit KeyStoreSigner(KeyStore keys) : keys_(std::move(keys)) {}
  std::vector<Signature> sign(const DelegationToken& token) override;
  bool verify(const DelegationToken& token) const override;
  const KeyStore& keys() const { return keys_; }

 private:
  KeyStore keys_;
};

// Key file: {"active": "<hex secret>", "trusted": ["<hex secret>", ...]}.
// Lets a restarted service keep its key and lets offline audits check
// signatures. Throws kIoError / kConfigError.
KeyStore load_key_file(const std::filesystem::path& path);
// Loads the file, or generates a key and writes it (mode 0600) when absent.
KeyStore load_or_create_key_file(const std::filesystem::path& path);

enum class ReplicaState { kHonest, kCrashed, kByzantine, kPartitioned };
std::string_view replica_state_name(ReplicaState s);

class SignerCluster final : public TokenSigner {
 public:
  explicit SignerCluster(std::size_t replicas = 3, std::size_t threshold = 2);
  SignerCluster(std::vector<SigningKey> keys, std::size_t threshold);

  void set_state(std::size_t replica, ReplicaState state);
  ReplicaState state(std::size_t replica) const;
  std::size_t size() const;
  std::size_t threshold() const { return threshold_; }
  std::string key_id(std::size_t replica) const;

  // Asks every replica concurrently and waits for all reachable ones.
  // Crashed and partitioned replicas contribute nothing; Byzantine replicas
  // return a corrupted MAC. Throws kThresholdNotMet below quorum.
  std::vector<Signature> sign(const DelegationToken& token) override;

  // Distinct replicas whose current key verifies one of the signatures.
  std::size_t valid_signatures(const DelegationToken& token) const;
  bool verify(const DelegationToken& token) const override;

  // Fresh key (and key id) for one replica; the old key is no longer used.
  void rotate_key(std::size_t replica);

 private:
  struct Replica {
    SigningKey key;
    ReplicaState state = ReplicaState::kHonest;
  };
  mutable std::mutex mu_;
  std::vector<Replica> replicas_;
  std::size_t threshold_;
};

}  // namespace das
