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

// Three-layer intent check run at delegation time: keyword filter,
// context-framed entailment via a pluggable classifier, benign override.

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "das/decision.hpp"

namespace das {

enum class NliLabel { kEntailment, kNeutral, kContradiction, kNotRun };
enum class IntentLayer { kKeyword, kNli, kOverride, kNone };

std::string_view nli_label_name(NliLabel label);
std::string_view intent_layer_name(IntentLayer layer);

struct IntentVerdict {
  Decision decision = Decision::kAllow;
  IntentLayer layer = IntentLayer::kNone;
  NliLabel nli_label = NliLabel::kNotRun;
  std::vector<std::string> matched_keywords;
  std::string error;  // set when the classifier failed (verdict is BLOCK)
};

struct IntentConfig {
  std::vector<std::string> keywords;
  std::vector<std::string> benign_indicators;
  std::vector<std::string> suspicious_verbs;  // stems, prefix-matched on words
  std::vector<std::string> stopwords;

  // The shipped lexicon (intent_lexicon.json).
  static IntentConfig defaults();
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  // Always one of ENTAILMENT / NEUTRAL / CONTRADICTION. Implementations that
  // cannot answer throw das::Error(kClassifierUnavailable).
  virtual NliLabel classify(std::string_view premise, std::string_view hypothesis) = 0;
};

// Deterministic default. ENTAILMENT when the subtask's content words are a
// subset of the goal's; CONTRADICTION when they share no content word and
// the subtask uses a suspicious verb; NEUTRAL otherwise.
class LexicalClassifier final : public Classifier {
 public:
  explicit LexicalClassifier(IntentConfig config = IntentConfig::defaults());
  NliLabel classify(std::string_view premise, std::string_view hypothesis) override;

 private:
  IntentConfig config_;
};

// Posts {premise, hypothesis} to an HTTP endpoint and reads {label}.
class RemoteClassifier final : public Classifier {
 public:
  explicit RemoteClassifier(std::string url,
                            std::chrono::milliseconds timeout = std::chrono::seconds(2));
  NliLabel classify(std::string_view premise, std::string_view hypothesis) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

struct KeywordHits {
  bool blocked = false;
  std::vector<std::string> matches;
};

// Case-insensitive substring match.
KeywordHits keyword_filter(std::string_view subtask,
                           const std::vector<std::string>& keywords);

struct EnrichedQuery {
  std::string premise;
  std::string hypothesis;
};

// Throws kEmptyIntent if either input is empty.
EnrichedQuery build_enriched_query(std::string_view root_goal, std::string_view subtask);

bool benign_override(NliLabel label, std::string_view subtask,
                     const std::vector<std::string>& benign_indicators,
                     const std::vector<std::string>& matched_keywords);

IntentVerdict verify_intent(std::string_view root_goal, std::string_view subtask,
                            Classifier& classifier, const IntentConfig& config);

// Lowercased, stopword-free, lightly stemmed word set. Exposed for tests.
std::vector<std::string> content_words(std::string_view text,
                                       const std::vector<std::string>& stopwords);

}  // namespace das
