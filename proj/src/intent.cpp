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

#include "das/intent.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <json.hpp>

#include "das/data.hpp"
#include "das/error.hpp"

namespace das {

namespace {

constexpr std::string_view kPremisePrefix = "An AI agent is authorized to ";
constexpr std::string_view kPremiseSuffix =
    ". The agent performs only tasks that support this goal.";
constexpr std::string_view kHypothesisPrefix = "The agent is now performing: ";
constexpr std::string_view kHypothesisSuffix = ".";

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool contains_ci(const std::string& haystack_lower, std::string_view needle) {
  return !needle.empty() && haystack_lower.find(lower(needle)) != std::string::npos;
}

std::string_view strip_frame(std::string_view text, std::string_view prefix,
                             std::string_view suffix) {
  if (text.size() >= prefix.size() + suffix.size() && text.substr(0, prefix.size()) == prefix &&
      text.substr(text.size() - suffix.size()) == suffix) {
    return text.substr(prefix.size(), text.size() - prefix.size() - suffix.size());
  }
  return text;
}

std::vector<std::string> string_array(const nlohmann::json& j, const char* key) {
  std::vector<std::string> out;
  if (j.contains(key)) {
    for (const auto& item : j.at(key)) out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

std::string_view nli_label_name(NliLabel label) {
  switch (label) {
    case NliLabel::kEntailment: return "ENTAILMENT";
    case NliLabel::kNeutral: return "NEUTRAL";
    case NliLabel::kContradiction: return "CONTRADICTION";
    case NliLabel::kNotRun: return "NOT_RUN";
  }
  return "NOT_RUN";
}

std::string_view intent_layer_name(IntentLayer layer) {
  switch (layer) {
    case IntentLayer::kKeyword: return "KEYWORD";
    case IntentLayer::kNli: return "NLI";
    case IntentLayer::kOverride: return "OVERRIDE";
    case IntentLayer::kNone: return "NONE";
  }
  return "NONE";
}

IntentConfig IntentConfig::defaults() {
  static const IntentConfig cached = [] {
    auto j = nlohmann::json::parse(embedded_data("intent_lexicon.json"));
    IntentConfig c;
    c.keywords = string_array(j, "keywords");
    c.benign_indicators = string_array(j, "benign_indicators");
    c.suspicious_verbs = string_array(j, "suspicious_verbs");
    c.stopwords = string_array(j, "stopwords");
    return c;
  }();
  return cached;
}

std::vector<std::string> content_words(std::string_view text,
                                       const std::vector<std::string>& stopwords) {
  std::set<std::string> stop(stopwords.begin(), stopwords.end());
  std::set<std::string> words;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 && !stop.count(current)) {
      // Plural folding so "benefit" and "benefits" count as one word.
      if (current.size() > 3 && current.back() == 's' && current[current.size() - 2] != 's') {
        current.pop_back();
      }
      words.insert(current);
    }
    current.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return {words.begin(), words.end()};
}

LexicalClassifier::LexicalClassifier(IntentConfig config) : config_(std::move(config)) {}

NliLabel LexicalClassifier::classify(std::string_view premise, std::string_view hypothesis) {
  auto goal = content_words(strip_frame(premise, kPremisePrefix, kPremiseSuffix), config_.stopwords);
  auto task = content_words(strip_frame(hypothesis, kHypothesisPrefix, kHypothesisSuffix),
                            config_.stopwords);

  if (!task.empty() && std::includes(goal.begin(), goal.end(), task.begin(), task.end())) {
    return NliLabel::kEntailment;
  }
  bool shares_word = std::any_of(task.begin(), task.end(), [&](const std::string& w) {
    return std::binary_search(goal.begin(), goal.end(), w);
  });
  bool suspicious = std::any_of(task.begin(), task.end(), [&](const std::string& w) {
    return std::any_of(config_.suspicious_verbs.begin(), config_.suspicious_verbs.end(),
                       [&](const std::string& stem) { return w.rfind(stem, 0) == 0; });
  });
  if (!shares_word && suspicious) return NliLabel::kContradiction;
  return NliLabel::kNeutral;
}

KeywordHits keyword_filter(std::string_view subtask, const std::vector<std::string>& keywords) {
  KeywordHits hits;
  std::string haystack = lower(subtask);
  for (const auto& keyword : keywords) {
    if (contains_ci(haystack, keyword)) hits.matches.push_back(keyword);
  }
  hits.blocked = !hits.matches.empty();
  return hits;
}

EnrichedQuery build_enriched_query(std::string_view root_goal, std::string_view subtask) {
  if (root_goal.empty() || subtask.empty()) {
    fail(ErrorCode::kEmptyIntent, "root goal and subtask must both be non-empty");
  }
  EnrichedQuery q;
  q.premise.append(kPremisePrefix).append(root_goal).append(kPremiseSuffix);
  q.hypothesis.append(kHypothesisPrefix).append(subtask).append(kHypothesisSuffix);
  return q;
}

bool benign_override(NliLabel label, std::string_view subtask,
                     const std::vector<std::string>& benign_indicators,
                     const std::vector<std::string>& matched_keywords) {
  if (label != NliLabel::kContradiction || !matched_keywords.empty()) return false;
  std::string haystack = lower(subtask);
  return std::any_of(benign_indicators.begin(), benign_indicators.end(),
                     [&](const std::string& ind) { return contains_ci(haystack, ind); });
}

IntentVerdict verify_intent(std::string_view root_goal, std::string_view subtask,
                            Classifier& classifier, const IntentConfig& config) {
  IntentVerdict verdict;
  KeywordHits hits = keyword_filter(subtask, config.keywords);
  if (hits.blocked) {
    verdict.decision = Decision::kBlock;
    verdict.layer = IntentLayer::kKeyword;
    verdict.matched_keywords = std::move(hits.matches);
    return verdict;
  }

  EnrichedQuery query = build_enriched_query(root_goal, subtask);
  try {
    verdict.nli_label = classifier.classify(query.premise, query.hypothesis);
  } catch (const std::exception& e) {
    // Fail closed.
    verdict.decision = Decision::kBlock;
    verdict.layer = IntentLayer::kNli;
    verdict.nli_label = NliLabel::kNotRun;
    verdict.error = e.what();
    return verdict;
  }

  if (verdict.nli_label == NliLabel::kNotRun) {
    verdict.decision = Decision::kBlock;
    verdict.layer = IntentLayer::kNli;
    verdict.error = "classifier returned no label";
  } else if (verdict.nli_label != NliLabel::kContradiction) {
    verdict.decision = Decision::kAllow;
    verdict.layer = IntentLayer::kNone;
  } else if (benign_override(verdict.nli_label, subtask, config.benign_indicators,
                             verdict.matched_keywords)) {
    verdict.decision = Decision::kAllow;
    verdict.layer = IntentLayer::kOverride;
  } else {
    verdict.decision = Decision::kBlock;
    verdict.layer = IntentLayer::kNli;
  }
  return verdict;
}

}  // namespace das
