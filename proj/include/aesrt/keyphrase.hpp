// Copyright 2026 The aesrt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Frequency x position keyphrase ranking for prompt texts.
//
// Candidates are unigrams and adjacent bigrams of content words (alphabetic,
// at least three letters, not a stopword, not a closed-list verb, not an
// "-ly" adverb). A candidate seen `f` times whose first occurrence is at
// token `p` of `L` tokens scores f * (1 + (L - p) / L); bigrams get a 1.5x
// boost. Ties break lexicographically.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aesrt/textops.hpp"

namespace aesrt {

struct Keyphrase {
  std::string text;
  double score = 0.0;

  bool operator==(const Keyphrase&) const = default;
};

namespace detail {

inline bool is_content_word(std::string_view lower) noexcept {
  if (lower.size() < 3) return false;
  for (char c : lower)
    if (!is_lower(c)) return false;
  if (is_stopword(lower) || is_closed_verb(lower)) return false;
  return !(lower.size() > 3 && lower.ends_with("ly"));
}

}  // namespace detail

inline std::vector<Keyphrase> rank_keyphrases(std::string_view text, std::size_t k) {
  const auto toks = tokens(text);
  const double total = static_cast<double>(toks.size());
  struct Stat {
    std::size_t freq = 0;
    std::size_t first = 0;
    bool bigram = false;
  };
  std::map<std::string, Stat> stats;
  auto bump = [&](const std::string& key, std::size_t pos, bool bigram) {
    auto [it, fresh] = stats.try_emplace(key);
    if (fresh) {
      it->second.first = pos;
      it->second.bigram = bigram;
    }
    ++it->second.freq;
  };

  std::string prev;  // previous content word if adjacent, else empty
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto core = token_core(toks[i]);
    const std::string lower = to_lower(core.text);
    const bool content = detail::is_content_word(lower);
    if (content) {
      bump(lower, i, false);
      if (!prev.empty()) bump(prev + " " + lower, i - 1, true);
    }
    // punctuation after the word breaks a phrase
    const bool breaks = core.end < toks[i].size();
    prev = (content && !breaks) ? lower : std::string();
  }

  std::vector<Keyphrase> ranked;
  ranked.reserve(stats.size());
  for (const auto& [phrase, s] : stats) {
    double score = static_cast<double>(s.freq) * (1.0 + (total - static_cast<double>(s.first)) / total);
    if (s.bigram) score *= 1.5;
    ranked.push_back({phrase, score});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Keyphrase& a, const Keyphrase& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

/// Top-k keyphrases of a prompt text, best first.
inline std::vector<std::string> extract_keyphrases(std::string_view prompt_text, std::size_t k) {
  std::vector<std::string> out;
  for (auto& kp : rank_keyphrases(prompt_text, k)) out.push_back(std::move(kp.text));
  return out;
}

/// Lowercase with a plural "s" stripped from words longer than three letters,
/// so "computers" meets "computer".
inline std::string fold_term(std::string_view word) {
  std::string w = to_lower(word);
  if (w.size() > 3 && w.back() == 's' && w[w.size() - 2] != 's') w.pop_back();
  return w;
}

/// Every word of every phrase, folded.
inline std::set<std::string> folded_terms(const std::vector<std::string>& phrases) {
  std::set<std::string> out;
  for (const auto& p : phrases)
    for (auto t : tokens(p)) out.insert(fold_term(token_core(t).text));
  return out;
}

}  // namespace aesrt
