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

// Keyword-seeded nonsense essays built from slotted sentence templates.

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aesrt/perturb/spec.hpp"
#include "aesrt/resources.hpp"

namespace aesrt {

namespace detail {

struct TemplatePiece {
  enum Kind { Literal, Keyword, Obscure } kind = Literal;
  std::string text;
};

inline std::vector<TemplatePiece> parse_template(std::string_view t) {
  std::vector<TemplatePiece> out;
  std::size_t i = 0;
  while (i < t.size()) {
    const std::size_t kw = t.find("{KW}", i);
    const std::size_t ob = t.find("{OBSCURE}", i);
    const std::size_t next = std::min(kw, ob);
    if (next == std::string_view::npos) {
      out.push_back({TemplatePiece::Literal, std::string(t.substr(i))});
      break;
    }
    if (next > i) out.push_back({TemplatePiece::Literal, std::string(t.substr(i, next - i))});
    if (next == kw) {
      out.push_back({TemplatePiece::Keyword, {}});
      i = next + 4;
    } else {
      out.push_back({TemplatePiece::Obscure, {}});
      i = next + 9;
    }
  }
  return out;
}

/// Words a template yields when every keyword slot holds `kw_words` words.
inline std::size_t template_words(const std::vector<TemplatePiece>& pieces, std::size_t kw_words) {
  std::string probe;
  for (const auto& p : pieces) {
    if (p.kind == TemplatePiece::Literal) probe += p.text;
    else if (p.kind == TemplatePiece::Obscure) probe += "x";
    else {
      for (std::size_t k = 0; k < kw_words; ++k) probe += k ? " x" : "x";
    }
  }
  return word_count(probe);
}

}  // namespace detail

/// Minimum occurrences of each keyword in a text of `word_target` words.
inline std::size_t babel_keyword_quota(int word_target) {
  return static_cast<std::size_t>((word_target + 149) / 150);
}

/// Generates an essay of word_target +- 10% words in 3 to 5 paragraphs.
/// Templates are drawn at random among those that keep the total within
/// the upper bound; keywords fill their slots round-robin and take over
/// obscure-word slots when a keyword would fall short of its quota.
inline std::string babel_text(const std::vector<std::string>& keywords, const BabelLexicon& lexicon,
                              int word_target, std::uint64_t seed) {
  if (keywords.size() != 3) throw PerturbError("BabelGen needs exactly 3 keywords");
  for (const auto& k : keywords)
    if (trim(k).empty()) throw PerturbError("BabelGen keywords must be non-empty");
  if (word_target < 50) throw PerturbError("babel word target must be at least 50");
  if (lexicon.templates.empty() || lexicon.obscure_words.empty()) throw PerturbError("babel lexicon is empty");

  Rng rng(Digest{}.add(seed).add(std::string_view("babel")).value());
  std::size_t kw_words = 1;
  for (const auto& k : keywords) kw_words = std::max(kw_words, word_count(k));

  std::vector<std::vector<detail::TemplatePiece>> parsed;
  std::vector<std::size_t> cost;
  for (const auto& t : lexicon.templates) {
    parsed.push_back(detail::parse_template(t));
    cost.push_back(detail::template_words(parsed.back(), kw_words));
  }

  const std::size_t target = static_cast<std::size_t>(word_target);
  const std::size_t ceiling = target + target / 10;
  std::vector<std::size_t> chosen;
  std::size_t total = 0;
  while (total < target) {
    std::vector<std::size_t> fits;
    for (std::size_t i = 0; i < parsed.size(); ++i)
      if (cost[i] > 0 && total + cost[i] <= ceiling) fits.push_back(i);
    if (fits.empty()) break;
    const std::size_t pick = fits[rng.index(fits.size())];
    chosen.push_back(pick);
    total += cost[pick];
  }

  // slot assignment: keywords round-robin, obscure words from a shuffled deck
  struct Slot {
    std::size_t sentence;
    std::size_t piece;
    bool keyword;
    std::size_t word;  // keyword index, or deck position
  };
  std::vector<Slot> slots;
  std::vector<std::size_t> counts(3, 0);
  std::size_t next_kw = 0;
  for (std::size_t s = 0; s < chosen.size(); ++s) {
    const auto& pieces = parsed[chosen[s]];
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      if (pieces[p].kind == detail::TemplatePiece::Keyword) {
        slots.push_back({s, p, true, next_kw});
        ++counts[next_kw];
        next_kw = (next_kw + 1) % 3;
      } else if (pieces[p].kind == detail::TemplatePiece::Obscure) {
        slots.push_back({s, p, false, 0});
      }
    }
  }
  const std::size_t quota = babel_keyword_quota(word_target);
  for (std::size_t k = 0; k < 3; ++k) {
    for (auto& slot : slots) {
      if (counts[k] >= quota) break;
      if (!slot.keyword && word_count(keywords[k]) <= 1) {
        slot.keyword = true;
        slot.word = k;
        ++counts[k];
      }
    }
  }

  std::vector<std::size_t> deck(lexicon.obscure_words.size());
  std::size_t deck_pos = deck.size();
  auto draw = [&]() -> const std::string& {
    if (deck_pos == deck.size()) {
      for (std::size_t i = 0; i < deck.size(); ++i) deck[i] = i;
      rng.shuffle(std::span<std::size_t>(deck));
      deck_pos = 0;
    }
    return lexicon.obscure_words[deck[deck_pos++]];
  };

  std::vector<std::string> sentences(chosen.size());
  std::size_t si = 0;
  for (std::size_t s = 0; s < chosen.size(); ++s) {
    const auto& pieces = parsed[chosen[s]];
    std::string text;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      if (pieces[p].kind == detail::TemplatePiece::Literal) {
        text += pieces[p].text;
        continue;
      }
      const Slot& slot = slots[si++];
      text += slot.keyword ? std::string(trim(keywords[slot.word])) : draw();
    }
    for (char& c : text) {
      if (is_alpha(c)) {
        c = to_upper(c);
        break;
      }
    }
    sentences[s] = std::move(text);
  }

  std::size_t paragraphs = 3 + rng.index(3);
  paragraphs = std::min(paragraphs, sentences.size());
  std::string out;
  const std::size_t per = sentences.size() / std::max<std::size_t>(paragraphs, 1);
  const std::size_t extra = sentences.size() % std::max<std::size_t>(paragraphs, 1);
  std::size_t s = 0;
  for (std::size_t p = 0; p < paragraphs; ++p) {
    const std::size_t take = per + (p < extra ? 1 : 0);
    if (p > 0) out += "\n\n";
    for (std::size_t k = 0; k < take; ++k, ++s) {
      if (k > 0) out += ' ';
      out += sentences[s];
    }
  }
  return out;
}

/// BabelGen as a perturbation: the response is replaced wholesale.
inline AdversarialResponse babel_generate(const std::vector<std::string>& keywords, const BabelLexicon& lexicon,
                                          int word_target, std::uint64_t seed, std::string_view original_id = {},
                                          std::string_view original_text = {}) {
  AdversarialResponse adv;
  adv.original_id = std::string(original_id);
  adv.spec.test = TestKind::BabelGen;
  adv.spec.seed = seed;
  adv.spec.babel_keywords = keywords;
  adv.spec.babel_word_target = word_target;
  TextBuilder b(original_text);
  b.insert(babel_text(keywords, lexicon, word_target, seed), "babel");
  b.remove(0, original_text.size());
  b.finish(adv);
  return adv;
}

}  // namespace aesrt
