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

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "aesrt/corpus.hpp"
#include "aesrt/keyphrase.hpp"
#include "aesrt/perturb/spec.hpp"
#include "aesrt/resources.hpp"

namespace aesrt {

/// Keyphrases taken from a prompt when matching wiki articles.
inline constexpr std::size_t kPromptKeyphrases = 10;

struct ArticleSplit {
  std::vector<const WikiArticle*> related;
  std::vector<const WikiArticle*> unrelated;
};

/// Question plus passage, the text keyphrases are drawn from.
inline std::string prompt_text(const Prompt& prompt) {
  std::string t = prompt.question_text;
  if (prompt.reading_passage) t += "\n\n" + *prompt.reading_passage;
  return t;
}

/// Partitions the wiki pool by whether an article's topic keys meet the
/// prompt's keyphrase terms.
inline ArticleSplit split_articles(const Prompt& prompt, const ResourcePack& pack) {
  const auto terms = folded_terms(extract_keyphrases(prompt_text(prompt), kPromptKeyphrases));
  ArticleSplit out;
  for (const auto& a : pack.wiki_articles) {
    bool hit = false;
    for (const auto& k : a.topic_keys) hit = hit || terms.count(fold_term(k)) > 0;
    (hit ? out.related : out.unrelated).push_back(&a);
  }
  return out;
}

namespace detail {

struct PoolSentence {
  std::string text;
  std::size_t words = 0;
};

inline std::vector<PoolSentence> to_pool(const std::vector<std::string>& lines) {
  std::vector<PoolSentence> out;
  for (const auto& l : lines) {
    std::string s = as_sentence(l);
    if (s.empty()) continue;
    const std::size_t w = word_count(s);
    out.push_back({std::move(s), w});
  }
  return out;
}

inline std::vector<PoolSentence> article_pool(const std::vector<const WikiArticle*>& articles) {
  std::vector<std::string> lines;
  for (const auto* a : articles) lines.insert(lines.end(), a->sentences.begin(), a->sentences.end());
  return to_pool(lines);
}

inline std::vector<PoolSentence> source_pool(const Response& response, const std::vector<SentenceSpan>& spans,
                                             const Prompt& prompt, const ResourcePack& pack, TestKind test,
                                             Rng& rng) {
  switch (test) {
    case TestKind::AddWikiRelated: return article_pool(split_articles(prompt, pack).related);
    case TestKind::AddWikiUnrelated: return article_pool(split_articles(prompt, pack).unrelated);
    case TestKind::AddSong: return to_pool(pack.songs);
    case TestKind::AddSpeech: return to_pool(pack.speeches);
    case TestKind::AddTruth: return to_pool(pack.facts);
    case TestKind::AddLies: return to_pool(pack.lies);
    case TestKind::AddRC: {
      if (prompt.kind != PromptKind::ReadingComprehension || !prompt.reading_passage)
        throw PerturbError("AddRC needs a reading-comprehension prompt with a passage");
      std::vector<std::string> lines;
      for (auto& s : split_sentences(*prompt.reading_passage)) lines.push_back(std::move(s.text));
      return to_pool(lines);
    }
    case TestKind::RepeatSent: {
      // one random sentence from every non-empty third, in order
      std::vector<std::string> lines;
      const auto th = thirds(spans.size());
      for (Position p : {Position::Start, Position::Mid, Position::End}) {
        const auto& r = th.at(p);
        if (!r.empty()) lines.push_back(spans[r.begin + rng.index(r.size())].text);
      }
      (void)response;
      std::vector<PoolSentence> out;
      for (auto& l : lines) out.push_back({l, word_count(l)});
      return out;
    }
    default: break;
  }
  throw PerturbError(std::string(to_string(test)) + " is not an Add test");
}

inline std::string_view pool_tag(TestKind test) noexcept {
  switch (test) {
    case TestKind::AddWikiRelated: return "wiki-related";
    case TestKind::AddWikiUnrelated: return "wiki-unrelated";
    case TestKind::RepeatSent: return "repeat";
    case TestKind::AddSong: return "song";
    case TestKind::AddSpeech: return "speech";
    case TestKind::AddRC: return "passage";
    case TestKind::AddTruth: return "fact";
    case TestKind::AddLies: return "lie";
    default: return "add";
  }
}

}  // namespace detail

/// Implements the eight Add tests.
///
/// Whole sentences are drawn from the source until the word budget
/// compute_budget(Len(r), c1) is reached, and inserted as one block where the
/// c2 third opens. Bounded mode then trims original sentences from the tail.
inline AdversarialResponse add_content(const Response& response, const Prompt& prompt, const ResourcePack& pack,
                                       const PerturbSpec& spec) {
  if (!is_add(spec.test)) throw PerturbError(std::string(to_string(spec.test)) + " is not an Add test");
  validate_spec(spec);
  const auto spans = split_sentences(response.text);
  if (spans.empty()) throw PerturbError("response " + response.id + " has no sentences");

  Rng rng(derive_seed(spec.seed, response.id, to_string(spec.test)));
  const auto pool = detail::source_pool(response, spans, prompt, pack, spec.test, rng);
  if (pool.empty()) throw PerturbError(std::string(to_string(spec.test)) + ": source pool is empty");

  const std::size_t len = word_count(response.text);
  const std::size_t budget = compute_budget(len, spec.c1);

  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (spec.test != TestKind::RepeatSent) rng.shuffle(std::span<std::size_t>(order));

  std::vector<PlanUnit> block;
  std::size_t added = 0;
  bool any_words = false;
  for (const auto& p : pool) any_words = any_words || p.words > 0;
  if (!any_words) throw PerturbError("source pool has no words");
  for (std::size_t k = 0; added < budget; ++k) {
    const auto& s = pool[order[k % order.size()]];
    if (s.words == 0) continue;
    block.push_back({std::nullopt, s.text, std::string(detail::pool_tag(spec.test)), std::nullopt});
    added += s.words;
  }

  const std::size_t at = thirds(spans.size()).at(spec.c2).begin;
  std::vector<PlanUnit> plan;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i == at) plan.insert(plan.end(), block.begin(), block.end());
    plan.push_back({i, {}, {}, std::nullopt});
  }
  if (at == spans.size()) plan.insert(plan.end(), block.begin(), block.end());

  AdversarialResponse adv;
  adv.original_id = response.id;
  adv.spec = spec;

  if (spec.bounded) {
    long excess = static_cast<long>(added);
    std::size_t originals = spans.size();
    for (std::size_t k = plan.size(); k-- > 0 && excess > 0 && originals > 1;) {
      if (!plan[k].original) continue;
      const long w = static_cast<long>(spans[*plan[k].original].words());
      if (w >= 2 * excess) break;
      adv.deleted_sentence_indices.push_back(*plan[k].original);
      excess -= w;
      --originals;
      plan.erase(plan.begin() + static_cast<std::ptrdiff_t>(k));
    }
    std::sort(adv.deleted_sentence_indices.begin(), adv.deleted_sentence_indices.end());
  }

  assemble(response.text, spans, plan, adv);
  return adv;
}

}  // namespace aesrt
