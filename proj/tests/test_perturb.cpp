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

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "aesrt/corpus.hpp"
#include "aesrt/keyphrase.hpp"
#include "aesrt/perturb/apply.hpp"
#include "aesrt/resources.hpp"
#include "aesrt/sample_corpus.hpp"

namespace aesrt {
namespace {

const ResourcePack& pack() {
  static const ResourcePack p = load_resource_pack(default_resource_dir());
  return p;
}

std::size_t recount(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}

std::vector<std::string> sentences_of(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& s : split_sentences(text)) out.push_back(s.text);
  return out;
}

std::size_t max_sentence_words(std::string_view text) {
  std::size_t m = 0;
  for (const auto& s : split_sentences(text)) m = std::max(m, recount(s.text));
  return m;
}

std::size_t max_inserted_words(const AdversarialResponse& adv) {
  std::size_t m = 0;
  for (const auto& s : adv.inserted_spans)
    for (const auto& sent : split_sentences(std::string_view(adv.text).substr(s.offset, s.length)))
      m = std::max(m, recount(sent.text));
  return m;
}

Response response(std::string id, std::string text) { return {std::move(id), "p", std::move(text), 2}; }

Prompt plain_prompt() {
  Prompt p;
  p.id = "p";
  p.question_text = "Describe a time when you were patient.";
  p.score_min = 0;
  p.score_max = 10;
  p.kind = PromptKind::Narrative;
  return p;
}

PerturbSpec spec_for(TestKind t, int c1 = 10, Position c2 = Position::End, bool bounded = false,
                     std::uint64_t seed = 7) {
  PerturbSpec s;
  s.test = t;
  s.c1 = c1;
  s.c2 = c2;
  s.bounded = bounded;
  s.seed = seed;
  return s;
}

std::string repeat_words(const std::string& stem, std::size_t words) {
  std::string out = stem;
  for (std::size_t i = 1; i < words; ++i) out += " w" + std::to_string(i);
  return out + ".";
}

// --- keyphrases ------------------------------------------------------------------------

TEST(Keyphrases, ComputersPrompt) {
  const std::string text =
      "More and more people use computers, but not everyone agrees that this benefits society. Write a letter "
      "to your local newspaper in which you state your opinion on the effects computers have on people.";
  const auto top = extract_keyphrases(text, 3);
  EXPECT_NE(std::find(top.begin(), top.end(), "computers"), top.end());
  EXPECT_EQ(extract_keyphrases(text, 3), top);
}

TEST(Keyphrases, OnlyStopwords) {
  EXPECT_TRUE(extract_keyphrases("the and of to a in is it", 5).empty());
  EXPECT_TRUE(extract_keyphrases("", 5).empty());
}

TEST(Keyphrases, WikiSplitHonoursTopics) {
  const Corpus& c = bundled_sample_corpus();
  for (const auto& [id, prompt] : c.prompts) {
    const auto terms = folded_terms(extract_keyphrases(prompt_text(prompt), kPromptKeyphrases));
    const auto split = split_articles(prompt, pack());
    EXPECT_FALSE(split.related.empty()) << id;
    EXPECT_FALSE(split.unrelated.empty()) << id;
    auto hits = [&](const WikiArticle* a) {
      return std::any_of(a->topic_keys.begin(), a->topic_keys.end(),
                         [&](const std::string& k) { return terms.count(fold_term(k)) > 0; });
    };
    for (const auto* a : split.related) EXPECT_TRUE(hits(a));
    for (const auto* a : split.unrelated) EXPECT_FALSE(hits(a));
  }
}

// --- Add -------------------------------------------------------------------------------

TEST(AddContent, HundredWordBudget) {
  std::string text;
  for (int i = 0; i < 10; ++i) text += (i ? " " : "") + repeat_words("Sentence" + std::to_string(i), 10);
  const Response r = response("r100", text);
  ASSERT_EQ(word_count(r.text), 100u);
  ResourcePack p = pack();
  p.songs.clear();
  for (int i = 0; i < 30; ++i) p.songs.push_back(repeat_words("Song" + std::to_string(i), 15));
  const auto adv = add_content(r, plain_prompt(), p, spec_for(TestKind::AddSong, 20, Position::End));
  const auto len = recount(adv.text);
  EXPECT_GE(len, 115u);
  EXPECT_LE(len, 135u);
  ASSERT_FALSE(adv.inserted_spans.empty());
  for (const auto& s : adv.inserted_spans)
    if (s.tag != "separator") {
      EXPECT_EQ(s.tag, "song");
    }
  EXPECT_EQ(reconstruct_original(adv), r.text);
}

TEST(AddContent, RepeatSentCopiesExistingSentences) {
  const Response r = response("six", "One fish swam. Two birds sang loudly. Three cats slept all day. Four dogs barked. "
                                     "Five cows grazed in the field. Six owls watched.");
  const auto original = sentences_of(r.text);
  ASSERT_EQ(original.size(), 6u);
  const auto adv = add_content(r, plain_prompt(), pack(), spec_for(TestKind::RepeatSent, 25, Position::Mid));
  ASSERT_FALSE(adv.inserted_spans.empty());
  for (const auto& s : adv.inserted_spans) {
    for (const auto& sent : sentences_of(std::string_view(adv.text).substr(s.offset, s.length)))
      EXPECT_NE(std::find(original.begin(), original.end(), sent), original.end()) << sent;
  }
}

TEST(AddContent, BoundedSongKeepsLength) {
  for (const auto& r : bundled_sample_corpus().responses) {
    const auto adv = apply(spec_for(TestKind::AddSong, 10, Position::Mid, true), r,
                           bundled_sample_corpus().prompt_of(r), pack());
    const double len = static_cast<double>(recount(r.text));
    const double longest = static_cast<double>(std::max(max_sentence_words(r.text), max_inserted_words(adv)));
    EXPECT_LE(std::abs(static_cast<double>(recount(adv.text)) - len) / len, 0.05 + longest / len) << r.id;
  }
}

TEST(AddContent, InsertsAtOpeningOfThird) {
  const Response r = response("six", "A a a. B b b. C c c. D d d. E e e. F f f.");
  ResourcePack p = pack();
  p.facts = {"Water boils at one hundred degrees."};
  const auto start = add_content(r, plain_prompt(), p, spec_for(TestKind::AddTruth, 5, Position::Start));
  const auto mid = add_content(r, plain_prompt(), p, spec_for(TestKind::AddTruth, 5, Position::Mid));
  const auto end = add_content(r, plain_prompt(), p, spec_for(TestKind::AddTruth, 5, Position::End));
  EXPECT_EQ(sentences_of(start.text)[0], "Water boils at one hundred degrees.");
  EXPECT_EQ(sentences_of(mid.text)[2], "Water boils at one hundred degrees.");
  EXPECT_EQ(sentences_of(end.text)[4], "Water boils at one hundred degrees.");
}

TEST(AddContent, Errors) {
  const Corpus& c = bundled_sample_corpus();
  const Response* narrative = nullptr;
  for (const auto& r : c.responses)
    if (c.prompt_of(r).kind != PromptKind::ReadingComprehension) narrative = &r;
  ASSERT_NE(narrative, nullptr);
  EXPECT_THROW(add_content(*narrative, c.prompt_of(*narrative), pack(), spec_for(TestKind::AddRC)), PerturbError);
  ResourcePack empty = pack();
  empty.lies.clear();
  EXPECT_THROW(add_content(*narrative, c.prompt_of(*narrative), empty, spec_for(TestKind::AddLies)), PerturbError);
  EXPECT_THROW(add_content(response("blank", "   "), plain_prompt(), pack(), spec_for(TestKind::AddSong)),
               PerturbError);
}

// --- Delete ----------------------------------------------------------------------------

TEST(DeleteContent, StartRemovesFirstOfFourEqual) {
  const Response r = response("four", "Aa bb cc dd. Ee ff gg hh. Ii jj kk ll. Mm nn oo pp.");
  const auto adv = delete_content(r, spec_for(TestKind::DelStart, 25));
  EXPECT_EQ(adv.deleted_sentence_indices, (std::vector<std::size_t>{0}));
  EXPECT_EQ(adv.text, "Ee ff gg hh. Ii jj kk ll. Mm nn oo pp.");
}

TEST(DeleteContent, RandIsDeterministic) {
  const auto& r = bundled_sample_corpus().responses[10];
  const auto a = delete_content(r, spec_for(TestKind::DelRand, 25));
  const auto b = delete_content(r, spec_for(TestKind::DelRand, 25));
  EXPECT_EQ(a.deleted_sentence_indices, b.deleted_sentence_indices);
  EXPECT_EQ(a.text, b.text);
}

TEST(DeleteContent, EndOnBundledResponseThree) {
  const auto& r = bundled_sample_corpus().responses[3];
  const auto adv = delete_content(r, spec_for(TestKind::DelEnd, 25));
  const double ratio = static_cast<double>(recount(adv.text)) / static_cast<double>(recount(r.text));
  EXPECT_GE(ratio, 0.70);
  EXPECT_LE(ratio, 0.80);
}

TEST(DeleteContent, SingleSentenceErrors) {
  const Response r = response("one", "Only one sentence here.");
  for (auto t : {TestKind::DelStart, TestKind::DelEnd, TestKind::DelRand})
    EXPECT_THROW(delete_content(r, spec_for(t)), PerturbError);
  EXPECT_THROW(apply(spec_for(TestKind::DelStart), r, plain_prompt(), pack()), PerturbError);
}

// --- ModGrammar --------------------------------------------------------------------------

TEST(ModGrammar, SvoFixture) {
  EXPECT_EQ(svo_reorder("Anita is going to the park for a walk."), "Anita to the park is going for a walk.");
}

TEST(ModGrammar, ErrorPipelineFixture) {
  EXPECT_EQ(error_pipeline("Anita is going to the park for a walk.", pack().abbreviations),
            "anita go 2 an park 4 the walk");
}

TEST(ModGrammar, WholeResponseModes) {
  const Response r = response("anita", "Anita is going to the park for a walk.");
  auto s = spec_for(TestKind::ModGrammar, 25);
  s.grammar_mode = GrammarMode::SvoReorder;
  EXPECT_EQ(mod_grammar(r, s, pack().abbreviations).text, "Anita to the park is going for a walk.");
  s.grammar_mode = GrammarMode::ErrorPipeline;
  EXPECT_EQ(mod_grammar(r, s, pack().abbreviations).text, "anita go 2 an park 4 the walk");
  auto dflt = spec_for(TestKind::ModGrammar, 25);
  EXPECT_EQ(apply(dflt, r, plain_prompt(), pack()).text, "anita go 2 an park 4 the walk");
}

TEST(ModGrammar, NoVerbIsUnchanged) {
  EXPECT_FALSE(svo_reorder("Lovely weather today.").has_value());
  const Response r = response("nv", "Lovely weather today.");
  auto s = spec_for(TestKind::ModGrammar, 25);
  s.grammar_mode = GrammarMode::SvoReorder;
  const auto adv = mod_grammar(r, s, pack().abbreviations);
  EXPECT_EQ(adv.text, r.text);
  EXPECT_EQ(adv.unchanged_sentences, 1u);
}

// --- ModLexicon --------------------------------------------------------------------------

TEST(ModLexicon, TomFixture) {
  const Response r = response("tom", "Tom was a happy man. He lived a simple life.");
  const SynonymMap lex = {{"happy", {"grinning"}}, {"simple", {"bare"}}};
  const auto adv = mod_lexicon(r, lex, spec_for(TestKind::ModLexicon));
  EXPECT_EQ(adv.text, "Tom was a grinning man. He lived a bare life.");
  EXPECT_EQ(adv.replacements, 2u);
  EXPECT_EQ(reconstruct_original(adv), r.text);
}

TEST(ModLexicon, NoEntriesIsNoOp) {
  const Response r = response("none", "Zyx qwv. Plm rtz.");
  const SynonymMap lex = {{"happy", {"grinning"}}};
  const auto adv = mod_lexicon(r, lex, spec_for(TestKind::ModLexicon));
  EXPECT_EQ(adv.text, r.text);
  EXPECT_NE(std::find(adv.diagnostics.begin(), adv.diagnostics.end(), "0 replacements"), adv.diagnostics.end());
}

TEST(ModLexicon, CasingIsCopied) {
  const Response r = response("case", "Happy people laugh.");
  const SynonymMap lex = {{"happy", {"cheerful"}}};
  EXPECT_EQ(mod_lexicon(r, lex, spec_for(TestKind::ModLexicon)).text, "Cheerful people laugh.");
}

// --- ShuffleSent ---------------------------------------------------------------------------

TEST(ShuffleSent, TwoSentencesSwap) {
  const Response r = response("two", "First one here. Second one there.");
  EXPECT_EQ(shuffle_sent(r, spec_for(TestKind::ShuffleSent)).text, "Second one there. First one here.");
}

TEST(ShuffleSent, SeedsAndDeterminism) {
  std::string text;
  for (int i = 0; i < 10; ++i) text += "Sentence number " + std::to_string(i) + " is here. ";
  const Response r = response("ten", text);
  std::set<std::string> orders;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = shuffle_sent(r, spec_for(TestKind::ShuffleSent, 10, Position::End, false, seed));
    EXPECT_EQ(a.text, shuffle_sent(r, spec_for(TestKind::ShuffleSent, 10, Position::End, false, seed)).text);
    EXPECT_NE(a.text, r.text);
    orders.insert(a.text);
  }
  EXPECT_EQ(orders.size(), 100u);
  EXPECT_THROW(shuffle_sent(response("one", "Just one."), spec_for(TestKind::ShuffleSent)), PerturbError);
}

// --- BabelGen ------------------------------------------------------------------------------

std::size_t keyword_hits(const std::string& text, const std::string& keyword) {
  std::size_t n = 0;
  for (auto t : tokens(text))
    if (to_lower(token_core(t).text) == to_lower(keyword)) ++n;
  return n;
}

TEST(Babel, FigureKeywords) {
  const std::vector<std::string> kw = {"laughter", "benefits", "relationship"};
  const auto text = babel_text(kw, pack().babel_lexicon, 500, 11);
  const auto n = recount(text);
  EXPECT_GE(n, 450u);
  EXPECT_LE(n, 550u);
  for (const auto& k : kw) EXPECT_GE(keyword_hits(text, k), 4u) << k;
  EXPECT_EQ(text, babel_text(kw, pack().babel_lexicon, 500, 11));
}

TEST(Babel, TwentyRandomTriples) {
  std::vector<std::string> vocab;
  for (const auto& w : pack().babel_lexicon.obscure_words) vocab.push_back(w);
  for (const char* w : {"school", "library", "family", "ocean", "music", "science", "garden", "winter"})
    vocab.push_back(w);
  std::mt19937_64 gen(99);
  std::set<std::string> pool_sentences;
  for (const auto* list : {&pack().songs, &pack().speeches, &pack().facts, &pack().lies})
    for (const auto& s : *list) pool_sentences.insert(s);
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> kw;
    while (kw.size() < 3) {
      const auto& w = vocab[gen() % vocab.size()];
      if (std::find(kw.begin(), kw.end(), w) == kw.end()) kw.push_back(w);
    }
    const int target = 200 + static_cast<int>(gen() % 5) * 100;
    const auto seed = gen();
    const auto text = babel_text(kw, pack().babel_lexicon, target, seed);
    const auto n = static_cast<double>(recount(text));
    EXPECT_GE(n, 0.9 * target) << i;
    EXPECT_LE(n, 1.1 * target) << i;
    for (const auto& k : kw) EXPECT_GE(keyword_hits(text, k), babel_keyword_quota(target)) << k;
    EXPECT_EQ(text, babel_text(kw, pack().babel_lexicon, target, seed));
    std::set<std::string> types;
    for (auto t : tokens(text)) types.insert(to_lower(token_core(t).text));
    EXPECT_GE(static_cast<double>(types.size()) / n, 0.35) << i;
    for (const auto& s : sentences_of(text)) EXPECT_EQ(pool_sentences.count(s), 0u);
  }
}

TEST(Babel, Preconditions) {
  EXPECT_THROW(babel_text({"a", "b"}, pack().babel_lexicon, 500, 1), PerturbError);
  EXPECT_THROW(babel_text({"a", "b", "c", "d"}, pack().babel_lexicon, 500, 1), PerturbError);
  EXPECT_THROW(babel_text({"a", "b", "c"}, pack().babel_lexicon, 20, 1), PerturbError);
  EXPECT_THROW(babel_text({"a", "b", "c"}, BabelLexicon{}, 500, 1), PerturbError);
}

// --- dispatch and grid laws ----------------------------------------------------------------------

TEST(Apply, DispatchIdentity) {
  const auto& r = bundled_sample_corpus().responses[5];
  const auto s = spec_for(TestKind::ShuffleSent);
  EXPECT_EQ(apply(s, r, bundled_sample_corpus().prompt_of(r), pack()).text, shuffle_sent(r, s).text);
}

TEST(Apply, FifteenVariantsPerEligibleResponse) {
  const Corpus& c = bundled_sample_corpus();
  std::size_t full = 0;
  for (const auto& r : c.responses) {
    std::size_t ok = 0;
    for (auto t : kAllTests) {
      try {
        apply(spec_for(t, 10, Position::Mid), r, c.prompt_of(r), pack());
        ++ok;
      } catch (const PerturbError&) {
      }
    }
    const bool rc = c.prompt_of(r).kind == PromptKind::ReadingComprehension;
    EXPECT_EQ(ok, rc ? 15u : 14u) << r.id;
    full += ok == 15 ? 1 : 0;
  }
  EXPECT_EQ(full, c.responses_for("sample-rc").size());
}

// Every law the perturb module promises, checked on one variant.
std::vector<std::string> check_variant(const Response& r, const AdversarialResponse& adv) {
  std::vector<std::string> bad;
  const auto& s = adv.spec;
  const std::size_t len = recount(r.text);
  const std::size_t len2 = recount(adv.text);
  const std::size_t budget = compute_budget(len, s.c1);
  if (reconstruct_original(adv) != r.text) bad.push_back("reconstruction");
  if (!provenance_covers_text(adv)) bad.push_back("provenance coverage");
  for (const auto& sp : adv.inserted_spans)
    if (sp.offset + sp.length > adv.text.size()) bad.push_back("span out of bounds");
  if (is_add(s.test)) {
    const std::size_t longest = std::max(max_sentence_words(r.text), max_inserted_words(adv));
    if (!s.bounded) {
      if (len2 < len + budget || len2 > len + budget + max_inserted_words(adv)) bad.push_back("unbounded add length");
    } else if ((len2 > len ? len2 - len : len - len2) > longest) {
      bad.push_back("bounded add length");
    }
  }
  if (is_delete(s.test)) {
    const auto before = sentences_of(r.text);
    const auto after = sentences_of(adv.text);
    if (after.empty()) bad.push_back("delete emptied response");
    const std::size_t removed = len - len2;
    const bool exhausted = after.size() == 1;
    if (removed > budget + max_sentence_words(r.text) || (removed < budget && !exhausted)) bad.push_back("delete length");
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < before.size(); ++i)
      if (!std::binary_search(adv.deleted_sentence_indices.begin(), adv.deleted_sentence_indices.end(), i))
        kept.push_back(before[i]);
    if (kept != after) bad.push_back("delete subsequence");
  }
  if (s.test == TestKind::ShuffleSent) {
    auto a = sentences_of(r.text);
    auto b = sentences_of(adv.text);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) bad.push_back("shuffle multiset");
  }
  if (s.test == TestKind::ModLexicon) {
    const auto a = sentences_of(r.text);
    const auto b = sentences_of(adv.text);
    if (a.size() != b.size()) {
      bad.push_back("lexicon sentence count");
    } else {
      for (std::size_t i = 0; i < a.size(); ++i)
        if (recount(a[i]) != recount(b[i])) bad.push_back("lexicon word count");
    }
  }
  return bad;
}

TEST(GridLaws, FullGridOverBundledCorpus) {
  const Corpus& c = bundled_sample_corpus();
  std::size_t checked = 0;
  std::map<std::string, std::size_t> violations;
  for (const auto& r : c.responses) {
    for (auto t : kAllTests) {
      for (int c1 : kC1Values) {
        for (auto c2 : {Position::Start, Position::Mid, Position::End}) {
          for (bool bounded : {false, true}) {
            AdversarialResponse adv;
            try {
              adv = apply(spec_for(t, c1, c2, bounded, 20240101), r, c.prompt_of(r), pack());
            } catch (const PerturbError&) {
              continue;
            }
            ++checked;
            for (const auto& v : check_variant(r, adv)) ++violations[std::string(to_string(t)) + ": " + v];
          }
        }
      }
    }
  }
  EXPECT_EQ(checked, 50u * 15 * 5 * 3 * 2 - 25u * 5 * 3 * 2);
  for (const auto& [what, n] : violations) ADD_FAILURE() << what << " x" << n;
  EXPECT_TRUE(violations.empty());
}

TEST(GridLaws, Determinism) {
  const Corpus& c = bundled_sample_corpus();
  for (auto t : kAllTests) {
    for (const auto& r : c.responses) {
      const auto s = spec_for(t, 15, Position::Mid, true, 3);
      std::string a, b;
      try {
        a = apply(s, r, c.prompt_of(r), pack()).text;
        b = apply(s, r, c.prompt_of(r), pack()).text;
      } catch (const PerturbError&) {
        continue;
      }
      EXPECT_EQ(a, b);
    }
  }
}

}  // namespace
}  // namespace aesrt
