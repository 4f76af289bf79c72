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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "aesrt/corpus.hpp"
#include "aesrt/perturb/grammar.hpp"
#include "aesrt/perturb/spec.hpp"
#include "aesrt/resources.hpp"

namespace aesrt {

using SynonymMap = std::map<std::string, std::vector<std::string>>;

/// One synonym swap per sentence: a uniformly chosen non-stopword that has a
/// single-word synonym is replaced by a uniformly chosen such synonym, in the
/// original's casing.
inline AdversarialResponse mod_lexicon(const Response& response, const SynonymMap& synonyms,
                                       const PerturbSpec& spec) {
  if (spec.test != TestKind::ModLexicon) throw PerturbError("mod_lexicon needs test ModLexicon");
  if (synonyms.empty()) throw PerturbError("synonym lexicon is empty");
  validate_spec(spec);
  const auto spans = split_sentences(response.text);
  Rng rng(derive_seed(spec.seed, response.id, to_string(spec.test)));

  AdversarialResponse adv;
  adv.original_id = response.id;
  adv.spec = spec;
  TextBuilder b(response.text);
  std::size_t at = 0;  // next unconsumed byte of the original

  for (const auto& s : spans) {
    struct Candidate {
      std::size_t begin;  // absolute offsets of the token core
      std::size_t end;
      std::vector<std::string_view> options;
    };
    std::vector<Candidate> cands;
    std::string_view sv(s.text);
    for (auto tok : tokens(sv)) {
      const auto core = token_core(tok);
      if (core.text.empty()) continue;
      const std::string w = to_lower(core.text);
      if (is_stopword(w)) continue;
      auto it = synonyms.find(w);
      if (it == synonyms.end()) continue;
      std::vector<std::string_view> opts;
      for (const auto& syn : it->second) {
        bool single = !syn.empty();
        for (char c : syn) single = single && !is_space(c);
        if (single && to_lower(syn) != w) opts.push_back(syn);
      }
      if (opts.empty()) continue;
      const std::size_t off = s.char_start + static_cast<std::size_t>(tok.data() - sv.data()) + core.begin;
      cands.push_back({off, off + core.text.size(), std::move(opts)});
    }
    if (cands.empty()) {
      ++adv.unchanged_sentences;
      continue;
    }
    const auto& c = cands[rng.index(cands.size())];
    const std::string_view syn = c.options[rng.index(c.options.size())];
    const std::string_view model = std::string_view(response.text).substr(c.begin, c.end - c.begin);
    b.copy(at, c.begin);
    b.insert(detail::match_case(model, syn), "lexicon");
    b.remove(c.begin, c.end);
    at = c.end;
    ++adv.replacements;
  }
  b.copy(at, response.text.size());
  b.finish(adv);
  if (adv.replacements == 0) adv.diagnostics.push_back("0 replacements");
  return adv;
}

}  // namespace aesrt
