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

#include <string>
#include <vector>

#include "aesrt/corpus.hpp"
#include "aesrt/keyphrase.hpp"
#include "aesrt/perturb/add.hpp"
#include "aesrt/perturb/babel.hpp"
#include "aesrt/perturb/delete.hpp"
#include "aesrt/perturb/grammar.hpp"
#include "aesrt/perturb/lexicon.hpp"
#include "aesrt/perturb/shuffle.hpp"
#include "aesrt/perturb/spec.hpp"
#include "aesrt/resources.hpp"

namespace aesrt {

/// Three single-word keyphrases of the prompt, for BabelGen runs that were
/// not given keywords.
inline std::vector<std::string> default_babel_keywords(const Prompt& prompt) {
  std::vector<std::string> out;
  for (const auto& kp : extract_keyphrases(prompt.question_text, 50)) {
    if (kp.find(' ') != std::string::npos) continue;
    out.push_back(kp);
    if (out.size() == 3) break;
  }
  if (out.size() < 3) throw PerturbError("prompt " + prompt.id + " yields fewer than 3 babel keywords");
  return out;
}

/// Routes a spec to its operation.
inline AdversarialResponse apply(const PerturbSpec& spec, const Response& response, const Prompt& prompt,
                                 const ResourcePack& pack) {
  switch (category(spec.test)) {
    case TestCategory::Add: return add_content(response, prompt, pack, spec);
    case TestCategory::Delete: return delete_content(response, spec);
    case TestCategory::Modify:
      if (spec.test == TestKind::ModGrammar) {
        if (spec.grammar_mode) return mod_grammar(response, spec, pack.abbreviations);
        PerturbSpec s = spec;
        s.grammar_mode = GrammarMode::ErrorPipeline;
        auto adv = mod_grammar(response, s, pack.abbreviations);
        adv.spec = spec;
        return adv;
      }
      if (spec.test == TestKind::ModLexicon) return mod_lexicon(response, pack.synonyms, spec);
      return shuffle_sent(response, spec);
    case TestCategory::Generate: {
      PerturbSpec s = spec;
      if (s.babel_keywords.empty()) s.babel_keywords = default_babel_keywords(prompt);
      validate_spec(s);
      auto adv = babel_generate(s.babel_keywords, pack.babel_lexicon, s.babel_word_target,
                                derive_seed(spec.seed, response.id, to_string(spec.test)), response.id,
                                response.text);
      adv.spec = spec;
      return adv;
    }
  }
  throw PerturbError("unknown test");
}

}  // namespace aesrt
