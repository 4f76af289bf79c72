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

// ModGrammar: word-order scrambling and a three-step error pipeline.
//
// The chunker is shallow. The subject is everything before the first
// closed-list verb; the verb group is that verb plus following auxiliaries,
// "not" and -ing/-ed forms; the complement runs up to the next preposition
// or conjunction.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aesrt/corpus.hpp"
#include "aesrt/perturb/spec.hpp"

namespace aesrt {

namespace detail {

inline constexpr std::string_view kLinkWords[] = {
    "to",     "for",   "of",      "in",      "on",    "at",     "by",       "with",  "from",  "about",
    "into",   "over",  "under",   "after",   "before", "during", "through", "without", "between", "because",
    "and",    "but",   "or",      "so",      "while", "when",   "although", "since", "until", "than",
    "as",     "that",  "if",      "across",  "behind", "near",  "toward",   "towards", "around", "upon"};

inline bool is_link_word(std::string_view lower) noexcept {
  return std::find(std::begin(kLinkWords), std::end(kLinkWords), lower) != std::end(kLinkWords);
}

inline std::string lower_core(std::string_view token) { return to_lower(token_core(token).text); }

/// Replaces the core of `token` with `word`, keeping surrounding punctuation.
inline std::string with_core(std::string_view token, std::string_view word) {
  const auto c = token_core(token);
  std::string out(token.substr(0, c.begin));
  out += word;
  out += token.substr(c.end);
  return out;
}

/// Copies the capitalization pattern of `model` onto `word`.
inline std::string match_case(std::string_view model, std::string_view word) {
  std::string out(word);
  if (model.empty() || out.empty()) return out;
  bool all_upper = model.size() > 1;
  for (char c : model)
    if (is_alpha(c) && !is_upper(c)) all_upper = false;
  if (all_upper) {
    for (char& c : out) c = to_upper(c);
  } else if (is_upper(model.front())) {
    out[0] = to_upper(out[0]);
  } else {
    out[0] = to_lower(out[0]);
  }
  return out;
}

inline bool ends_with(std::string_view s, std::string_view suffix) noexcept {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline bool is_participle(std::string_view lower) noexcept {
  return lower.size() >= 5 && (ends_with(lower, "ing") || ends_with(lower, "ed"));
}

/// Splits trailing sentence punctuation (and closing marks) off the last token.
inline std::string split_tail(std::vector<std::string>& toks) {
  if (toks.empty()) return {};
  std::string& last = toks.back();
  std::size_t e = last.size();
  while (e > 0 && (is_terminal_punct(last[e - 1]) || is_closing_mark(last[e - 1]))) --e;
  std::string tail = last.substr(e);
  last.resize(e);
  if (last.empty()) toks.pop_back();
  return tail;
}

inline std::string join(const std::vector<std::string>& toks) {
  std::string out;
  for (const auto& t : toks) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

inline std::string ing_stem(std::string_view lower) {
  static const std::map<std::string, std::string, std::less<>> kIrregular = {
      {"being", "be"},       {"having", "have"},   {"making", "make"},   {"taking", "take"},
      {"giving", "give"},    {"coming", "come"},   {"living", "live"},   {"writing", "write"},
      {"using", "use"},      {"leaving", "leave"}, {"becoming", "become"}, {"moving", "move"},
      {"loving", "love"},    {"hoping", "hope"},   {"smiling", "smile"}, {"sharing", "share"},
      {"caring", "care"},    {"driving", "drive"}, {"dancing", "dance"}, {"closing", "close"}};
  if (auto it = kIrregular.find(lower); it != kIrregular.end()) return it->second;
  std::string stem(lower.substr(0, lower.size() - 3));
  const std::size_t n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z')
    stem.pop_back();
  return stem;
}

}  // namespace detail

/// Subject + Complement + Verb-group + Rest. Returns nullopt when the
/// sentence has no usable subject, verb or complement.
inline std::optional<std::string> svo_reorder(std::string_view sentence) {
  std::vector<std::string> toks;
  for (auto t : tokens(sentence)) toks.emplace_back(t);
  const std::string tail = detail::split_tail(toks);
  const std::size_t n = toks.size();

  std::size_t v = 0;
  while (v < n && !is_closed_verb(detail::lower_core(toks[v]))) ++v;
  if (v == 0 || v >= n) return std::nullopt;

  std::size_t g = v + 1;
  while (g < n) {
    const std::string w = detail::lower_core(toks[g]);
    if (!(is_closed_verb(w) || w == "not" || detail::is_participle(w))) break;
    if (token_core(toks[g - 1]).end < toks[g - 1].size()) break;  // punctuation ends the group
    ++g;
  }
  if (g >= n) return std::nullopt;

  std::size_t e = g + 1;
  while (e < n) {
    if (detail::is_link_word(detail::lower_core(toks[e]))) break;
    const char last = toks[e - 1].back();
    if (last == ',' || last == ';' || last == ':') break;
    ++e;
  }

  std::vector<std::string> out(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(v));
  out.insert(out.end(), toks.begin() + static_cast<std::ptrdiff_t>(g), toks.begin() + static_cast<std::ptrdiff_t>(e));
  out.insert(out.end(), toks.begin() + static_cast<std::ptrdiff_t>(v), toks.begin() + static_cast<std::ptrdiff_t>(g));
  out.insert(out.end(), toks.begin() + static_cast<std::ptrdiff_t>(e), toks.end());
  std::string result = detail::join(out) + tail;
  if (result == detail::join(toks) + tail) return std::nullopt;
  return result;
}

/// Step 1: a -> the, the -> an, an -> a.
inline std::string swap_articles(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto t : tokens(sentence)) {
    const auto core = token_core(t);
    const std::string w = to_lower(core.text);
    std::string repl;
    if (w == "a") repl = "the";
    else if (w == "the") repl = "an";
    else if (w == "an") repl = "a";
    out.push_back(repl.empty() ? std::string(t) : detail::with_core(t, detail::match_case(core.text, repl)));
  }
  return detail::join(out);
}

/// Step 2: breaks subject-verb agreement on the first verb of the sentence.
inline std::string break_agreement(std::string_view sentence) {
  static const std::map<std::string, std::string, std::less<>> kSwap = {
      {"is", "are"},   {"are", "is"},  {"am", "is"},    {"was", "were"}, {"were", "was"},
      {"has", "have"}, {"have", "has"}, {"does", "do"}, {"do", "does"},  {"goes", "go"},
      {"go", "goes"}};
  std::vector<std::string> toks;
  for (auto t : tokens(sentence)) toks.emplace_back(t);
  std::size_t v = 0;
  while (v < toks.size() && !is_closed_verb(detail::lower_core(toks[v]))) ++v;
  if (v == toks.size()) return detail::join(toks);

  const auto core = token_core(toks[v]);
  const std::string w = to_lower(core.text);
  const bool be = w == "is" || w == "are" || w == "am" || w == "was" || w == "were";
  if (be && v + 1 < toks.size() && core.end == toks[v].size()) {
    const std::string next = detail::lower_core(toks[v + 1]);
    if (next.size() > 4 && detail::ends_with(next, "ing")) {
      const auto ncore = token_core(toks[v + 1]);
      const std::string model = v == 0 ? std::string(core.text) : std::string(ncore.text);
      toks[v + 1] = detail::with_core(toks[v + 1], detail::match_case(model, detail::ing_stem(next)));
      toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(v));
      return detail::join(toks);
    }
  }
  std::string repl;
  if (auto it = kSwap.find(w); it != kSwap.end()) {
    repl = it->second;
  } else if (w.size() > 2 && w.back() == 's') {
    repl = w.substr(0, w.size() - 1);
  } else {
    repl = w + "s";
  }
  toks[v] = detail::with_core(toks[v], detail::match_case(core.text, repl));
  return detail::join(toks);
}

/// Step 3: lowercase opening letter, informal abbreviations, no final
/// punctuation.
inline std::string conventional_errors(std::string_view sentence,
                                       const std::map<std::string, std::string>& abbreviations) {
  std::vector<std::string> toks;
  for (auto t : tokens(sentence)) {
    const auto core = token_core(t);
    if (auto it = abbreviations.find(to_lower(core.text)); it != abbreviations.end() && !core.text.empty())
      toks.push_back(detail::with_core(t, it->second));
    else
      toks.emplace_back(t);
  }
  detail::split_tail(toks);
  for (auto& t : toks) {
    bool done = false;
    for (char& c : t) {
      if (is_alpha(c)) {
        c = to_lower(c);
        done = true;
        break;
      }
    }
    if (done || !t.empty()) break;
  }
  return detail::join(toks);
}

inline std::string error_pipeline(std::string_view sentence,
                                  const std::map<std::string, std::string>& abbreviations) {
  return conventional_errors(break_agreement(swap_articles(sentence)), abbreviations);
}

/// Rewrites sentences from the opening of the c2 third onwards (wrapping to
/// the start if needed) until the rewritten sentences cover the word budget.
inline AdversarialResponse mod_grammar(const Response& response, const PerturbSpec& spec,
                                       const std::map<std::string, std::string>& abbreviations) {
  if (spec.test != TestKind::ModGrammar) throw PerturbError("mod_grammar needs test ModGrammar");
  if (!spec.grammar_mode) throw PerturbError("ModGrammar needs a grammar mode");
  validate_spec(spec);
  const auto spans = split_sentences(response.text);
  AdversarialResponse adv;
  adv.original_id = response.id;
  adv.spec = spec;

  const std::size_t n = spans.size();
  const std::size_t budget = compute_budget(word_count(response.text), spec.c1);
  std::vector<std::optional<std::string>> rewrite(n);
  if (n > 0) {
    const std::size_t start = std::min(thirds(n).at(spec.c2).begin, n - 1);
    std::size_t covered = 0;
    for (std::size_t k = 0; k < n && covered < budget; ++k) {
      const std::size_t i = (start + k) % n;
      std::optional<std::string> out;
      if (*spec.grammar_mode == GrammarMode::SvoReorder) {
        out = svo_reorder(spans[i].text);
      } else {
        std::string s = error_pipeline(spans[i].text, abbreviations);
        if (s != spans[i].text && !trim(s).empty()) out = std::move(s);
      }
      if (out) {
        covered += spans[i].words();
        ++adv.replacements;
        rewrite[i] = std::move(out);
      } else {
        ++adv.unchanged_sentences;
      }
    }
  }

  std::vector<PlanUnit> plan;
  for (std::size_t i = 0; i < n; ++i) {
    if (rewrite[i]) plan.push_back({std::nullopt, *rewrite[i], "grammar", i});
    else plan.push_back({i, {}, {}, std::nullopt});
  }
  if (adv.unchanged_sentences > 0)
    adv.diagnostics.push_back(std::to_string(adv.unchanged_sentences) + " sentence(s) could not be parsed");
  assemble(response.text, spans, plan, adv);
  return adv;
}

}  // namespace aesrt
