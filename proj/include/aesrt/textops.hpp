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

// Sentence segmentation, tokenization and length accounting.
//
// Every perturbation measures length with word_count(), so this header
// defines what "Len(r)" means for the whole toolkit: the number of
// whitespace-delimited tokens.

#include <algorithm>
#include <array>
#include <cstddef>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aesrt {

// --- character helpers --------------------------------------------------

constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
constexpr bool is_upper(char c) noexcept { return c >= 'A' && c <= 'Z'; }
constexpr bool is_lower(char c) noexcept { return c >= 'a' && c <= 'z'; }
constexpr bool is_alpha(char c) noexcept { return is_upper(c) || is_lower(c); }
constexpr bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
constexpr char to_lower(char c) noexcept { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }
constexpr char to_upper(char c) noexcept { return is_lower(c) ? static_cast<char>(c - 'a' + 'A') : c; }
constexpr bool is_terminal_punct(char c) noexcept { return c == '.' || c == '!' || c == '?'; }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_lower(c);
  return out;
}

inline std::string_view trim(std::string_view s) noexcept {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

/// Whitespace-delimited tokens, as views into `text`.
inline std::vector<std::string_view> tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t b = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > b) out.push_back(text.substr(b, i - b));
  }
  return out;
}

/// Len(r): number of whitespace-delimited tokens.
inline std::size_t word_count(std::string_view text) noexcept {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

/// Core of a token with surrounding punctuation removed ("park," -> "park",
/// "\"Hello!\"" -> "Hello"). Offsets are into `token`.
struct TokenCore {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string_view text;
};

inline TokenCore token_core(std::string_view token) noexcept {
  std::size_t b = 0;
  std::size_t e = token.size();
  auto is_word_char = [](char c) { return is_alpha(c) || is_digit(c) || static_cast<unsigned char>(c) >= 0x80; };
  while (b < e && !is_word_char(token[b])) ++b;
  while (e > b && !is_word_char(token[e - 1])) --e;
  return {b, e, token.substr(b, e - b)};
}

// --- stopwords -------------------------------------------------------------

namespace detail {
inline constexpr std::string_view kStopwords[] = {
    "a",       "about",  "above",  "after",   "again",   "against", "all",     "also",    "am",
    "an",      "and",    "any",    "are",     "as",      "at",      "be",      "because", "been",
    "before",  "being",  "below",  "between", "both",    "but",     "by",      "can",     "could",
    "did",     "do",     "does",   "doing",   "down",    "during",  "each",    "even",    "every",
    "few",     "for",    "from",   "further", "had",     "has",     "have",    "having",  "he",
    "her",     "here",   "hers",   "herself", "him",     "himself", "his",     "how",     "i",
    "if",      "in",     "into",   "is",      "it",      "its",     "itself",  "just",    "let",
    "many",    "may",    "me",     "might",   "more",    "most",    "much",    "must",    "my",
    "myself",  "no",     "nor",    "not",     "now",     "of",      "off",     "on",      "once",
    "one",     "only",   "or",     "other",   "our",     "ours",    "ourselves", "out",   "over",
    "own",     "same",   "shall",  "she",     "should",  "so",      "some",    "such",    "than",
    "that",    "the",    "their",  "theirs",  "them",    "themselves", "then", "there",   "these",
    "they",    "this",   "those",  "through", "to",      "too",     "under",   "until",   "up",
    "upon",    "us",     "very",   "was",     "we",      "well",    "were",    "what",    "when",
    "where",   "whether", "which", "while",   "who",     "whom",    "whose",   "why",     "will",
    "with",    "within", "without", "would",  "yet",     "you",     "your",    "yours",   "yourself",
    "yourselves", "s",   "t",      "don",     "however", "thus",    "therefore"};
}  // namespace detail

/// True for closed-class function words. Expects a lowercase word.
inline bool is_stopword(std::string_view lower_word) noexcept {
  return std::find(std::begin(detail::kStopwords), std::end(detail::kStopwords), lower_word) !=
         std::end(detail::kStopwords);
}

namespace detail {
inline constexpr std::string_view kClosedVerbs[] = {
    "is",       "are",     "am",      "was",      "were",     "be",       "been",     "being",
    "has",      "have",    "had",     "do",       "does",     "did",      "will",     "would",
    "can",      "could",   "shall",   "should",   "may",      "might",    "must",     "go",
    "goes",     "went",    "going",   "gone",     "make",     "makes",    "made",     "making",
    "take",     "takes",   "took",    "taking",   "get",      "gets",     "got",      "getting",
    "give",     "gives",   "gave",    "giving",   "see",      "sees",     "saw",      "seeing",
    "say",      "says",    "said",    "come",     "comes",    "came",     "coming",   "know",
    "knows",    "knew",    "think",   "thinks",   "thought",  "want",     "wants",    "wanted",
    "use",      "uses",    "used",    "find",     "finds",    "found",    "tell",     "tells",
    "told",     "ask",     "asks",    "asked",    "need",     "needs",    "needed",   "feel",
    "feels",    "felt",    "become",  "becomes",  "became",   "leave",    "leaves",   "left",
    "keep",     "keeps",   "kept",    "help",     "helps",    "helped",   "show",     "shows",
    "showed",   "try",     "tries",   "tried",    "like",     "likes",    "liked",    "live",
    "lives",    "lived",   "believe", "believes", "believed", "learn",    "learns",   "learned",
    "bring",    "brings",  "brought", "write",    "writes",   "wrote",    "read",     "reads",
    "sat",      "stood",   "held",    "love",     "loves",    "loved",    "walked",   "played",
    "ran",      "began",   "spend",   "spent"};
}  // namespace detail

/// Closed list of common verbs and auxiliaries used by the shallow chunker.
/// Expects a lowercase word.
inline bool is_closed_verb(std::string_view lower_word) noexcept {
  return std::find(std::begin(detail::kClosedVerbs), std::end(detail::kClosedVerbs), lower_word) !=
         std::end(detail::kClosedVerbs);
}

// --- sentences -------------------------------------------------------------

struct SentenceSpan {
  std::size_t index = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive
  std::string text;

  std::size_t words() const noexcept { return word_count(text); }
  bool operator==(const SentenceSpan&) const = default;
};

namespace detail {

inline constexpr std::array<std::string_view, 36> kAbbreviations = {
    "mr.",   "mrs.", "ms.",   "dr.",   "prof.", "sr.",   "jr.",   "st.",   "vs.",
    "e.g.",  "i.e.", "u.s.",  "u.k.",  "a.m.",  "p.m.",  "no.",   "inc.",  "ltd.",
    "co.",   "mt.",  "ft.",   "gen.",  "gov.",  "sen.",  "rep.",  "rev.",  "jan.",
    "feb.",  "aug.", "sept.", "oct.",  "nov.",  "dec.",  "approx.", "dept.", "fig."};

inline bool is_abbreviation(std::string_view token) {
  // single capital initial such as "J."
  if (token.size() == 2 && is_upper(token[0]) && token[1] == '.') return true;
  const std::string lower = to_lower(token);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

inline bool is_closing_mark(char c) noexcept {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

inline bool is_opening_mark(char c) noexcept { return c == '"' || c == '\'' || c == '(' || c == '['; }

// Does a new sentence begin at text[k]?
inline bool starts_sentence(std::string_view text, std::size_t k) noexcept {
  if (k >= text.size()) return false;
  if (is_upper(text[k])) return true;
  return is_opening_mark(text[k]) && k + 1 < text.size() && is_upper(text[k + 1]);
}

}  // namespace detail

/// Rule-based segmentation. A sentence ends at a run of terminal punctuation
/// (plus closing quotes/brackets) that is followed by whitespace and a capital
/// letter, or by the end of the text. Known abbreviations never end a sentence.
/// Spans cover non-whitespace content only; the gaps between them are the
/// original inter-sentence whitespace.
inline std::vector<SentenceSpan> split_sentences(std::string_view text) {
  std::vector<SentenceSpan> spans;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n && is_space(text[i])) ++i;
  std::size_t start = i;

  auto emit = [&](std::size_t b, std::size_t e) {
    while (e > b && is_space(text[e - 1])) --e;
    if (e > b) spans.push_back({spans.size(), b, e, std::string(text.substr(b, e - b))});
  };

  while (i < n) {
    if (!is_terminal_punct(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && (is_terminal_punct(text[j]) || detail::is_closing_mark(text[j]))) ++j;

    std::size_t k = j;
    while (k < n && is_space(text[k])) ++k;
    const bool at_end = (k == n);
    const bool boundary = at_end || (k > j && detail::starts_sentence(text, k));

    if (boundary) {
      std::size_t tok_begin = i;
      while (tok_begin > start && !is_space(text[tok_begin - 1])) --tok_begin;
      const std::string_view token = text.substr(tok_begin, i + 1 - tok_begin);
      if (!detail::is_abbreviation(token) || at_end) {
        emit(start, j);
        start = k;
        i = k;
        continue;
      }
    }
    i = j;
  }
  if (start < n) emit(start, n);
  return spans;
}

// --- thirds ------------------------------------------------------------------

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
  bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
  bool operator==(const IndexRange&) const = default;
};

enum class Position { Start, Mid, End };

struct ResponseThirds {
  IndexRange start;
  IndexRange mid;
  IndexRange end;

  const IndexRange& at(Position p) const noexcept {
    switch (p) {
      case Position::Start: return start;
      case Position::Mid: return mid;
      case Position::End: break;
    }
    return end;
  }
  bool operator==(const ResponseThirds&) const = default;
};

/// First ceil(n/3) sentences are the start, the next ceil(rest/2) the middle,
/// the remainder the end.
constexpr ResponseThirds thirds(std::size_t n) noexcept {
  const std::size_t a = (n + 2) / 3;
  const std::size_t rest = n - a;
  const std::size_t b = (rest + 1) / 2;
  return {{0, a}, {a, a + b}, {a + b, n}};
}

inline ResponseThirds thirds(std::span<const SentenceSpan> spans) noexcept { return thirds(spans.size()); }

// --- budgets -----------------------------------------------------------------

/// Word budget for a c1 percent change: round(base * c1 / 100) with halves
/// rounded up, and at least one word for any non-empty response.
inline std::size_t compute_budget(std::size_t base_words, int c1_percent) {
  if (c1_percent < 0 || c1_percent > 100) throw std::invalid_argument("c1 must be a percentage in [0, 100]");
  if (base_words == 0) return 0;
  const std::size_t scaled = base_words * static_cast<std::size_t>(c1_percent);
  const std::size_t budget = (2 * scaled + 100) / 200;
  return std::max<std::size_t>(budget, 1);
}

}  // namespace aesrt
