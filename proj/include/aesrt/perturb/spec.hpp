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

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aesrt/error.hpp"
#include "aesrt/rng.hpp"
#include "aesrt/textops.hpp"

namespace aesrt {

enum class TestKind {
  AddWikiRelated,
  AddWikiUnrelated,
  RepeatSent,
  AddSong,
  AddSpeech,
  AddRC,
  AddTruth,
  AddLies,
  DelStart,
  DelEnd,
  DelRand,
  ModGrammar,
  ModLexicon,
  ShuffleSent,
  BabelGen,
};

inline constexpr std::array<TestKind, 15> kAllTests = {
    TestKind::AddWikiRelated, TestKind::AddWikiUnrelated, TestKind::RepeatSent, TestKind::AddSong,
    TestKind::AddSpeech,      TestKind::AddRC,            TestKind::AddTruth,   TestKind::AddLies,
    TestKind::DelStart,       TestKind::DelEnd,           TestKind::DelRand,    TestKind::ModGrammar,
    TestKind::ModLexicon,     TestKind::ShuffleSent,      TestKind::BabelGen};

enum class TestCategory { Add, Delete, Modify, Generate };

inline constexpr std::string_view to_string(TestKind t) noexcept {
  switch (t) {
    case TestKind::AddWikiRelated: return "AddWikiRelated";
    case TestKind::AddWikiUnrelated: return "AddWikiUnrelated";
    case TestKind::RepeatSent: return "RepeatSent";
    case TestKind::AddSong: return "AddSong";
    case TestKind::AddSpeech: return "AddSpeech";
    case TestKind::AddRC: return "AddRC";
    case TestKind::AddTruth: return "AddTruth";
    case TestKind::AddLies: return "AddLies";
    case TestKind::DelStart: return "DelStart";
    case TestKind::DelEnd: return "DelEnd";
    case TestKind::DelRand: return "DelRand";
    case TestKind::ModGrammar: return "ModGrammar";
    case TestKind::ModLexicon: return "ModLexicon";
    case TestKind::ShuffleSent: return "ShuffleSent";
    case TestKind::BabelGen: return "BabelGen";
  }
  return "?";
}

inline std::optional<TestKind> parse_test_kind(std::string_view s) noexcept {
  for (TestKind t : kAllTests)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

inline constexpr TestCategory category(TestKind t) noexcept {
  switch (t) {
    case TestKind::DelStart:
    case TestKind::DelEnd:
    case TestKind::DelRand: return TestCategory::Delete;
    case TestKind::ModGrammar:
    case TestKind::ModLexicon:
    case TestKind::ShuffleSent: return TestCategory::Modify;
    case TestKind::BabelGen: return TestCategory::Generate;
    default: return TestCategory::Add;
  }
}

inline constexpr bool is_add(TestKind t) noexcept { return category(t) == TestCategory::Add; }
inline constexpr bool is_delete(TestKind t) noexcept { return category(t) == TestCategory::Delete; }

inline constexpr std::string_view to_string(Position p) noexcept {
  switch (p) {
    case Position::Start: return "Start";
    case Position::Mid: return "Mid";
    case Position::End: return "End";
  }
  return "?";
}

inline std::optional<Position> parse_position(std::string_view s) noexcept {
  const std::string l = to_lower(s);
  if (l == "start") return Position::Start;
  if (l == "mid") return Position::Mid;
  if (l == "end") return Position::End;
  return std::nullopt;
}

enum class GrammarMode { SvoReorder, ErrorPipeline };

inline constexpr std::string_view to_string(GrammarMode m) noexcept {
  return m == GrammarMode::SvoReorder ? "SvoReorder" : "ErrorPipeline";
}

inline std::optional<GrammarMode> parse_grammar_mode(std::string_view s) noexcept {
  if (s == "SvoReorder") return GrammarMode::SvoReorder;
  if (s == "ErrorPipeline") return GrammarMode::ErrorPipeline;
  return std::nullopt;
}

/// c1 values of the default sweep. 10..25 are also accepted on their own.
inline constexpr std::array<int, 5> kC1Values = {5, 10, 15, 20, 25};

inline constexpr bool valid_c1(int c1) noexcept {
  return std::find(kC1Values.begin(), kC1Values.end(), c1) != kC1Values.end();
}

struct PerturbSpec {
  TestKind test = TestKind::AddWikiRelated;
  int c1 = 10;
  Position c2 = Position::End;
  bool bounded = false;
  std::uint64_t seed = 0;
  std::optional<GrammarMode> grammar_mode;  // ModGrammar only
  std::vector<std::string> babel_keywords;  // BabelGen only
  int babel_word_target = 500;

  bool operator==(const PerturbSpec&) const = default;

  /// Stable digest over every field; identifies a variant in caches and ids.
  std::uint64_t digest() const {
    Digest d;
    d.add(to_string(test)).add(c1).add(to_string(c2)).add(bounded).add(seed);
    d.add(grammar_mode ? to_string(*grammar_mode) : std::string_view("-"));
    d.add(static_cast<std::uint64_t>(babel_keywords.size()));
    for (const auto& k : babel_keywords) d.add(k);
    d.add(babel_word_target);
    return d.value();
  }
};

/// Throws PerturbError when the spec violates its own invariants.
inline void validate_spec(const PerturbSpec& spec) {
  if (!valid_c1(spec.c1)) throw PerturbError("c1 must be one of 5, 10, 15, 20, 25");
  if (spec.test == TestKind::BabelGen) {
    if (spec.babel_keywords.size() != 3) throw PerturbError("BabelGen needs exactly 3 keywords");
    for (const auto& k : spec.babel_keywords)
      if (trim(k).empty()) throw PerturbError("BabelGen keywords must be non-empty");
    if (spec.babel_word_target < 50) throw PerturbError("babel word target must be at least 50");
  }
}

// --- provenance ----------------------------------------------------------------

/// A run of r' that did not come from r.
struct InsertedSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string tag;  // source pool, "separator", "grammar", ...

  bool operator==(const InsertedSpan&) const = default;
};

/// A run of r' copied verbatim from r[source_offset, source_offset + length).
struct CopiedSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::size_t source_offset = 0;

  bool operator==(const CopiedSpan&) const = default;
};

/// Text of r that does not appear in r'.
struct RemovedSpan {
  std::size_t source_offset = 0;
  std::string text;

  bool operator==(const RemovedSpan&) const = default;
};

struct AdversarialResponse {
  std::string original_id;
  PerturbSpec spec;
  std::string text;
  std::vector<InsertedSpan> inserted_spans;
  std::vector<CopiedSpan> copied_spans;
  std::vector<RemovedSpan> removed_spans;
  std::vector<std::size_t> deleted_sentence_indices;
  std::size_t unchanged_sentences = 0;  // Modify tests: sentences left as-is
  std::size_t replacements = 0;         // ModLexicon / ModGrammar edits made
  std::vector<std::string> diagnostics;

  bool operator==(const AdversarialResponse&) const = default;
};

/// Rebuilds r from r' and its provenance. Copied and removed pieces are put
/// back in source order.
inline std::string reconstruct_original(const AdversarialResponse& adv) {
  struct Piece {
    std::size_t at;
    std::string_view text;
  };
  std::vector<Piece> pieces;
  for (const auto& c : adv.copied_spans) pieces.push_back({c.source_offset, std::string_view(adv.text).substr(c.offset, c.length)});
  for (const auto& r : adv.removed_spans) pieces.push_back({r.source_offset, r.text});
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) { return a.at < b.at; });
  std::string out;
  for (const auto& p : pieces) out += p.text;
  return out;
}

/// True when inserted and copied spans tile r' exactly, in bounds and
/// without overlap.
inline bool provenance_covers_text(const AdversarialResponse& adv) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (const auto& s : adv.inserted_spans) runs.emplace_back(s.offset, s.length);
  for (const auto& s : adv.copied_spans) runs.emplace_back(s.offset, s.length);
  std::sort(runs.begin(), runs.end());
  std::size_t at = 0;
  for (const auto& [off, len] : runs) {
    if (off != at) return false;
    at += len;
  }
  return at == adv.text.size();
}

/// Accumulates r' piece by piece while recording provenance.
class TextBuilder {
 public:
  explicit TextBuilder(std::string_view original) : original_(original) {}

  void copy(std::size_t begin, std::size_t end) {
    if (end <= begin) return;
    if (!copied_.empty()) {
      auto& last = copied_.back();
      if (last.offset + last.length == out_.size() && last.source_offset + last.length == begin) {
        last.length += end - begin;
        out_.append(original_.substr(begin, end - begin));
        return;
      }
    }
    copied_.push_back({out_.size(), end - begin, begin});
    out_.append(original_.substr(begin, end - begin));
  }

  void insert(std::string_view text, std::string_view tag) {
    if (text.empty()) return;
    inserted_.push_back({out_.size(), text.size(), std::string(tag)});
    out_.append(text);
  }

  void remove(std::size_t begin, std::size_t end) {
    if (end <= begin) return;
    removed_.push_back({begin, std::string(original_.substr(begin, end - begin))});
  }

  /// Adds a single space when the text so far does not end in whitespace.
  void separate() {
    if (!out_.empty() && !is_space(out_.back())) insert(" ", "separator");
  }

  bool empty() const noexcept { return out_.empty(); }

  /// Moves trailing whitespace that was copied from r into a removal, so r'
  /// never ends in stray whitespace.
  void finish(AdversarialResponse& adv) {
    while (!copied_.empty() && !out_.empty() && is_space(out_.back())) {
      auto& last = copied_.back();
      if (last.offset + last.length != out_.size()) break;
      std::size_t keep = last.length;
      while (keep > 0 && is_space(out_[last.offset + keep - 1])) --keep;
      const std::size_t cut = last.length - keep;
      removed_.push_back({last.source_offset + keep, out_.substr(last.offset + keep, cut)});
      out_.resize(last.offset + keep);
      last.length = keep;
      if (keep == 0) copied_.pop_back();
    }
    adv.text = std::move(out_);
    adv.inserted_spans = std::move(inserted_);
    adv.copied_spans = std::move(copied_);
    adv.removed_spans = std::move(removed_);
  }

 private:
  std::string_view original_;
  std::string out_;
  std::vector<InsertedSpan> inserted_;
  std::vector<CopiedSpan> copied_;
  std::vector<RemovedSpan> removed_;
};

/// One unit of a sentence-level rewrite plan: either an original sentence
/// (with its trailing whitespace) or new text.
struct PlanUnit {
  std::optional<std::size_t> original;  // sentence index
  std::string text;                     // new text when !original
  std::string tag;
  std::optional<std::size_t> replaces;  // new text standing in for this sentence
};

/// Emits a plan over the sentences of `original`. Original sentences not in
/// the plan are recorded as removed (sentence plus its trailing gap).
inline void assemble(std::string_view original, const std::vector<SentenceSpan>& spans,
                     const std::vector<PlanUnit>& plan, AdversarialResponse& adv) {
  TextBuilder b(original);
  auto unit_end = [&](std::size_t i) { return i + 1 < spans.size() ? spans[i + 1].char_start : original.size(); };
  const std::size_t lead_end = spans.empty() ? original.size() : spans.front().char_start;
  b.copy(0, lead_end);

  std::vector<bool> used(spans.size(), false);
  for (const auto& u : plan) {
    b.separate();
    if (u.original) {
      const std::size_t i = *u.original;
      used[i] = true;
      b.copy(spans[i].char_start, unit_end(i));
    } else if (u.replaces) {
      const std::size_t i = *u.replaces;
      used[i] = true;
      b.insert(u.text, u.tag);
      b.remove(spans[i].char_start, spans[i].char_end);
      b.copy(spans[i].char_end, unit_end(i));
    } else {
      b.insert(u.text, u.tag);
    }
  }
  for (std::size_t i = 0; i < spans.size(); ++i)
    if (!used[i]) b.remove(spans[i].char_start, unit_end(i));
  b.finish(adv);
}

/// Splits pool text into whole sentences ready for insertion: trimmed,
/// capitalized and terminated.
inline std::string as_sentence(std::string_view line) {
  std::string s(trim(line));
  if (s.empty()) return s;
  s[0] = to_upper(s[0]);
  std::size_t e = s.size();
  while (e > 0 && detail::is_closing_mark(s[e - 1])) --e;
  if (e == 0 || !is_terminal_punct(s[e - 1])) s += '.';
  return s;
}

}  // namespace aesrt
