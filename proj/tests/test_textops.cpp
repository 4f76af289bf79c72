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
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "aesrt/sample_corpus.hpp"
#include "aesrt/textops.hpp"

namespace aesrt {
namespace {

std::size_t recount(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}

TEST(SplitSentences, TwoTerminatedSentences) {
  const auto s = split_sentences("A b. C d.");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].text, "A b.");
  EXPECT_EQ(s[1].text, "C d.");
}

TEST(SplitSentences, AbbreviationDoesNotSplit) {
  const auto s = split_sentences("Mr. Smith ran.");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].text, "Mr. Smith ran.");
  EXPECT_EQ(split_sentences("We saw Dr. Who, e.g. On Friday. Then left.").size(), 2u);
}

TEST(SplitSentences, EmptyAndUnterminated) {
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_TRUE(split_sentences("   \n\t").empty());
  const auto s = split_sentences("no punctuation at all");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].text, "no punctuation at all");
}

TEST(SplitSentences, QuestionAndExclamation) {
  const auto s = split_sentences("Why? Because! Fine. ok then");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[2].text, "Fine. ok then");
}

TEST(SplitSentences, LowercaseAfterPeriodContinues) {
  EXPECT_EQ(split_sentences("It cost 3.5 dollars. the end").size(), 1u);
}

// Gaps between spans hold only whitespace, so re-joining spans with the
// original gap text reproduces the input.
TEST(SplitSentences, LosslessOnBundledCorpus) {
  for (const auto& r : bundled_sample_corpus().responses) {
    const auto spans = split_sentences(r.text);
    std::string rebuilt;
    std::size_t at = 0;
    for (const auto& s : spans) {
      const std::string gap = r.text.substr(at, s.char_start - at);
      for (char c : gap) ASSERT_TRUE(std::isspace(static_cast<unsigned char>(c))) << r.id;
      rebuilt += gap;
      ASSERT_EQ(r.text.substr(s.char_start, s.char_end - s.char_start), s.text);
      rebuilt += s.text;
      at = s.char_end;
    }
    rebuilt += r.text.substr(at);
    EXPECT_EQ(rebuilt, r.text) << r.id;
  }
}

TEST(WordCount, Examples) {
  EXPECT_EQ(word_count("a b  c"), 3u);
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("  lead\ttab\nnewline  "), 3u);
}

TEST(WordCount, MatchesRecountOnCorpus) {
  const auto& c = bundled_sample_corpus();
  EXPECT_EQ(word_count(c.responses.front().text), recount(c.responses.front().text));
  for (const auto& r : c.responses) EXPECT_EQ(word_count(r.text), recount(r.text)) << r.id;
}

TEST(Thirds, Examples) {
  auto sizes = [](std::size_t n) {
    const auto t = thirds(n);
    return std::vector<std::size_t>{t.start.size(), t.mid.size(), t.end.size()};
  };
  EXPECT_EQ(sizes(6), (std::vector<std::size_t>{2, 2, 2}));
  EXPECT_EQ(sizes(4), (std::vector<std::size_t>{2, 1, 1}));
  EXPECT_EQ(sizes(1), (std::vector<std::size_t>{1, 0, 0}));
  EXPECT_EQ(sizes(0), (std::vector<std::size_t>{0, 0, 0}));
}

TEST(Thirds, PartitionsAndBalances) {
  for (std::size_t n = 0; n < 200; ++n) {
    const auto t = thirds(n);
    const std::size_t a = (n + 2) / 3;
    EXPECT_EQ(t.start.begin, 0u);
    EXPECT_EQ(t.start.end, a);
    EXPECT_EQ(t.mid.begin, t.start.end);
    EXPECT_EQ(t.mid.size(), (n - a + 1) / 2);
    EXPECT_EQ(t.end.begin, t.mid.end);
    EXPECT_EQ(t.end.end, n);
    const auto hi = std::max({t.start.size(), t.mid.size(), t.end.size()});
    const auto lo = std::min({t.start.size(), t.mid.size(), t.end.size()});
    EXPECT_LE(hi - lo, 1u) << n;
    EXPECT_EQ(thirds(n), t);
  }
}

TEST(ComputeBudget, Examples) {
  EXPECT_EQ(compute_budget(100, 20), 20u);
  EXPECT_EQ(compute_budget(9, 5), 1u);
  EXPECT_EQ(compute_budget(0, 25), 0u);
}

TEST(ComputeBudget, MatchesRoundingOracle) {
  for (std::size_t n = 1; n < 2000; ++n) {
    for (int c : {5, 10, 15, 20, 25}) {
      const double exact = static_cast<double>(n) * c / 100.0;
      const auto expect = std::max<long>(1, std::lround(exact));
      ASSERT_EQ(compute_budget(n, c), static_cast<std::size_t>(expect)) << n << " " << c;
      if (n >= 100) {
        EXPECT_LE(std::abs(static_cast<double>(compute_budget(n, c)) / n - c / 100.0), 0.5 / n + 1e-12);
      }
    }
  }
}

TEST(ComputeBudget, RejectsBadPercent) {
  EXPECT_THROW(compute_budget(10, -1), std::invalid_argument);
  EXPECT_THROW(compute_budget(10, 101), std::invalid_argument);
}

}  // namespace
}  // namespace aesrt
