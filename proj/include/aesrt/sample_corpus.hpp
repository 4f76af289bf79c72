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

// A small synthetic corpus so that tests and demos need no licensed data.
//
// Two prompts (one reading-comprehension, one narrative) with 25 responses
// each. Responses are assembled from fixed sentence banks and their human
// scores grow with length, mirroring the length/score relationship seen in
// real essay data.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aesrt/corpus.hpp"
#include "aesrt/rng.hpp"

namespace aesrt {

namespace detail {

inline constexpr std::string_view kGardenPassage =
    "Three years ago the empty lot on Maple Street was covered with broken glass and weeds. "
    "A retired teacher named Rosa asked her neighbors to help her clear it on a Saturday morning. "
    "Twelve people came with shovels, and by evening the lot was clean. "
    "The group built raised beds from donated boards and planted tomatoes, beans, and squash. "
    "Children from the nearby school began visiting the garden to learn how seeds grow. "
    "Older residents who had lived on the street for decades met each other for the first time. "
    "At the end of the summer the gardeners held a harvest dinner and shared the food with everyone. "
    "Today the garden has a waiting list, and the city plans to open two more lots like it.";

inline constexpr std::array<std::string_view, 40> kGardenBank = {
    "The community garden changed the neighborhood in many important ways.",
    "Before the garden existed, the lot on Maple Street was full of weeds and broken glass.",
    "Rosa showed that one person can start a big change by asking for help.",
    "Her neighbors came together on a Saturday to clean the whole lot.",
    "Working side by side helped people who were strangers become friends.",
    "The passage says that twelve people arrived with shovels to help.",
    "They built raised beds from boards that other people donated.",
    "Planting tomatoes, beans, and squash gave the neighbors a shared goal.",
    "The garden also became a place where children could learn about nature.",
    "Students from the nearby school visited to see how seeds grow into plants.",
    "Learning outside is different from reading about plants in a classroom.",
    "Older residents met each other for the first time because of the garden.",
    "This detail shows that the garden connected people of different ages.",
    "The harvest dinner at the end of summer brought everyone to one table.",
    "Sharing food is a simple way to build trust between families.",
    "The neighborhood became safer because people were outside watching the street.",
    "A clean lot with flowers makes people feel proud of where they live.",
    "The waiting list proves that many more people want to take part now.",
    "The city noticed the success and decided to open two more lots.",
    "This means the idea is spreading beyond a single street.",
    "In my opinion the most important change was the new sense of belonging.",
    "People stopped walking past each other without saying hello.",
    "Gardening also gave some residents fresh vegetables they could not afford before.",
    "The author uses the harvest dinner to show how generous the group became.",
    "Another change was that children had a safe place to spend their afternoons.",
    "Some neighbors learned skills like building, planting, and planning a budget.",
    "The garden turned an ugly space into something beautiful and useful.",
    "Rosa was a retired teacher, so she knew how to organize people well.",
    "Her patience and leadership kept the project going through the first year.",
    "The passage suggests that small projects can have large effects on a community.",
    "Before the garden, residents probably felt that nobody cared about their street.",
    "After the garden, they had proof that their work could make a difference.",
    "The beans and squash were shared with families who needed help.",
    "Even people who did not garden came to the harvest dinner to celebrate.",
    "The garden gave the neighborhood a reason to meet regularly.",
    "Regular meetings helped people solve other problems on the street too.",
    "For example, they could organize cleanups or help an elderly neighbor.",
    "Overall, the garden made Maple Street a friendlier and healthier place.",
    "I think every neighborhood could benefit from a project like this one.",
    "In conclusion, the community garden changed the neighborhood by bringing people together."};

inline constexpr std::array<std::string_view, 40> kPatienceBank = {
    "Last winter I had to be patient when my grandmother was in the hospital.",
    "My family drove three hours to the city to see her after her surgery.",
    "When we arrived, the nurse told us we had to wait in the lobby.",
    "The lobby was crowded, and every chair was taken by tired families.",
    "I sat on the floor next to my little brother and tried to stay calm.",
    "My brother kept asking when we could go in, and I did not know.",
    "I decided to read him a story from a book I found on a table.",
    "Reading the story helped both of us forget about the clock for a while.",
    "After two hours the doctor came out and said the surgery went well.",
    "We still could not see her because she needed to rest first.",
    "My mother looked worried, so I held her hand without saying anything.",
    "Being patient meant staying quiet even though I wanted answers.",
    "Another hour passed, and the sun went down outside the big windows.",
    "I bought snacks from the machine so everyone would have something to eat.",
    "My father thanked me for looking after my brother while he made phone calls.",
    "Finally a nurse called our name and led us down a long hallway.",
    "My grandmother was awake, and she smiled when she saw us walk in.",
    "She said she was proud of us for waiting so long without complaining.",
    "That moment made all the hours in the lobby feel worth it.",
    "I learned that patience is not just waiting but staying kind while you wait.",
    "At first I thought patience was something only adults needed.",
    "Now I know that being patient can help the people around you.",
    "If I had complained, my brother would have been even more upset.",
    "Instead, he copied me and sat quietly with the book.",
    "Patience also helped my mother because she did not have to worry about us.",
    "On the drive home everyone was tired but happy.",
    "My grandmother came home two weeks later and is healthy now.",
    "Whenever I feel impatient, I remember that long night in the hospital.",
    "Waiting is hard when you care about someone very much.",
    "Still, rushing the doctors would not have made her heal faster.",
    "Sometimes the only thing you can control is how you act while you wait.",
    "I kept track of time by counting the people who came through the doors.",
    "A kind stranger offered my brother a coloring book to pass the time.",
    "Small acts like that made the waiting room feel less lonely.",
    "My teacher later asked us to write about a time we showed patience.",
    "I chose this story because it taught me the most about myself.",
    "Patience is a skill that grows stronger the more you practice it.",
    "I want to keep practicing it at school and at home.",
    "In the end, being patient made a scary day a little easier for my family.",
    "That is why I believe patience is one of the most important qualities a person can have."};

inline Corpus make_sample_corpus() {
  Corpus corpus;
  Prompt rc;
  rc.id = "sample-rc";
  rc.kind = PromptKind::ReadingComprehension;
  rc.score_min = 0;
  rc.score_max = 4;
  rc.question_text =
      "Read the passage about the community garden on Maple Street. Explain how the community garden changed "
      "the neighborhood and the people who live there. Support your answer with details from the passage.";
  rc.reading_passage = std::string(kGardenPassage);

  Prompt na;
  na.id = "sample-na";
  na.kind = PromptKind::Narrative;
  na.score_min = 0;
  na.score_max = 30;
  na.question_text =
      "Write a story about a time when you were patient. Patience means waiting and staying calm when things "
      "are difficult. Describe the situation, what you were waiting for, and what patience taught you.";

  corpus.prompts.emplace(rc.id, rc);
  corpus.prompts.emplace(na.id, na);

  struct Spec {
    const Prompt* prompt;
    std::span<const std::string_view> bank;
    std::string_view prefix;
  };
  const std::array<Spec, 2> specs = {Spec{&corpus.prompts.at("sample-rc"), kGardenBank, "rc"},
                                     Spec{&corpus.prompts.at("sample-na"), kPatienceBank, "na"}};

  for (const auto& spec : specs) {
    Rng rng(Digest{}.add(std::string_view("aesrt-sample-corpus")).add(spec.prefix).value());
    // sentence counts sweep 4..16 so lengths (and scores) spread evenly; ids
    // are not sorted by length
    std::array<int, 25> rank{};
    for (int i = 0; i < 25; ++i) rank[static_cast<std::size_t>(i)] = i;
    rng.shuffle(std::span<int>(rank));
    for (int i = 0; i < 25; ++i) {
      const std::size_t k = 4 + static_cast<std::size_t>((rank[static_cast<std::size_t>(i)] * 13) / 25) + rng.index(2);
      std::vector<std::size_t> idx(spec.bank.size());
      for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
      rng.shuffle(std::span<std::size_t>(idx));
      idx.resize(k);
      std::sort(idx.begin(), idx.end());

      std::string text;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (j > 0) text += (j % 5 == 0) ? "\n\n" : " ";
        text += spec.bank[idx[j]];
      }

      const double frac = (static_cast<double>(k) - 4.0) / 13.0;
      const double width = spec.prompt->range_width();
      const double noise = (rng.uniform() - 0.5) * 0.12 * width;
      const double raw = spec.prompt->score_min + width * (0.08 + 0.84 * frac) + noise;
      const int score = std::clamp(static_cast<int>(std::lround(raw)), spec.prompt->score_min, spec.prompt->score_max);

      Response r;
      char id[32];
      std::snprintf(id, sizeof id, "%.*s-%03d", static_cast<int>(spec.prefix.size()), spec.prefix.data(), i + 1);
      r.id = id;
      r.prompt_id = spec.prompt->id;
      r.text = std::move(text);
      r.human_score = score;
      corpus.responses.push_back(std::move(r));
    }
  }
  return corpus;
}

}  // namespace detail

/// The bundled synthetic corpus. Deterministic: every call returns equal data.
inline const Corpus& bundled_sample_corpus() {
  static const Corpus corpus = detail::make_sample_corpus();
  return corpus;
}

}  // namespace aesrt
