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
#include <span>
#include <vector>

#include "aesrt/corpus.hpp"
#include "aesrt/perturb/spec.hpp"

namespace aesrt {

/// DelStart, DelEnd and DelRand. Whole sentences are removed until the
/// word budget is met; at least one sentence always survives. c2 plays no
/// part here.
inline AdversarialResponse delete_content(const Response& response, const PerturbSpec& spec) {
  if (!is_delete(spec.test)) throw PerturbError(std::string(to_string(spec.test)) + " is not a Delete test");
  validate_spec(spec);
  const auto spans = split_sentences(response.text);
  if (spans.size() < 2) throw PerturbError("response " + response.id + " has fewer than 2 sentences");

  const std::size_t budget = compute_budget(word_count(response.text), spec.c1);

  std::vector<std::size_t> order(spans.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (spec.test == TestKind::DelEnd) std::reverse(order.begin(), order.end());
  if (spec.test == TestKind::DelRand) {
    Rng rng(derive_seed(spec.seed, response.id, to_string(spec.test)));
    rng.shuffle(std::span<std::size_t>(order));
  }

  AdversarialResponse adv;
  adv.original_id = response.id;
  adv.spec = spec;
  std::vector<bool> gone(spans.size(), false);
  std::size_t removed = 0;
  for (std::size_t k = 0; k < order.size() && removed < budget && k + 1 < spans.size(); ++k) {
    gone[order[k]] = true;
    removed += spans[order[k]].words();
    adv.deleted_sentence_indices.push_back(order[k]);
  }
  std::sort(adv.deleted_sentence_indices.begin(), adv.deleted_sentence_indices.end());

  std::vector<PlanUnit> plan;
  for (std::size_t i = 0; i < spans.size(); ++i)
    if (!gone[i]) plan.push_back({i, {}, {}, std::nullopt});
  assemble(response.text, spans, plan, adv);
  return adv;
}

}  // namespace aesrt
