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

#include <span>
#include <vector>

#include "aesrt/corpus.hpp"
#include "aesrt/perturb/spec.hpp"

namespace aesrt {

inline AdversarialResponse shuffle_sent(const Response& response, const PerturbSpec& spec) {
  if (spec.test != TestKind::ShuffleSent) throw PerturbError("shuffle_sent needs test ShuffleSent");
  validate_spec(spec);
  const auto spans = split_sentences(response.text);
  if (spans.size() < 2) throw PerturbError("response " + response.id + " has fewer than 2 sentences");

  Rng rng(derive_seed(spec.seed, response.id, to_string(spec.test)));
  std::vector<std::size_t> order(spans.size());
  bool identity = true;
  while (identity) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i = 0; i < order.size() && identity; ++i) identity = order[i] == i;
  }

  std::vector<PlanUnit> plan;
  for (std::size_t i : order) plan.push_back({i, {}, {}, std::nullopt});
  AdversarialResponse adv;
  adv.original_id = response.id;
  adv.spec = spec;
  assemble(response.text, spans, plan, adv);
  return adv;
}

}  // namespace aesrt
