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

// Babel probe, adversarial training-set emission and the retraining
// comparison built on top of it.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aesrt/corpus.hpp"
#include "aesrt/metrics.hpp"
#include "aesrt/perturb/apply.hpp"
#include "aesrt/resources.hpp"
#include "aesrt/runner/config.hpp"
#include "aesrt/runner/report.hpp"
#include "aesrt/scorer/scorer.hpp"

namespace aesrt {

// --- babel probe -------------------------------------------------------------------

struct BabelProbeRow {
  std::string scorer_id;
  std::string prompt_id;
  std::vector<std::string> keywords;
  std::size_t words = 0;
  std::optional<double> score;   // clamped raw score; empty when scoring failed
  std::optional<double> fraction;  // (score - min) / width, in [0, 1]
  std::string error;
};

/// One Babel essay per prompt, scored by every scorer. Prompts without an
/// entry in `keywords` use default_babel_keywords.
inline std::vector<BabelProbeRow> babel_probe(const Corpus& corpus, const ResourcePack& pack,
                                              const std::vector<ScorerConfig>& scorers,
                                              const std::map<std::string, std::vector<std::string>>& keywords,
                                              std::uint64_t seed, int word_target = 500) {
  struct Essay {
    const Prompt* prompt;
    std::vector<std::string> keywords;
    std::string text;
  };
  std::vector<Essay> essays;
  for (const auto& [id, prompt] : corpus.prompts) {
    auto it = keywords.find(id);
    auto kw = it != keywords.end() ? it->second : default_babel_keywords(prompt);
    auto text = babel_text(kw, pack.babel_lexicon, word_target, Digest{}.add(seed).add(std::string_view(id)).value());
    essays.push_back({&prompt, std::move(kw), std::move(text)});
  }
  std::vector<BabelProbeRow> rows;
  for (const auto& sc : scorers) {
    auto adapter = make_adapter(sc.uri, corpus, sc.options);
    std::vector<ScoreRequest> reqs;
    for (const auto& e : essays) reqs.push_back({"babel-" + e.prompt->id, e.prompt->id, e.text});
    const auto res = adapter->score_batch(reqs);
    std::map<std::string, double> got;
    std::map<std::string, std::string> failed;
    for (const auto& r : res.replies) got[r.id] = r.score;
    for (const auto& f : res.failures) failed[f.id] = f.reason;
    for (std::size_t i = 0; i < essays.size(); ++i) {
      const auto& e = essays[i];
      BabelProbeRow row{sc.id, e.prompt->id, e.keywords, word_count(e.text), {}, {}, {}};
      auto g = got.find(reqs[i].id);
      if (g != got.end()) {
        const auto n = normalize(g->second, *e.prompt);
        row.score = n.raw;
        row.fraction = n.percent / 100.0;
      } else {
        auto f = failed.find(reqs[i].id);
        row.error = f != failed.end() ? f->second : "no reply";
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline std::string babel_probe_csv(const std::vector<BabelProbeRow>& rows) {
  std::string out = "scorer_id,prompt_id,keywords,words,score,fraction_of_range,error\n";
  for (const auto& r : rows) {
    std::string kw;
    for (const auto& k : r.keywords) kw += (kw.empty() ? "" : " ") + k;
    out += csv_field(r.scorer_id) + ',' + csv_field(r.prompt_id) + ',' + csv_field(kw) + ',' + std::to_string(r.words) +
           ',' + format_number(r.score) + ',' + format_number(r.fraction) + ',' + csv_field(r.error) + '\n';
  }
  return out;
}

// --- training set -------------------------------------------------------------------

/// Human "Score drop %" per test from the bundled survey summary table, used
/// when no local survey data exists.
inline std::map<TestKind, double> default_drop_pct() {
  return {{TestKind::ShuffleSent, 24.2}, {TestKind::ModGrammar, 39.5}, {TestKind::AddWikiRelated, 38.2},
          {TestKind::RepeatSent, 15.6},  {TestKind::AddLies, 23.9},    {TestKind::AddTruth, 29.2},
          {TestKind::AddSong, 32.8},     {TestKind::DelRand, 38.2}};
}

struct TrainsetSpec {
  std::vector<TestKind> tests;
  std::map<TestKind, double> drop_pct = default_drop_pct();
  int mix_original = 1;     // a in a:b
  int mix_adversarial = 1;  // b in a:b
  int c1 = 25;
  Position c2 = Position::End;
  bool bounded = false;
};

inline void validate_trainset_spec(const TrainsetSpec& s) {
  if (s.tests.empty()) throw ConfigError("trainset selects no tests");
  if (s.mix_original < 0 || s.mix_adversarial < 1) throw ConfigError("trainset mix must be a:b with a >= 0, b >= 1");
  if (!valid_c1(s.c1)) throw ConfigError("trainset c1 must be one of 5, 10, 15, 20, 25");
  for (auto t : s.tests) {
    auto it = s.drop_pct.find(t);
    if (it == s.drop_pct.end()) throw ConfigError("no score drop given for " + std::string(to_string(t)));
    if (!(it->second >= 0.0 && it->second <= 100.0)) throw ConfigError("score drop must lie in [0, 100]");
  }
}

/// clamp(round(original - drop/100 * width)), rounding half away from zero.
inline int trainset_target(int original, double drop_pct, const Prompt& prompt) {
  const double t = static_cast<double>(original) - drop_pct / 100.0 * prompt.range_width();
  return std::clamp(static_cast<int>(std::lround(t)), prompt.score_min, prompt.score_max);
}

struct TrainRecord {
  std::string id;
  std::string prompt_id;
  std::string original_id;
  std::string origin;  // "original" or a test name
  std::string text;
  int score = 0;

  bool operator==(const TrainRecord&) const = default;
};

/// For every scored response: a*k copies of the original and b variants per
/// selected test (k = number of tests), shuffled with `seed`.
inline std::vector<TrainRecord> emit_trainset(const Corpus& corpus, const ResourcePack& pack, const TrainsetSpec& spec,
                                              std::uint64_t seed) {
  validate_trainset_spec(spec);
  std::vector<TrainRecord> out;
  std::size_t scored = 0;
  const auto k = static_cast<int>(spec.tests.size());
  for (const auto& r : corpus.responses) {
    if (!r.human_score) continue;
    ++scored;
    const auto& prompt = corpus.prompt_of(r);
    for (int i = 0; i < spec.mix_original * k; ++i)
      out.push_back({r.id + "#orig" + std::to_string(i), r.prompt_id, r.id, "original", r.text, *r.human_score});
    for (auto t : spec.tests) {
      const int target = trainset_target(*r.human_score, spec.drop_pct.at(t), prompt);
      for (int v = 0; v < spec.mix_adversarial; ++v) {
        PerturbSpec ps;
        ps.test = t;
        ps.c1 = spec.c1;
        ps.c2 = spec.c2;
        ps.bounded = spec.bounded;
        ps.seed = v == 0 ? seed : Digest{}.add(seed).add(v).value();
        try {
          auto adv = apply(ps, r, prompt, pack);
          out.push_back({r.id + "#" + std::string(to_string(t)) + std::to_string(v), r.prompt_id, r.id,
                         std::string(to_string(t)), std::move(adv.text), target});
        } catch (const PerturbError&) {
          // test not applicable to this response (e.g. AddRC without a passage)
        }
      }
    }
  }
  if (scored == 0) throw ConfigError("corpus has no human scores to build a training set from");
  Rng rng(Digest{}.add(seed).add(std::string_view("trainset")).value());
  rng.shuffle(std::span<TrainRecord>(out));
  return out;
}

inline std::string trainset_jsonl(const std::vector<TrainRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += nlohmann::json{{"id", r.id},         {"prompt_id", r.prompt_id}, {"text", r.text},
                          {"human_score", r.score}, {"original_id", r.original_id}, {"origin", r.origin}}
               .dump();
    out += '\n';
  }
  return out;
}

inline Corpus trainset_corpus(const std::map<std::string, Prompt>& prompts, const std::vector<TrainRecord>& records) {
  Corpus c;
  c.prompts = prompts;
  for (const auto& r : records) c.responses.push_back({r.id, r.prompt_id, r.text, r.score});
  return c;
}

// --- adversarial training ------------------------------------------------------------

/// The four metrics compared before and after retraining.
struct TrainingMetrics {
  double n_pos_pct = 0.0;
  double mu_pos_pct = 0.0;
  double mu_neg_pct = 0.0;
  double sigma_pct = 0.0;
};

struct AdvTrainRow {
  TestKind test = TestKind::ShuffleSent;        // held-out test evaluated
  TestKind other_test = TestKind::ShuffleSent;  // test used for the "different" model
  std::size_t n = 0;
  TrainingMetrics original;  // trained on originals only
  TrainingMetrics same;      // trained with variants of `test`
  TrainingMetrics different; // trained with variants of `other_test`
};

struct AdvTrainResult {
  std::vector<std::string> train_ids;
  std::vector<std::string> heldout_ids;
  std::vector<AdvTrainRow> rows;
};

/// Per prompt: responses sorted by a seeded hash of their id, the first 60%
/// (rounded up) train, the rest are held out.
inline std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, std::uint64_t seed, double train_fraction = 0.6) {
  Corpus train, held;
  train.prompts = held.prompts = corpus.prompts;
  for (const auto& [id, prompt] : corpus.prompts) {
    auto rs = corpus.responses_for(id);
    std::vector<std::pair<std::uint64_t, const Response*>> order;
    for (const auto* r : rs) order.push_back({Digest{}.add(seed).add(std::string_view(r->id)).value(), r});
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second->id < b.second->id;
    });
    const auto cut = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(order.size())));
    for (std::size_t i = 0; i < order.size(); ++i) (i < cut ? train : held).responses.push_back(*order[i].second);
  }
  return {std::move(train), std::move(held)};
}

namespace detail {

inline TrainingMetrics training_metrics(std::span<const ScorePair> pairs, MuDenominator mu) {
  if (pairs.empty()) return {};
  const auto m = adversarial_metrics(pairs, mu);
  return {m.n_pos_pct, m.mu_pos_pct, m.mu_neg_pct, m.sigma_pct};
}

inline TestKind other_test_for(TestKind t, const std::vector<TestKind>& tests) {
  if (tests.size() > 1) {
    auto it = std::find(tests.begin(), tests.end(), t);
    return tests[(static_cast<std::size_t>(it - tests.begin()) + 1) % tests.size()];
  }
  for (const auto& [k, v] : default_drop_pct())
    if (k != t) return k;
  return t;
}

}  // namespace detail

inline AdvTrainResult adversarial_training_experiment(const Corpus& corpus, const ResourcePack& pack,
                                                      TrainsetSpec spec, std::uint64_t seed, double lambda = 1.0,
                                                      MuDenominator mu = MuDenominator::Impacted) {
  const auto defaults = default_drop_pct();
  for (auto t : spec.tests) {
    const auto o = detail::other_test_for(t, spec.tests);
    if (!spec.drop_pct.count(o)) {
      auto d = defaults.find(o);
      if (d == defaults.end()) throw ConfigError("no score drop given for " + std::string(to_string(o)));
      spec.drop_pct[o] = d->second;
    }
  }
  validate_trainset_spec(spec);
  auto [train, held] = split_corpus(corpus, seed);

  AdvTrainResult out;
  for (const auto& r : train.responses) out.train_ids.push_back(r.id);
  for (const auto& r : held.responses) out.heldout_ids.push_back(r.id);

  const BaselineModel original = train_baseline(train, lambda);
  std::map<TestKind, BaselineModel> adversarial;
  auto model_for = [&](TestKind t) -> const BaselineModel& {
    auto it = adversarial.find(t);
    if (it != adversarial.end()) return it->second;
    TrainsetSpec one = spec;
    one.tests = {t};
    const auto records = emit_trainset(train, pack, one, seed);
    return adversarial.emplace(t, train_baseline(trainset_corpus(train.prompts, records), lambda)).first->second;
  };

  for (auto t : spec.tests) {
    AdvTrainRow row;
    row.test = t;
    row.other_test = detail::other_test_for(t, spec.tests);
    const BaselineModel& same = model_for(t);
    const BaselineModel& diff = model_for(row.other_test);
    std::vector<ScorePair> p_orig, p_same, p_diff;
    for (const auto& r : held.responses) {
      const auto& prompt = held.prompt_of(r);
      PerturbSpec ps;
      ps.test = t;
      ps.c1 = spec.c1;
      ps.c2 = spec.c2;
      ps.bounded = spec.bounded;
      ps.seed = Digest{}.add(seed).add(std::string_view("heldout")).value();
      std::optional<AdversarialResponse> adv;
      try {
        adv = apply(ps, r, prompt, pack);
      } catch (const PerturbError&) {
        continue;
      }
      auto pair_for = [&](const BaselineModel& m) {
        return ScorePair{normalize_score(baseline_score(m, prompt, r.text), prompt),
                         normalize_score(baseline_score(m, prompt, adv->text), prompt)};
      };
      p_orig.push_back(pair_for(original));
      p_same.push_back(pair_for(same));
      p_diff.push_back(pair_for(diff));
    }
    row.n = p_orig.size();
    row.original = detail::training_metrics(p_orig, mu);
    row.same = detail::training_metrics(p_same, mu);
    row.different = detail::training_metrics(p_diff, mu);
    out.rows.push_back(row);
  }
  return out;
}

/// Long form: one row per (test, metric, variant).
inline std::string adv_train_csv(const AdvTrainResult& r) {
  std::string out = "test,other_test,n,metric,original,same,different\n";
  for (const auto& row : r.rows) {
    auto line = [&](std::string_view name, double TrainingMetrics::*f) {
      out += std::string(to_string(row.test)) + ',' + std::string(to_string(row.other_test)) + ',' +
             std::to_string(row.n) + ',' + std::string(name) + ',' + format_number(row.original.*f) + ',' +
             format_number(row.same.*f) + ',' + format_number(row.different.*f) + '\n';
    };
    line("n_pos_pct", &TrainingMetrics::n_pos_pct);
    line("mu_pos_pct", &TrainingMetrics::mu_pos_pct);
    line("mu_neg_pct", &TrainingMetrics::mu_neg_pct);
    line("sigma_pct", &TrainingMetrics::sigma_pct);
  }
  return out;
}

}  // namespace aesrt
