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

// The parameter sweep: perturb every response under every grid point, score
// originals and variants, reduce to impact reports.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aesrt/corpus.hpp"
#include "aesrt/metrics.hpp"
#include "aesrt/perturb/apply.hpp"
#include "aesrt/resources.hpp"
#include "aesrt/runner/config.hpp"
#include "aesrt/runner/pool.hpp"
#include "aesrt/runner/report.hpp"
#include "aesrt/scorer/scorer.hpp"

namespace aesrt {

/// Content address of a text under a prompt; used as wire id and cache key.
inline std::string text_key(std::string_view prompt_id, std::string_view text) {
  return Digest{}.add(prompt_id).add(text).hex();
}

/// Append-only score store, one {"key","score"} record per line.
class ScoreCache {
 public:
  ScoreCache() = default;
  explicit ScoreCache(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.empty()) return;
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        scores_[j.at("key").get<std::string>()] = j.at("score").get<double>();
      } catch (const nlohmann::json::exception&) {
        // a torn last line from an interrupted run; the entry is recomputed
      }
    }
  }

  std::optional<double> get(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = scores_.find(key);
    if (it == scores_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& key, double score) {
    std::lock_guard lock(mu_);
    if (scores_.emplace(key, score).second) fresh_.emplace(key, score);
  }

  /// Appends entries added since construction, in key order.
  void flush() {
    std::lock_guard lock(mu_);
    if (path_.empty() || fresh_.empty()) return;
    std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot write score cache " + path_.string());
    for (const auto& [k, v] : fresh_) out << nlohmann::json{{"key", k}, {"score", v}}.dump() << '\n';
    fresh_.clear();
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return scores_.size();
  }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::string, double> scores_;
  std::map<std::string, double> fresh_;
};

struct VariantRecord {
  std::string response_id;
  std::string prompt_id;
  PerturbSpec spec;
  std::string text;
};

struct SweepFailure {
  std::string stage;  // "perturb" or "score"
  std::string scorer_id;
  std::string id;
  std::string reason;

  bool operator<(const SweepFailure& o) const {
    return std::tie(stage, scorer_id, id, reason) < std::tie(o.stage, o.scorer_id, o.id, o.reason);
  }
};

struct SweepResult {
  ReportBundle bundle;
  std::vector<VariantRecord> variants;  // grid order
  std::vector<SweepFailure> failures;   // sorted
  std::size_t cache_hits = 0;
};

/// Grid specs in emission order: test, c1, c2, bounded.
inline std::vector<PerturbSpec> sweep_specs(const RunConfig& c) {
  std::vector<PerturbSpec> out;
  for (auto t : c.tests)
    for (int c1 : c.c1_values)
      for (auto c2 : c.c2_values)
        for (bool b : c.bounded_modes) {
          PerturbSpec s;
          s.test = t;
          s.c1 = c1;
          s.c2 = c2;
          s.bounded = b;
          s.seed = c.seed;
          if (t == TestKind::ModGrammar) s.grammar_mode = c.grammar_mode;
          s.babel_word_target = c.babel_word_target;
          out.push_back(std::move(s));
        }
  return out;
}

/// Scores every distinct (prompt, text) through one adapter, consulting and
/// filling the cache. Returns key -> raw score; failures are appended.
inline std::map<std::string, double> score_texts(ScorerAdapter& adapter, const std::string& scorer_id,
                                                 const std::map<std::string, ScoreRequest>& texts, ScoreCache& cache,
                                                 std::size_t batch_size, std::size_t workers,
                                                 std::vector<SweepFailure>& failures, std::size_t& hits) {
  std::map<std::string, double> scores;
  std::vector<ScoreRequest> todo;
  for (const auto& [key, req] : texts) {
    if (auto v = cache.get(key)) {
      scores.emplace(key, *v);
      ++hits;
    } else {
      todo.push_back(req);
    }
  }
  const std::size_t batches = (todo.size() + batch_size - 1) / batch_size;
  std::vector<BatchResult> results(batches);
  parallel_for(batches, workers, [&](std::size_t b) {
    const std::size_t lo = b * batch_size;
    const std::size_t hi = std::min(todo.size(), lo + batch_size);
    results[b] = adapter.score_batch(std::span<const ScoreRequest>(todo.data() + lo, hi - lo));
  });
  for (const auto& res : results) {
    for (const auto& r : res.replies) {
      if (!texts.count(r.id)) continue;
      scores.emplace(r.id, r.score);
      cache.put(r.id, r.score);
    }
    for (const auto& f : res.failures) failures.push_back({"score", scorer_id, f.id, f.reason});
  }
  return scores;
}

/// Runs the sweep on an already loaded corpus and pack. Adapters are built
/// from the config; the baseline trains on `corpus`.
inline SweepResult run_sweep(const RunConfig& config, const Corpus& corpus, const ResourcePack& pack) {
  validate_config(config);
  SweepResult out;
  const auto specs = sweep_specs(config);

  struct Job {
    const Response* response;
    const PerturbSpec* spec;
  };
  std::vector<Job> jobs;
  for (const auto& r : corpus.responses)
    for (const auto& s : specs) jobs.push_back({&r, &s});

  std::vector<std::optional<AdversarialResponse>> variants(jobs.size());
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), config.workers, [&](std::size_t i) {
    const auto& job = jobs[i];
    try {
      variants[i] = apply(*job.spec, *job.response, corpus.prompt_of(*job.response), pack);
    } catch (const PerturbError& e) {
      errors[i] = e.what();
    }
  });

  std::map<std::string, ScoreRequest> texts;
  std::vector<std::string> original_keys(jobs.size());
  std::vector<std::string> variant_keys(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& r = *jobs[i].response;
    original_keys[i] = text_key(r.prompt_id, r.text);
    texts.emplace(original_keys[i], ScoreRequest{original_keys[i], r.prompt_id, r.text});
    if (!variants[i]) {
      out.failures.push_back({"perturb", "", r.id + "#" + Digest{}.add(jobs[i].spec->digest()).hex(), errors[i]});
      ++out.bundle.failures.perturb;
      continue;
    }
    variant_keys[i] = text_key(r.prompt_id, variants[i]->text);
    texts.emplace(variant_keys[i], ScoreRequest{variant_keys[i], r.prompt_id, variants[i]->text});
    out.variants.push_back({r.id, r.prompt_id, variants[i]->spec, variants[i]->text});
  }

  std::map<ImpactKey, std::vector<ScorePair>> groups;
  for (const auto& sc : config.scorers) {
    auto adapter = make_adapter(sc.uri, corpus, sc.options);
    ScoreCache cache(config.cache ? std::filesystem::path(config.output_dir) / "cache" /
                                        ("scores-" + Digest{}.add(std::string_view(adapter->describe())).hex() + ".jsonl")
                                  : std::filesystem::path());
    const std::size_t before = out.failures.size();
    const auto scores =
        score_texts(*adapter, sc.id, texts, cache, config.batch_size, config.workers, out.failures, out.cache_hits);
    out.bundle.failures.scoring += out.failures.size() - before;
    if (config.cache) cache.flush();

    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (!variants[i]) continue;
      auto a = scores.find(original_keys[i]);
      auto b = scores.find(variant_keys[i]);
      if (a == scores.end() || b == scores.end()) continue;
      const auto& prompt = corpus.prompt_of(*jobs[i].response);
      const auto na = normalize(a->second, prompt);
      const auto nb = normalize(b->second, prompt);
      out.bundle.failures.clamped += (na.clamped ? 1 : 0) + (nb.clamped ? 1 : 0);
      const auto& s = *jobs[i].spec;
      ImpactKey key{sc.id, s.test, prompt.id, s.c1, s.c2, s.bounded};
      groups[key].push_back({na.percent, nb.percent});
      key.prompt_id = std::string(kPooledPrompt);
      groups[key].push_back({na.percent, nb.percent});
    }
  }

  for (const auto& [key, pairs] : groups) out.bundle.reports.push_back(make_impact_report(key, pairs, config.mu_denominator));
  compute_aggregates(out.bundle);
  std::sort(out.failures.begin(), out.failures.end());
  return out;
}

/// Perturbation only: every response under every grid point, no scoring.
inline std::pair<std::vector<VariantRecord>, std::vector<SweepFailure>> generate_variants(const RunConfig& config,
                                                                                          const Corpus& corpus,
                                                                                          const ResourcePack& pack) {
  const auto specs = sweep_specs(config);
  const std::size_t n = corpus.responses.size() * specs.size();
  std::vector<std::optional<AdversarialResponse>> done(n);
  std::vector<std::string> errors(n);
  parallel_for(n, config.workers, [&](std::size_t i) {
    const auto& r = corpus.responses[i / specs.size()];
    try {
      done[i] = apply(specs[i % specs.size()], r, corpus.prompt_of(r), pack);
    } catch (const PerturbError& e) {
      errors[i] = e.what();
    }
  });
  std::vector<VariantRecord> variants;
  std::vector<SweepFailure> failures;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = corpus.responses[i / specs.size()];
    if (done[i]) variants.push_back({r.id, r.prompt_id, done[i]->spec, done[i]->text});
    else failures.push_back({"perturb", "", r.id + "#" + Digest{}.add(specs[i % specs.size()].digest()).hex(), errors[i]});
  }
  std::sort(failures.begin(), failures.end());
  return {std::move(variants), std::move(failures)};
}

inline std::string adversarial_corpus_jsonl(const std::vector<VariantRecord>& variants) {
  std::string out;
  for (const auto& v : variants) {
    out += nlohmann::json{{"original_id", v.response_id},
                          {"test", to_string(v.spec.test)},
                          {"c1", v.spec.c1},
                          {"c2", to_string(v.spec.c2)},
                          {"bounded", v.spec.bounded},
                          {"seed", v.spec.seed},
                          {"text", v.text}}
               .dump();
    out += '\n';
  }
  return out;
}

inline std::string failures_jsonl(const std::vector<SweepFailure>& failures) {
  std::string out;
  for (const auto& f : failures) {
    out += nlohmann::json{{"stage", f.stage}, {"scorer_id", f.scorer_id}, {"id", f.id}, {"reason", f.reason}}.dump();
    out += '\n';
  }
  return out;
}

/// Loads inputs per the config, runs the sweep and writes every artifact to
/// config.output_dir.
inline SweepResult run_sweep(const RunConfig& config) {
  validate_config(config);
  const Corpus corpus = load_config_corpus(config);
  const ResourcePack pack = load_config_pack(config);
  auto result = run_sweep(config, corpus, pack);
  const std::filesystem::path dir(config.output_dir);
  if (!result.bundle.reports.empty()) emit_report(result.bundle, config.formats, dir);
  else std::filesystem::create_directories(dir);
  if (config.write_adversarial_corpus) write_text_file(dir / "adversarial.jsonl", adversarial_corpus_jsonl(result.variants));
  write_text_file(dir / "failures.jsonl", failures_jsonl(result.failures));
  return result;
}

}  // namespace aesrt
