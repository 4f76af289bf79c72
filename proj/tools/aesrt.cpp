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

// Command-line front end. A config file (--config) supplies defaults; flags
// given on the command line override individual fields.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aesrt/aesrt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!aesrt::trim(part).empty()) out.emplace_back(aesrt::trim(part));
  }
  return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& s, std::string_view what) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw aesrt::ConfigError(std::string(what) + " must look like key=value: " + s);
  return {s.substr(0, eq), s.substr(eq + 1)};
}

/// Run-config flags shared by the sweep-shaped subcommands.
struct RunFlags {
  std::string config;
  std::string corpus, corpus_format, manifest, score_column, resources, out, mu, grammar;
  std::vector<std::string> scorers, tests, c1, c2, bounded, formats;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool no_cache = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON run config; flags override its fields");
    app->add_option("--corpus", corpus, "corpus file (default: bundled sample corpus)");
    app->add_option("--corpus-format", corpus_format, "asap_tsv or native_jsonl");
    app->add_option("--manifest", manifest, "prompt manifest JSON");
    app->add_option("--score-column", score_column, "ASAP column holding the human score");
    app->add_option("--resources", resources, "resource pack directory");
    app->add_option("--scorer", scorers, "id=uri, repeatable (baseline:, exec:<cmd>, http://host:port)");
    app->add_option("--tests", tests, "comma-separated test names");
    app->add_option("--c1", c1, "comma-separated c1 values");
    app->add_option("--c2", c2, "comma-separated positions: start, mid, end");
    app->add_option("--bounded", bounded, "comma-separated: true, false");
    app->add_option("--formats", formats, "comma-separated: csv, json, svg");
    app->add_option("--seed", seed, "base seed");
    app->add_option("--workers", workers, "worker threads (0: available parallelism)");
    app->add_option("--out", out, "output directory");
    app->add_option("--mu", mu, "impacted or total");
    app->add_option("--grammar-mode", grammar, "ModGrammar mode");
    app->add_flag("--no-cache", no_cache, "disable the score cache");
  }

  aesrt::RunConfig resolve() const {
    aesrt::RunConfig base;
    if (!config.empty()) base = aesrt::load_config(config);
    json patch = json::object();
    if (!corpus.empty()) patch["corpus_path"] = corpus;
    if (!corpus_format.empty()) patch["corpus_format"] = corpus_format;
    if (!manifest.empty()) patch["prompt_manifest"] = manifest;
    if (!score_column.empty()) patch["score_column"] = score_column;
    if (!resources.empty()) patch["resource_dir"] = resources;
    if (!scorers.empty()) {
      json list = json::array();
      for (const auto& s : scorers) {
        auto [id, uri] = split_assignment(s, "--scorer");
        list.push_back({{"id", id}, {"uri", uri}});
      }
      patch["scorers"] = list;
    }
    if (!tests.empty()) patch["tests"] = split_commas(tests);
    if (!c1.empty()) {
      json list = json::array();
      for (const auto& v : split_commas(c1)) {
        auto n = aesrt::detail::parse_int(v);
        if (!n) throw aesrt::ConfigError("bad --c1 value: " + v);
        list.push_back(*n);
      }
      patch["c1_values"] = list;
    }
    if (!c2.empty()) patch["c2_values"] = split_commas(c2);
    if (!bounded.empty()) {
      json list = json::array();
      for (const auto& v : split_commas(bounded)) {
        if (v != "true" && v != "false") throw aesrt::ConfigError("--bounded takes true or false");
        list.push_back(v == "true");
      }
      patch["bounded_modes"] = list;
    }
    if (!formats.empty()) patch["formats"] = split_commas(formats);
    if (seed) patch["seed"] = *seed;
    if (workers) patch["workers"] = *workers;
    if (!out.empty()) patch["output_dir"] = out;
    if (!mu.empty()) patch["mu_denominator"] = mu;
    if (!grammar.empty()) patch["grammar_mode"] = grammar;
    if (no_cache) patch["cache"] = false;
    auto c = aesrt::config_from_json(patch, std::move(base));
    aesrt::validate_config(c);
    return c;
  }
};

std::map<aesrt::TestKind, double> parse_drops(const std::vector<std::string>& items, const std::string& summary_path) {
  std::map<aesrt::TestKind, double> out = aesrt::default_drop_pct();
  if (!summary_path.empty()) {
    std::ifstream in(summary_path);
    if (!in) throw aesrt::ConfigError("cannot open survey summary " + summary_path);
    const auto j = json::parse(in);
    for (const auto& t : j.at("tests")) {
      auto k = aesrt::parse_test_kind(t.at("test").get<std::string>());
      if (k) out[*k] = t.at("score_drop_pct").get<double>();
    }
  }
  for (const auto& item : items) {
    auto [name, value] = split_assignment(item, "--drop");
    auto k = aesrt::parse_test_kind(name);
    if (!k) throw aesrt::ConfigError("unknown test: " + name);
    try {
      out[*k] = std::stod(value);
    } catch (const std::exception&) {
      throw aesrt::ConfigError("bad --drop value: " + item);
    }
  }
  return out;
}

aesrt::TrainsetSpec trainset_spec(const std::vector<std::string>& tests, const std::vector<std::string>& drops,
                                  const std::string& summary, const std::string& mix) {
  aesrt::TrainsetSpec s;
  for (const auto& t : split_commas(tests)) {
    auto k = aesrt::parse_test_kind(t);
    if (!k) throw aesrt::ConfigError("unknown test: " + t);
    s.tests.push_back(*k);
  }
  s.drop_pct = parse_drops(drops, summary);
  if (!mix.empty()) {
    const auto colon = mix.find(':');
    auto a = aesrt::detail::parse_int(mix.substr(0, colon));
    auto b = colon == std::string::npos ? std::nullopt : aesrt::detail::parse_int(mix.substr(colon + 1));
    if (!a || !b) throw aesrt::ConfigError("--mix must look like a:b");
    s.mix_original = *a;
    s.mix_adversarial = *b;
  }
  aesrt::validate_trainset_spec(s);
  return s;
}

std::vector<aesrt::VariantRecord> read_variants(const fs::path& path, const aesrt::Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw aesrt::Error("cannot open adversarial corpus " + path.string());
  std::map<std::string, std::string> prompt_of;
  for (const auto& r : corpus.responses) prompt_of[r.id] = r.prompt_id;
  std::vector<aesrt::VariantRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (aesrt::trim(line).empty()) continue;
    try {
      const auto j = json::parse(line);
      aesrt::VariantRecord v;
      v.response_id = j.at("original_id").get<std::string>();
      auto p = prompt_of.find(v.response_id);
      if (p == prompt_of.end()) throw aesrt::Error("unknown original_id " + v.response_id);
      v.prompt_id = p->second;
      auto t = aesrt::parse_test_kind(j.at("test").get<std::string>());
      auto c2 = aesrt::parse_position(j.at("c2").get<std::string>());
      if (!t || !c2) throw aesrt::Error("bad test or c2");
      v.spec.test = *t;
      v.spec.c1 = j.at("c1").get<int>();
      v.spec.c2 = *c2;
      v.spec.bounded = j.at("bounded").get<bool>();
      v.spec.seed = j.at("seed").get<std::uint64_t>();
      v.text = j.at("text").get<std::string>();
      out.push_back(std::move(v));
    } catch (const std::exception& e) {
      throw aesrt::Error(path.string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

json record_to_json(const aesrt::ScoreRecord& r) {
  json j = {{"scorer_id", r.scorer_id},   {"response_id", r.response_id}, {"raw_score", r.raw_score},
            {"normalized", r.normalized}, {"clamped", r.clamped}};
  j["variant"] = r.variant ? json(aesrt::Digest{}.add(*r.variant).hex()) : json(nullptr);
  return j;
}

int cmd_ingest(const RunFlags& f, const std::string& out_path, bool lenient) {
  if (f.corpus.empty() || f.manifest.empty()) throw aesrt::ConfigError("ingest needs --corpus and --manifest");
  auto fmt = aesrt::parse_corpus_format(f.corpus_format.empty() ? "asap_tsv" : f.corpus_format);
  if (!fmt) throw aesrt::ConfigError("unknown corpus format: " + f.corpus_format);
  aesrt::LoadOptions opts;
  opts.strict = !lenient;
  if (!f.score_column.empty()) opts.score_column = f.score_column;
  auto res = aesrt::load_corpus_with_diagnostics(f.corpus, *fmt, f.manifest, opts);
  for (const auto& d : res.rejected) std::cerr << "rejected row " << d.row << ": " << d.message << "\n";
  const fs::path out = out_path.empty() ? fs::path("corpus.jsonl") : fs::path(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  fs::path manifest = out;
  manifest.replace_extension(".prompts.json");
  aesrt::save_corpus(res.corpus, out, manifest);
  std::cout << "ingested " << res.corpus.responses.size() << " responses, " << res.corpus.prompts.size()
            << " prompts, rejected " << res.rejected.size() << " -> " << out.string() << "\n";
  return 0;
}

int cmd_perturb(const aesrt::RunConfig& c) {
  const auto corpus = aesrt::load_config_corpus(c);
  const auto pack = aesrt::load_config_pack(c);
  auto [variants, failures] = aesrt::generate_variants(c, corpus, pack);
  const fs::path dir(c.output_dir);
  aesrt::write_text_file(dir / "adversarial.jsonl", aesrt::adversarial_corpus_jsonl(variants));
  aesrt::write_text_file(dir / "failures.jsonl", aesrt::failures_jsonl(failures));
  std::cout << "wrote " << variants.size() << " variants, " << failures.size() << " perturbation failures to "
            << dir.string() << "\n";
  return 0;
}

int cmd_score(const aesrt::RunConfig& c, const std::string& adversarial) {
  const auto corpus = aesrt::load_config_corpus(c);
  std::vector<aesrt::ScoreRequest> requests;
  std::map<std::string, std::vector<std::pair<std::string, std::optional<std::uint64_t>>>> origin;
  auto add = [&](const std::string& id, std::optional<std::uint64_t> variant, const std::string& prompt_id,
                 const std::string& text) {
    const auto key = aesrt::text_key(prompt_id, text);
    auto& slot = origin[key];
    if (slot.empty()) requests.push_back({key, prompt_id, text});
    slot.emplace_back(id, variant);
  };
  for (const auto& r : corpus.responses) add(r.id, std::nullopt, r.prompt_id, r.text);
  if (!adversarial.empty())
    for (const auto& v : read_variants(adversarial, corpus)) add(v.response_id, v.spec.digest(), v.prompt_id, v.text);
  const fs::path dir(c.output_dir);
  std::string records, failures;
  for (const auto& sc : c.scorers) {
    auto adapter = aesrt::make_adapter(sc.uri, corpus, sc.options);
    for (std::size_t lo = 0; lo < requests.size(); lo += c.batch_size) {
      const auto span = std::span<const aesrt::ScoreRequest>(requests).subspan(lo, std::min(c.batch_size, requests.size() - lo));
      auto batch = aesrt::score_records(*adapter, sc.id, corpus.prompts, span);
      for (const auto& r : batch.records) {
        for (const auto& [id, variant] : origin.at(r.response_id)) {
          auto copy = r;
          copy.response_id = id;
          copy.variant = variant;
          records += record_to_json(copy).dump() + "\n";
        }
      }
      for (const auto& fl : batch.failures)
        failures += json{{"stage", "score"}, {"scorer_id", sc.id}, {"id", fl.id}, {"reason", fl.reason}}.dump() + "\n";
    }
  }
  aesrt::write_text_file(dir / "scores.jsonl", records);
  aesrt::write_text_file(dir / "score_failures.jsonl", failures);
  std::cout << "scored " << requests.size() << " texts with " << c.scorers.size() << " scorer(s) -> "
            << (dir / "scores.jsonl").string() << "\n";
  return 0;
}

int cmd_eval(const aesrt::RunConfig& c) {
  const auto result = aesrt::run_sweep(c);
  std::cout << "reports: " << result.bundle.reports.size() << ", variants: " << result.variants.size()
            << ", perturb failures: " << result.bundle.failures.perturb
            << ", scoring failures: " << result.bundle.failures.scoring
            << ", clamped: " << result.bundle.failures.clamped << ", cache hits: " << result.cache_hits << " -> "
            << c.output_dir << "\n";
  return 0;
}

aesrt::ReportBundle bundle_from_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw aesrt::Error("cannot open reports " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  aesrt::ReportBundle b;
  b.reports = aesrt::reports_from_csv(ss.str());
  aesrt::compute_aggregates(b);
  return b;
}

int cmd_report(const std::string& from, const aesrt::RunConfig& c) {
  const auto files = aesrt::emit_report(bundle_from_csv(from), c.formats, c.output_dir);
  for (const auto& f : files) std::cout << f.string() << "\n";
  return 0;
}

int cmd_babel_probe(const aesrt::RunConfig& c, const std::vector<std::string>& keyword_args, const std::string& out) {
  const auto corpus = aesrt::load_config_corpus(c);
  const auto pack = aesrt::load_config_pack(c);
  std::map<std::string, std::vector<std::string>> keywords;
  for (const auto& k : keyword_args) {
    auto [prompt, list] = split_assignment(k, "--keywords");
    keywords[prompt] = split_commas({list});
  }
  const auto csv = aesrt::babel_probe_csv(aesrt::babel_probe(corpus, pack, c.scorers, keywords, c.seed, c.babel_word_target));
  if (out.empty()) std::cout << csv;
  else aesrt::write_text_file(out, csv);
  return 0;
}

int cmd_trainset(const aesrt::RunConfig& c, const aesrt::TrainsetSpec& spec, const std::string& out) {
  const auto corpus = aesrt::load_config_corpus(c);
  const auto pack = aesrt::load_config_pack(c);
  const auto records = aesrt::emit_trainset(corpus, pack, spec, c.seed);
  const fs::path path = out.empty() ? fs::path(c.output_dir) / "trainset.jsonl" : fs::path(out);
  aesrt::write_text_file(path, aesrt::trainset_jsonl(records));
  std::cout << "wrote " << records.size() << " training records -> " << path.string() << "\n";
  return 0;
}

int cmd_adv_train(const aesrt::RunConfig& c, const aesrt::TrainsetSpec& spec, double lambda, const std::string& out) {
  const auto corpus = aesrt::load_config_corpus(c);
  const auto pack = aesrt::load_config_pack(c);
  const auto res = aesrt::adversarial_training_experiment(corpus, pack, spec, c.seed, lambda, c.mu_denominator);
  const auto csv = aesrt::adv_train_csv(res);
  if (out.empty()) std::cout << csv;
  else aesrt::write_text_file(out, csv);
  return 0;
}

int cmd_survey_pairs(const aesrt::RunConfig& c, const std::string& reports, std::size_t per_case, const std::string& out) {
  const auto corpus = aesrt::load_config_corpus(c);
  const auto pack = aesrt::load_config_pack(c);
  const auto flagged = aesrt::select_survey_cases(bundle_from_csv(reports).reports);
  const auto pairs = aesrt::build_survey_pairs(corpus, pack, flagged, c.seed, per_case);
  std::string text;
  for (const auto& p : pairs) text += aesrt::pair_to_json(p).dump() + "\n";
  const fs::path path = out.empty() ? fs::path(c.output_dir) / "survey_pairs.jsonl" : fs::path(out);
  aesrt::write_text_file(path, text);
  std::cout << flagged.size() << " flagged keys, " << pairs.size() << " pairs -> " << path.string() << "\n";
  return 0;
}

httplib::Server* g_server = nullptr;

int cmd_survey_serve(const std::string& pairs, const std::string& log, const std::string& host, int port,
                     const std::string& static_dir, std::uint64_t seed) {
  aesrt::SurveyService service(aesrt::load_survey_pairs(pairs), log, seed);
  httplib::Server server;
  service.mount(server, static_dir);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  if (!server.bind_to_port(host, port)) {
    std::cerr << "error: cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  std::cout << "survey on http://" << host << ":" << port << " with " << service.pairs().size() << " pairs, "
            << service.annotations() << " existing annotations" << std::endl;
  server.listen_after_bind();
  return 0;
}

int cmd_survey_summarize(const std::string& pairs_path, const std::string& log, const std::string& reports,
                         const std::string& out) {
  const auto pairs = aesrt::index_pairs(aesrt::load_survey_pairs(pairs_path));
  const auto annotations = aesrt::replay_annotations(log);
  const auto summary = aesrt::summarize(annotations, pairs);
  json doc = aesrt::summary_to_json(summary);
  if (!reports.empty()) {
    json rows = json::array();
    for (const auto& r : aesrt::human_machine_divergence(summary, bundle_from_csv(reports).reports)) {
      rows.push_back({{"scorer_id", r.scorer_id},
                      {"test", aesrt::to_string(r.test)},
                      {"human_drop_pct", r.human_drop_pct},
                      {"machine_drop_pct", r.machine_drop_pct},
                      {"divergence", r.divergence}});
    }
    doc["divergence"] = rows;
  }
  if (out.empty()) std::cout << doc.dump(2) << "\n";
  else aesrt::write_text_file(out, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aesrt: robustness testing for automated essay scorers"};
  app.require_subcommand(1);

  RunFlags ingest_f, perturb_f, score_f, eval_f, report_f, babel_f, trainset_f, adv_f, pairs_f;

  auto* ingest = app.add_subcommand("ingest", "validate a corpus and write it in native form");
  ingest_f.attach(ingest);
  std::string ingest_out;
  bool lenient = false;
  ingest->add_option("-o,--output", ingest_out, "native .jsonl output path");
  ingest->add_flag("--lenient", lenient, "drop invalid rows instead of rejecting the file");

  auto* perturb = app.add_subcommand("perturb", "write the adversarial corpus for the configured grid");
  perturb_f.attach(perturb);

  auto* score = app.add_subcommand("score", "score originals, and optionally an adversarial corpus");
  score_f.attach(score);
  std::string adversarial;
  score->add_option("--adversarial", adversarial, "adversarial.jsonl to score as well");

  auto* eval = app.add_subcommand("eval", "run the full sweep and write every report");
  eval_f.attach(eval);

  auto* report = app.add_subcommand("report", "re-render report files from a reports.csv");
  report_f.attach(report);
  std::string report_from;
  report->add_option("--from", report_from, "reports.csv written by eval")->required();

  auto* babel = app.add_subcommand("babel-probe", "score one Babel essay per prompt");
  babel_f.attach(babel);
  std::vector<std::string> keywords;
  std::string babel_out;
  babel->add_option("--keywords", keywords, "prompt_id=w1,w2,w3, repeatable");
  babel->add_option("-o,--output", babel_out, "CSV path (default: stdout)");

  std::vector<std::string> ts_tests, ts_drops, adv_tests, adv_drops;
  std::string ts_summary, ts_mix, ts_out, adv_summary, adv_mix, adv_out;
  double lambda = 1.0;

  auto* trainset = app.add_subcommand("trainset", "emit an adversarial training set");
  trainset_f.attach(trainset);
  trainset->add_option("--train-tests", ts_tests, "comma-separated tests to include")->required();
  trainset->add_option("--drop", ts_drops, "Test=percent, repeatable");
  trainset->add_option("--survey-summary", ts_summary, "summary JSON supplying drop percentages");
  trainset->add_option("--mix", ts_mix, "original:adversarial ratio, default 1:1");
  trainset->add_option("-o,--output", ts_out, "output .jsonl");

  auto* adv = app.add_subcommand("adv-train", "compare original and adversarially trained baselines");
  adv_f.attach(adv);
  adv->add_option("--train-tests", adv_tests, "comma-separated tests to train on")->required();
  adv->add_option("--drop", adv_drops, "Test=percent, repeatable");
  adv->add_option("--survey-summary", adv_summary, "summary JSON supplying drop percentages");
  adv->add_option("--mix", adv_mix, "original:adversarial ratio, default 1:1");
  adv->add_option("--lambda", lambda, "ridge strength");
  adv->add_option("-o,--output", adv_out, "CSV path (default: stdout)");

  auto* survey = app.add_subcommand("survey", "human annotation survey");
  survey->require_subcommand(1);

  auto* pairs = survey->add_subcommand("pairs", "build survey pairs from flagged report keys");
  pairs_f.attach(pairs);
  std::string pairs_reports, pairs_out;
  std::size_t per_case = 5;
  pairs->add_option("--reports", pairs_reports, "reports.csv written by eval")->required();
  pairs->add_option("--per-case", per_case, "pairs per flagged (test, prompt)");
  pairs->add_option("-o,--output", pairs_out, "pairs .jsonl");

  auto* serve = survey->add_subcommand("serve", "run the survey service");
  std::string serve_pairs, serve_log = "annotations.jsonl", host = "127.0.0.1", static_dir;
  int port = 8080;
  std::uint64_t serve_seed = 0;
  serve->add_option("--pairs", serve_pairs, "pairs .jsonl")->required();
  serve->add_option("--log", serve_log, "annotations.jsonl path");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "bind port");
  serve->add_option("--static", static_dir, "UI asset directory served at /");
  serve->add_option("--seed", serve_seed, "session token seed");

  auto* summarize = survey->add_subcommand("summarize", "aggregate an annotation log");
  std::string sum_pairs, sum_log = "annotations.jsonl", sum_reports, sum_out;
  summarize->add_option("--pairs", sum_pairs, "pairs .jsonl")->required();
  summarize->add_option("--log", sum_log, "annotations.jsonl path");
  summarize->add_option("--reports", sum_reports, "reports.csv for the human/machine comparison");
  summarize->add_option("-o,--output", sum_out, "summary JSON path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(ingest_f, ingest_out, lenient);
    if (*perturb) return cmd_perturb(perturb_f.resolve());
    if (*score) return cmd_score(score_f.resolve(), adversarial);
    if (*eval) return cmd_eval(eval_f.resolve());
    if (*report) return cmd_report(report_from, report_f.resolve());
    if (*babel) return cmd_babel_probe(babel_f.resolve(), keywords, babel_out);
    if (*trainset) return cmd_trainset(trainset_f.resolve(), trainset_spec(ts_tests, ts_drops, ts_summary, ts_mix), ts_out);
    if (*adv) return cmd_adv_train(adv_f.resolve(), trainset_spec(adv_tests, adv_drops, adv_summary, adv_mix), lambda, adv_out);
    if (*pairs) return cmd_survey_pairs(pairs_f.resolve(), pairs_reports, per_case, pairs_out);
    if (*serve) return cmd_survey_serve(serve_pairs, serve_log, host, port, static_dir, serve_seed);
    if (*summarize) return cmd_survey_summarize(sum_pairs, sum_log, sum_reports, sum_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
