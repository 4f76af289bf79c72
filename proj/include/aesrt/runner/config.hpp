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

// RunConfig and its JSON form. See docs/config.md for the schema.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aesrt/corpus.hpp"
#include "aesrt/error.hpp"
#include "aesrt/metrics.hpp"
#include "aesrt/perturb/spec.hpp"
#include "aesrt/resources.hpp"
#include "aesrt/sample_corpus.hpp"
#include "aesrt/scorer/adapter.hpp"

namespace aesrt {

struct ScorerConfig {
  std::string id;
  std::string uri;
  AdapterOptions options;

  bool operator==(const ScorerConfig& o) const {
    return id == o.id && uri == o.uri && options.timeout == o.options.timeout &&
           options.max_in_flight == o.options.max_in_flight;
  }
};

enum class ReportFormat { Csv, Json, Svg };

struct RunConfig {
  std::string corpus_path;  // empty: bundled sample corpus
  CorpusFormat corpus_format = CorpusFormat::NativeJsonl;
  std::string prompt_manifest;  // required with corpus_path
  std::string score_column = "domain1_score";
  std::string resource_dir;  // empty: bundled pack
  std::vector<ScorerConfig> scorers = {{"baseline", "baseline:", {}}};
  std::vector<TestKind> tests = {kAllTests.begin(), kAllTests.end()};
  std::vector<int> c1_values = {kC1Values.begin(), kC1Values.end()};
  std::vector<Position> c2_values = {Position::Start, Position::Mid, Position::End};
  std::vector<bool> bounded_modes = {false, true};
  std::uint64_t seed = 20240101;
  std::string output_dir = "aesrt-out";
  bool cache = true;
  std::size_t workers = 0;  // 0: available parallelism
  std::size_t batch_size = 256;
  MuDenominator mu_denominator = MuDenominator::Impacted;
  std::optional<GrammarMode> grammar_mode;
  int babel_word_target = 500;
  std::vector<ReportFormat> formats = {ReportFormat::Csv, ReportFormat::Json, ReportFormat::Svg};
  bool write_adversarial_corpus = true;

  bool operator==(const RunConfig&) const = default;
};

inline std::string_view to_string(ReportFormat f) noexcept {
  switch (f) {
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Json: return "json";
    case ReportFormat::Svg: break;
  }
  return "svg";
}

inline std::string_view to_string(MuDenominator d) noexcept {
  return d == MuDenominator::Impacted ? "impacted" : "total";
}

inline std::string_view to_string(CorpusFormat f) noexcept {
  return f == CorpusFormat::AsapTsv ? "asap_tsv" : "native_jsonl";
}

/// Throws ConfigError on the first problem found.
inline void validate_config(const RunConfig& c) {
  if (c.tests.empty()) throw ConfigError("config selects no tests");
  if (c.scorers.empty()) throw ConfigError("config selects no scorers");
  if (c.c1_values.empty()) throw ConfigError("config selects no c1 values");
  if (c.c2_values.empty()) throw ConfigError("config selects no c2 values");
  if (c.bounded_modes.empty()) throw ConfigError("config selects no bounded modes");
  for (int v : c.c1_values)
    if (!valid_c1(v)) throw ConfigError("c1 value " + std::to_string(v) + " is not one of 5, 10, 15, 20, 25");
  std::set<std::string> ids;
  for (const auto& s : c.scorers) {
    if (s.id.empty()) throw ConfigError("scorer with empty id");
    if (s.id.find_first_of(",\"\n") != std::string::npos) throw ConfigError("scorer id may not contain , \" or newline");
    if (!ids.insert(s.id).second) throw ConfigError("duplicate scorer id " + s.id);
    if (s.uri.empty()) throw ConfigError("scorer " + s.id + " has no uri");
    if (s.options.timeout.count() <= 0) throw ConfigError("scorer " + s.id + " has a non-positive timeout");
  }
  std::set<TestKind> tests(c.tests.begin(), c.tests.end());
  if (tests.size() != c.tests.size()) throw ConfigError("config lists a test twice");
  if (!c.corpus_path.empty() && c.prompt_manifest.empty())
    throw ConfigError("corpus_path needs a prompt_manifest");
  if (c.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (c.babel_word_target < 50) throw ConfigError("babel_word_target must be at least 50");
  if (c.output_dir.empty()) throw ConfigError("output_dir is empty");
}

namespace detail {

template <typename T, typename Parse>
std::vector<T> parse_list(const nlohmann::json& j, const char* field, Parse parse) {
  if (!j.is_array()) throw ConfigError(std::string(field) + " must be an array");
  std::vector<T> out;
  for (const auto& item : j) out.push_back(parse(item));
  return out;
}

}  // namespace detail

/// Fields missing from `j` keep the values already in `base`.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {}) {
  if (!j.is_object()) throw ConfigError("config must be an object");
  static const std::set<std::string> kKnown = {
      "corpus_path", "corpus_format", "prompt_manifest", "score_column", "resource_dir", "scorers", "tests",
      "c1_values",   "c2_values",     "bounded_modes",   "seed",         "output_dir",   "cache",   "workers",
      "batch_size",  "mu_denominator", "grammar_mode",   "babel_word_target", "formats", "write_adversarial_corpus"};
  for (const auto& [k, v] : j.items())
    if (!kKnown.count(k)) throw ConfigError("unknown config key: " + k);
  RunConfig c = std::move(base);
  try {
    if (j.contains("corpus_path")) c.corpus_path = j["corpus_path"].get<std::string>();
    if (j.contains("corpus_format")) {
      auto f = parse_corpus_format(j["corpus_format"].get<std::string>());
      if (!f) throw ConfigError("unknown corpus_format");
      c.corpus_format = *f;
    }
    if (j.contains("prompt_manifest")) c.prompt_manifest = j["prompt_manifest"].get<std::string>();
    if (j.contains("score_column")) c.score_column = j["score_column"].get<std::string>();
    if (j.contains("resource_dir")) c.resource_dir = j["resource_dir"].get<std::string>();
    if (j.contains("scorers")) {
      c.scorers = detail::parse_list<ScorerConfig>(j["scorers"], "scorers", [](const nlohmann::json& s) {
        ScorerConfig sc;
        sc.id = s.at("id").get<std::string>();
        sc.uri = s.at("uri").get<std::string>();
        if (s.contains("timeout_ms")) sc.options.timeout = std::chrono::milliseconds(s["timeout_ms"].get<long>());
        if (s.contains("max_in_flight")) sc.options.max_in_flight = s["max_in_flight"].get<std::size_t>();
        return sc;
      });
    }
    if (j.contains("tests")) {
      c.tests = detail::parse_list<TestKind>(j["tests"], "tests", [](const nlohmann::json& t) {
        auto k = parse_test_kind(t.get<std::string>());
        if (!k) throw ConfigError("unknown test: " + t.get<std::string>());
        return *k;
      });
    }
    if (j.contains("c1_values"))
      c.c1_values = detail::parse_list<int>(j["c1_values"], "c1_values", [](const nlohmann::json& v) { return v.get<int>(); });
    if (j.contains("c2_values")) {
      c.c2_values = detail::parse_list<Position>(j["c2_values"], "c2_values", [](const nlohmann::json& v) {
        auto p = parse_position(v.get<std::string>());
        if (!p) throw ConfigError("unknown c2 value: " + v.get<std::string>());
        return *p;
      });
    }
    if (j.contains("bounded_modes"))
      c.bounded_modes = detail::parse_list<bool>(j["bounded_modes"], "bounded_modes", [](const nlohmann::json& v) { return v.get<bool>(); });
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("cache")) c.cache = j["cache"].get<bool>();
    if (j.contains("workers")) c.workers = j["workers"].get<std::size_t>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<std::size_t>();
    if (j.contains("mu_denominator")) {
      const auto s = j["mu_denominator"].get<std::string>();
      if (s == "impacted") c.mu_denominator = MuDenominator::Impacted;
      else if (s == "total") c.mu_denominator = MuDenominator::Total;
      else throw ConfigError("mu_denominator must be \"impacted\" or \"total\"");
    }
    if (j.contains("grammar_mode")) {
      if (j["grammar_mode"].is_null()) {
        c.grammar_mode.reset();
      } else {
        auto m = parse_grammar_mode(j["grammar_mode"].get<std::string>());
        if (!m) throw ConfigError("unknown grammar_mode");
        c.grammar_mode = *m;
      }
    }
    if (j.contains("babel_word_target")) c.babel_word_target = j["babel_word_target"].get<int>();
    if (j.contains("formats")) {
      c.formats = detail::parse_list<ReportFormat>(j["formats"], "formats", [](const nlohmann::json& v) {
        const auto s = v.get<std::string>();
        if (s == "csv") return ReportFormat::Csv;
        if (s == "json" || s == "structured") return ReportFormat::Json;
        if (s == "svg") return ReportFormat::Svg;
        throw ConfigError("unknown report format: " + s);
      });
    }
    if (j.contains("write_adversarial_corpus")) c.write_adversarial_corpus = j["write_adversarial_corpus"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["corpus_path"] = c.corpus_path;
  j["corpus_format"] = to_string(c.corpus_format);
  j["prompt_manifest"] = c.prompt_manifest;
  j["score_column"] = c.score_column;
  j["resource_dir"] = c.resource_dir;
  j["scorers"] = nlohmann::json::array();
  for (const auto& s : c.scorers)
    j["scorers"].push_back({{"id", s.id},
                            {"uri", s.uri},
                            {"timeout_ms", s.options.timeout.count()},
                            {"max_in_flight", s.options.max_in_flight}});
  j["tests"] = nlohmann::json::array();
  for (auto t : c.tests) j["tests"].push_back(to_string(t));
  j["c1_values"] = c.c1_values;
  j["c2_values"] = nlohmann::json::array();
  for (auto p : c.c2_values) j["c2_values"].push_back(to_string(p));
  j["bounded_modes"] = c.bounded_modes;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["cache"] = c.cache;
  j["workers"] = c.workers;
  j["batch_size"] = c.batch_size;
  j["mu_denominator"] = to_string(c.mu_denominator);
  j["grammar_mode"] = c.grammar_mode ? nlohmann::json(to_string(*c.grammar_mode)) : nlohmann::json(nullptr);
  j["babel_word_target"] = c.babel_word_target;
  j["formats"] = nlohmann::json::array();
  for (auto f : c.formats) j["formats"].push_back(to_string(f));
  j["write_adversarial_corpus"] = c.write_adversarial_corpus;
  return j;
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::move(base));
}

/// The corpus a config points at (the bundled sample when none is given).
inline Corpus load_config_corpus(const RunConfig& c) {
  if (c.corpus_path.empty()) return bundled_sample_corpus();
  LoadOptions opts;
  opts.score_column = c.score_column;
  return load_corpus(c.corpus_path, c.corpus_format, c.prompt_manifest, opts);
}

inline ResourcePack load_config_pack(const RunConfig& c) {
  return load_resource_pack(c.resource_dir.empty() ? default_resource_dir() : std::filesystem::path(c.resource_dir));
}

}  // namespace aesrt
