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

// Prompt/response datasets: ASAP-style TSV and native line-delimited JSON.
//
// ASAP TSV rows carry only an essay_set id, so prompt metadata (score range,
// kind, reading passage) always comes from a separate prompt manifest.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aesrt/error.hpp"
#include "aesrt/textops.hpp"

namespace aesrt {

using json = nlohmann::json;

enum class PromptKind { Argumentative, ReadingComprehension, Narrative };

inline std::string_view to_string(PromptKind k) noexcept {
  switch (k) {
    case PromptKind::Argumentative: return "Argumentative";
    case PromptKind::ReadingComprehension: return "ReadingComprehension";
    case PromptKind::Narrative: break;
  }
  return "Narrative";
}

inline std::optional<PromptKind> parse_prompt_kind(std::string_view s) noexcept {
  if (s == "Argumentative") return PromptKind::Argumentative;
  if (s == "ReadingComprehension") return PromptKind::ReadingComprehension;
  if (s == "Narrative") return PromptKind::Narrative;
  return std::nullopt;
}

struct Prompt {
  std::string id;
  std::string question_text;
  std::optional<std::string> reading_passage;
  int score_min = 0;
  int score_max = 1;
  PromptKind kind = PromptKind::Argumentative;

  int range_width() const noexcept { return score_max - score_min; }
  bool in_range(double s) const noexcept { return s >= score_min && s <= score_max; }
  bool operator==(const Prompt&) const = default;
};

struct Response {
  std::string id;
  std::string prompt_id;
  std::string text;
  std::optional<int> human_score;

  bool operator==(const Response&) const = default;
};

struct Corpus {
  std::map<std::string, Prompt> prompts;
  std::vector<Response> responses;

  const Prompt& prompt(const std::string& id) const {
    auto it = prompts.find(id);
    if (it == prompts.end()) throw Error("unknown prompt id: " + id);
    return it->second;
  }
  const Prompt& prompt_of(const Response& r) const { return prompt(r.prompt_id); }

  std::vector<const Response*> responses_for(const std::string& prompt_id) const {
    std::vector<const Response*> out;
    for (const auto& r : responses)
      if (r.prompt_id == prompt_id) out.push_back(&r);
    return out;
  }

  bool operator==(const Corpus&) const = default;
};

enum class CorpusFormat { AsapTsv, NativeJsonl };

inline std::optional<CorpusFormat> parse_corpus_format(std::string_view s) noexcept {
  if (s == "asap_tsv") return CorpusFormat::AsapTsv;
  if (s == "native_jsonl") return CorpusFormat::NativeJsonl;
  return std::nullopt;
}

// --- validation ---------------------------------------------------------------

/// Structural check of one prompt; returns an empty string when valid.
inline std::string validate_prompt(const Prompt& p) {
  if (p.id.empty()) return "prompt id is empty";
  if (p.score_min >= p.score_max) return "prompt " + p.id + ": score_min must be < score_max";
  const bool rc = p.kind == PromptKind::ReadingComprehension;
  if (rc && (!p.reading_passage || trim(*p.reading_passage).empty()))
    return "prompt " + p.id + ": reading comprehension prompt needs a reading_passage";
  if (!rc && p.reading_passage) return "prompt " + p.id + ": reading_passage is only allowed for ReadingComprehension";
  return {};
}

inline std::string validate_response(const Response& r, const std::map<std::string, Prompt>& prompts) {
  if (r.id.empty()) return "response id is empty";
  auto it = prompts.find(r.prompt_id);
  if (it == prompts.end()) return "response " + r.id + ": unknown prompt id '" + r.prompt_id + "'";
  if (trim(r.text).empty()) return "response " + r.id + ": text is empty";
  if (r.human_score && !it->second.in_range(*r.human_score))
    return "response " + r.id + ": human_score " + std::to_string(*r.human_score) + " outside range [" +
           std::to_string(it->second.score_min) + ", " + std::to_string(it->second.score_max) + "]";
  return {};
}

namespace detail {

inline bool valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    if (c < 0x80) len = 1;
    else if ((c >> 5) == 0x6) len = 2;
    else if ((c >> 4) == 0xe) len = 3;
    else if ((c >> 3) == 0x1e) len = 4;
    else return false;
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    i += len;
  }
  return true;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

inline std::optional<int> parse_int(std::string_view s) noexcept {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t b = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      out.push_back(line.substr(b, i - b));
      b = i + 1;
    }
  }
  return out;
}

}  // namespace detail

// --- prompt manifest ----------------------------------------------------------

inline json prompt_to_json(const Prompt& p) {
  json j = {{"id", p.id},
            {"question_text", p.question_text},
            {"score_min", p.score_min},
            {"score_max", p.score_max},
            {"kind", to_string(p.kind)}};
  if (p.reading_passage) j["reading_passage"] = *p.reading_passage;
  return j;
}

inline Prompt prompt_from_json(const json& j) {
  Prompt p;
  p.id = j.at("id").get<std::string>();
  p.question_text = j.at("question_text").get<std::string>();
  if (auto it = j.find("reading_passage"); it != j.end() && !it->is_null())
    p.reading_passage = it->get<std::string>();
  p.score_min = j.at("score_min").get<int>();
  p.score_max = j.at("score_max").get<int>();
  const auto kind = parse_prompt_kind(j.at("kind").get<std::string>());
  if (!kind) throw LoadError("prompt " + p.id + ": unknown kind " + j.at("kind").dump());
  p.kind = *kind;
  return p;
}

/// Parses a manifest document: {"prompts": [Prompt, ...]}.
inline std::map<std::string, Prompt> parse_prompt_manifest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw LoadError(std::string("prompt manifest is not valid JSON: ") + e.what());
  }
  std::map<std::string, Prompt> prompts;
  std::vector<Diagnostic> diags;
  const json& list = doc.contains("prompts") ? doc.at("prompts") : doc;
  if (!list.is_array()) throw LoadError("prompt manifest must hold a \"prompts\" array");
  std::size_t row = 0;
  for (const auto& item : list) {
    ++row;
    try {
      Prompt p = prompt_from_json(item);
      if (auto err = validate_prompt(p); !err.empty()) {
        diags.push_back({row, err});
      } else if (!prompts.emplace(p.id, p).second) {
        diags.push_back({row, "duplicate prompt id " + p.id});
      }
    } catch (const json::exception& e) {
      diags.push_back({row, std::string("malformed prompt: ") + e.what()});
    } catch (const LoadError& e) {
      diags.push_back({row, e.what()});
    }
  }
  if (!diags.empty()) throw LoadError("invalid prompt manifest", std::move(diags));
  if (prompts.empty()) throw LoadError("prompt manifest has no prompts");
  return prompts;
}

inline std::map<std::string, Prompt> load_prompt_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open prompt manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_prompt_manifest(ss.str());
}

inline std::string dump_prompt_manifest(const std::map<std::string, Prompt>& prompts) {
  json list = json::array();
  for (const auto& [id, p] : prompts) list.push_back(prompt_to_json(p));
  return json{{"prompts", list}}.dump(2) + "\n";
}

// --- loading ------------------------------------------------------------------

struct LoadOptions {
  /// Reject the whole file when any row fails (default). When false the bad
  /// rows are dropped and reported through LoadResult::rejected.
  bool strict = true;
  /// ASAP column holding the human score. Double-scored essays are not
  /// reconciled; the designated column is taken as-is.
  std::string score_column = "domain1_score";
};

struct LoadResult {
  Corpus corpus;
  std::vector<Diagnostic> rejected;
};

namespace detail {

inline LoadResult finish_load(Corpus corpus, std::vector<Diagnostic> diags, std::size_t data_rows,
                              const LoadOptions& opts) {
  if (data_rows == 0) throw LoadError("empty file");
  if (!diags.empty() && opts.strict) {
    std::string what = "corpus has " + std::to_string(diags.size()) + " invalid row(s); first: row " +
                       std::to_string(diags.front().row) + ": " + diags.front().message;
    throw LoadError(what, std::move(diags));
  }
  return {std::move(corpus), std::move(diags)};
}

}  // namespace detail

inline LoadResult parse_asap_tsv(const std::vector<std::string>& lines, std::map<std::string, Prompt> prompts,
                                 const LoadOptions& opts = {}) {
  if (lines.empty()) throw LoadError("empty file");
  const auto header = detail::split_tabs(lines.front());
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (trim(header[i]) == name) return i;
    return std::nullopt;
  };
  const auto c_id = column("essay_id");
  const auto c_set = column("essay_set");
  const auto c_essay = column("essay");
  const auto c_score = column(opts.score_column);
  if (!c_id || !c_set || !c_essay || !c_score)
    throw LoadError("ASAP header must contain essay_id, essay_set, essay and " + opts.score_column);
  const std::size_t needed = std::max({*c_id, *c_set, *c_essay, *c_score}) + 1;

  Corpus corpus;
  corpus.prompts = std::move(prompts);
  std::vector<Diagnostic> diags;
  std::set<std::string> seen;
  std::size_t data_rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    if (trim(lines[i]).empty()) continue;
    ++data_rows;
    if (!detail::valid_utf8(lines[i])) {
      diags.push_back({row, "not valid UTF-8"});
      continue;
    }
    const auto cells = detail::split_tabs(lines[i]);
    if (cells.size() < needed) {
      diags.push_back({row, "missing column (expected at least " + std::to_string(needed) + ", got " +
                                std::to_string(cells.size()) + ")"});
      continue;
    }
    Response r;
    r.id = std::string(trim(cells[*c_id]));
    r.prompt_id = std::string(trim(cells[*c_set]));
    r.text = std::string(cells[*c_essay]);
    const auto score_cell = trim(cells[*c_score]);
    if (!score_cell.empty()) {
      auto v = detail::parse_int(score_cell);
      if (!v) {
        diags.push_back({row, "non-integer score '" + std::string(score_cell) + "'"});
        continue;
      }
      r.human_score = *v;
    }
    if (auto err = validate_response(r, corpus.prompts); !err.empty()) {
      diags.push_back({row, err});
      continue;
    }
    if (!seen.insert(r.id).second) {
      diags.push_back({row, "duplicate response id " + r.id});
      continue;
    }
    corpus.responses.push_back(std::move(r));
  }
  return detail::finish_load(std::move(corpus), std::move(diags), data_rows, opts);
}

inline json response_to_json(const Response& r) {
  json j = {{"id", r.id}, {"prompt_id", r.prompt_id}, {"text", r.text}};
  j["human_score"] = r.human_score ? json(*r.human_score) : json(nullptr);
  return j;
}

inline LoadResult parse_native_jsonl(const std::vector<std::string>& lines, std::map<std::string, Prompt> prompts,
                                     const LoadOptions& opts = {}) {
  Corpus corpus;
  corpus.prompts = std::move(prompts);
  std::vector<Diagnostic> diags;
  std::set<std::string> seen;
  std::size_t data_rows = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    if (trim(lines[i]).empty()) continue;
    ++data_rows;
    if (!detail::valid_utf8(lines[i])) {
      diags.push_back({row, "not valid UTF-8"});
      continue;
    }
    Response r;
    try {
      const json j = json::parse(lines[i]);
      r.id = j.at("id").get<std::string>();
      r.prompt_id = j.at("prompt_id").get<std::string>();
      r.text = j.at("text").get<std::string>();
      if (auto it = j.find("human_score"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) {
          diags.push_back({row, "non-integer score " + it->dump()});
          continue;
        }
        r.human_score = it->get<int>();
      }
    } catch (const json::exception& e) {
      diags.push_back({row, std::string("malformed row: ") + e.what()});
      continue;
    }
    if (auto err = validate_response(r, corpus.prompts); !err.empty()) {
      diags.push_back({row, err});
      continue;
    }
    if (!seen.insert(r.id).second) {
      diags.push_back({row, "duplicate response id " + r.id});
      continue;
    }
    corpus.responses.push_back(std::move(r));
  }
  return detail::finish_load(std::move(corpus), std::move(diags), data_rows, opts);
}

inline LoadResult load_corpus_with_diagnostics(const std::filesystem::path& path, CorpusFormat format,
                                               const std::filesystem::path& manifest_path,
                                               const LoadOptions& opts = {}) {
  if (!std::filesystem::exists(path)) throw LoadError("no such file: " + path.string());
  auto prompts = load_prompt_manifest(manifest_path);
  const auto lines = detail::read_lines(path);
  return format == CorpusFormat::AsapTsv ? parse_asap_tsv(lines, std::move(prompts), opts)
                                         : parse_native_jsonl(lines, std::move(prompts), opts);
}

/// Loads and validates a corpus. Throws LoadError listing every bad row.
inline Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                          const std::filesystem::path& manifest_path, const LoadOptions& opts = {}) {
  return load_corpus_with_diagnostics(path, format, manifest_path, opts).corpus;
}

inline std::string dump_native_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.responses) {
    out += response_to_json(r).dump();
    out += '\n';
  }
  return out;
}

/// Writes `<stem>.jsonl` responses and `<stem>.prompts.json` manifest.
inline void save_corpus(const Corpus& corpus, const std::filesystem::path& responses_path,
                        const std::filesystem::path& manifest_path) {
  std::ofstream r(responses_path, std::ios::binary);
  std::ofstream m(manifest_path, std::ios::binary);
  if (!r || !m) throw Error("cannot write corpus to " + responses_path.string());
  r << dump_native_jsonl(corpus);
  m << dump_prompt_manifest(corpus.prompts);
}

// --- normalization ------------------------------------------------------------

struct NormalizedScore {
  double raw = 0.0;      // after clamping
  double percent = 0.0;  // 0..100
  bool clamped = false;
};

/// Maps a score onto 0..100 of the prompt's range. Values outside the range
/// are clamped and flagged rather than rejected.
inline NormalizedScore normalize(double score, const Prompt& prompt) noexcept {
  NormalizedScore out;
  out.raw = score;
  if (std::isnan(score) || score < prompt.score_min) {
    out.raw = prompt.score_min;
    out.clamped = true;
  } else if (score > prompt.score_max) {
    out.raw = prompt.score_max;
    out.clamped = true;
  }
  out.percent = 100.0 * (out.raw - prompt.score_min) / static_cast<double>(prompt.range_width());
  return out;
}

inline double normalize_score(double score, const Prompt& prompt) noexcept { return normalize(score, prompt).percent; }

}  // namespace aesrt
