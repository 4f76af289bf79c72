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

// Local text pools that feed the Add, Modify and Generate perturbations.
//
// Directory layout (file names are fixed):
//   wiki.jsonl            {"topic_keys": [...], "sentences": [...]} per line
//   songs.txt             one line per row
//   speeches.txt          one line per row
//   facts.txt             one sentence per row
//   lies.txt              one sentence per row
//   synonyms.tsv          word<TAB>syn1,syn2,...
//   abbreviations.tsv     word<TAB>informal
//   babel_templates.txt   sentence patterns with {KW} and {OBSCURE} slots
//   babel_words.txt       one obscure word per row
//
// Lines starting with '#' and blank lines are ignored in the text files.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aesrt/error.hpp"
#include "aesrt/textops.hpp"

#ifndef AESRT_DEFAULT_RESOURCE_DIR
#define AESRT_DEFAULT_RESOURCE_DIR "resources/default"
#endif

namespace aesrt {

struct WikiArticle {
  std::vector<std::string> topic_keys;
  std::vector<std::string> sentences;

  bool operator==(const WikiArticle&) const = default;
};

struct BabelLexicon {
  std::vector<std::string> templates;
  std::vector<std::string> obscure_words;

  bool operator==(const BabelLexicon&) const = default;
};

struct ResourcePack {
  std::vector<WikiArticle> wiki_articles;
  std::vector<std::string> songs;
  std::vector<std::string> speeches;
  std::vector<std::string> facts;
  std::vector<std::string> lies;
  std::map<std::string, std::vector<std::string>> synonyms;  // lowercase head word
  std::map<std::string, std::string> abbreviations;          // lowercase word -> informal form
  BabelLexicon babel_lexicon;

  bool operator==(const ResourcePack&) const = default;
};

inline std::filesystem::path default_resource_dir() { return AESRT_DEFAULT_RESOURCE_DIR; }

namespace detail {

inline std::vector<std::string> read_pool(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ResourceError("missing resource file " + file.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(t);
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> read_tsv(const std::filesystem::path& file) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::size_t lineno = 0;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ResourceError("missing resource file " + file.string());
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ResourceError(file.filename().string() + ":" + std::to_string(lineno) + ": expected word<TAB>value");
    rows.emplace_back(std::string(trim(std::string_view(line).substr(0, tab))),
                      std::string(trim(std::string_view(line).substr(tab + 1))));
  }
  return rows;
}

}  // namespace detail

/// Adds a synonym entry, dropping the head word itself and duplicates.
inline void add_synonyms(ResourcePack& pack, std::string_view word, const std::vector<std::string>& syns) {
  const std::string head = to_lower(trim(word));
  if (head.empty()) return;
  auto& list = pack.synonyms[head];
  for (const auto& s : syns) {
    const std::string t(trim(s));
    if (t.empty() || to_lower(t) == head) continue;
    if (std::find(list.begin(), list.end(), t) == list.end()) list.push_back(t);
  }
  if (list.empty()) pack.synonyms.erase(head);
}

inline ResourcePack load_resource_pack(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ResourceError("resource pack directory not found: " + dir.string());
  ResourcePack pack;

  {
    std::ifstream in(dir / "wiki.jsonl", std::ios::binary);
    if (!in) throw ResourceError("missing resource file " + (dir / "wiki.jsonl").string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        WikiArticle a;
        for (const auto& k : j.at("topic_keys")) a.topic_keys.push_back(to_lower(trim(k.get<std::string>())));
        for (const auto& s : j.at("sentences")) a.sentences.push_back(s.get<std::string>());
        if (a.topic_keys.empty() || a.sentences.empty())
          throw ResourceError("wiki.jsonl:" + std::to_string(lineno) + ": article needs topic_keys and sentences");
        pack.wiki_articles.push_back(std::move(a));
      } catch (const nlohmann::json::exception& e) {
        throw ResourceError("wiki.jsonl:" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  pack.songs = detail::read_pool(dir / "songs.txt");
  pack.speeches = detail::read_pool(dir / "speeches.txt");
  pack.facts = detail::read_pool(dir / "facts.txt");
  pack.lies = detail::read_pool(dir / "lies.txt");

  for (const auto& [word, value] : detail::read_tsv(dir / "synonyms.tsv")) {
    std::vector<std::string> syns;
    std::size_t b = 0;
    for (std::size_t i = 0; i <= value.size(); ++i) {
      if (i == value.size() || value[i] == ',') {
        syns.emplace_back(trim(std::string_view(value).substr(b, i - b)));
        b = i + 1;
      }
    }
    add_synonyms(pack, word, syns);
  }
  for (const auto& [word, informal] : detail::read_tsv(dir / "abbreviations.tsv"))
    pack.abbreviations[to_lower(word)] = informal;

  pack.babel_lexicon.templates = detail::read_pool(dir / "babel_templates.txt");
  pack.babel_lexicon.obscure_words = detail::read_pool(dir / "babel_words.txt");
  for (const auto& t : pack.babel_lexicon.templates)
    if (t.find("{KW}") == std::string::npos && t.find("{OBSCURE}") == std::string::npos)
      throw ResourceError("babel template without slots: " + t);
  return pack;
}

}  // namespace aesrt
