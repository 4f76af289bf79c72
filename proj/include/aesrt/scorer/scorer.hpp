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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aesrt/corpus.hpp"
#include "aesrt/error.hpp"
#include "aesrt/scorer/adapter.hpp"
#include "aesrt/scorer/baseline.hpp"
#include "aesrt/scorer/exec_adapter.hpp"
#include "aesrt/scorer/http_adapter.hpp"

namespace aesrt {

/// f(r) or f(r') for one scorer.
struct ScoreRecord {
  std::string scorer_id;
  std::string response_id;
  std::optional<std::uint64_t> variant;  // spec digest; empty for the original
  double raw_score = 0.0;                // clamped to the prompt range
  double normalized = 0.0;               // percent of range
  bool clamped = false;

  bool operator==(const ScoreRecord&) const = default;
};

inline ScoreRecord make_record(std::string scorer_id, std::string response_id, std::optional<std::uint64_t> variant,
                               double score, const Prompt& prompt) {
  const auto n = normalize(score, prompt);
  return {std::move(scorer_id), std::move(response_id), variant, n.raw, n.percent, n.clamped};
}

/// Scores `requests` and turns replies into records. Requests whose prompt
/// is unknown fail per id, like any other reply problem.
struct RecordBatch {
  std::vector<ScoreRecord> records;  // request order
  std::vector<ScoreFailure> failures;
  std::size_t clamped = 0;
};

inline RecordBatch score_records(ScorerAdapter& adapter, std::string_view scorer_id,
                                 const std::map<std::string, Prompt>& prompts,
                                 std::span<const ScoreRequest> requests) {
  RecordBatch out;
  BatchResult res = adapter.score_batch(requests);
  std::map<std::string, double> by_id;
  for (const auto& r : res.replies) by_id.emplace(r.id, r.score);
  for (const auto& req : requests) {
    auto hit = by_id.find(req.id);
    if (hit == by_id.end()) continue;
    auto p = prompts.find(req.prompt_id);
    if (p == prompts.end()) {
      res.failures.push_back({req.id, "unknown prompt id " + req.prompt_id});
      continue;
    }
    out.records.push_back(make_record(std::string(scorer_id), req.id, std::nullopt, hit->second, p->second));
    if (out.records.back().clamped) ++out.clamped;
  }
  out.failures = std::move(res.failures);
  return out;
}

/// Scorer URI schemes:
///   baseline:[lambda=<x>]  built-in ridge baseline trained on `training`
///   exec:<shell command>   line transport
///   http://host:port       endpoint transport
inline std::unique_ptr<ScorerAdapter> make_adapter(std::string_view uri, const Corpus& training,
                                                   AdapterOptions options = {}) {
  auto starts = [&](std::string_view p) { return uri.substr(0, p.size()) == p; };
  if (starts("baseline:") || uri == "baseline") {
    double lambda = 1.0;
    const std::string_view rest = uri.size() > 9 ? uri.substr(9) : std::string_view();
    if (!rest.empty()) {
      if (rest.substr(0, 7) != "lambda=") throw ConfigError("unknown baseline option: " + std::string(rest));
      try {
        std::size_t used = 0;
        lambda = std::stod(std::string(rest.substr(7)), &used);
        if (used != rest.size() - 7) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError("bad baseline lambda in " + std::string(uri));
      }
    }
    return std::make_unique<BaselineAdapter>(train_baseline(training, lambda));
  }
  if (starts("exec:")) {
    if (trim(uri.substr(5)).empty()) throw ConfigError("exec: scorer needs a command");
    return std::make_unique<ExecAdapter>(std::string(uri.substr(5)), options);
  }
  if (starts("http:")) return std::make_unique<HttpAdapter>(std::string(uri), options);
  throw ConfigError("unknown scorer URI scheme: " + std::string(uri));
}

}  // namespace aesrt
