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

// Scorer adapters and the wire schema they share.
//
//   request  {"id": string, "prompt_id": string, "text": string}
//   reply    {"id": string, "score": number}

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aesrt/corpus.hpp"
#include "aesrt/error.hpp"
#include "aesrt/scorer/baseline.hpp"

namespace aesrt {

struct ScoreRequest {
  std::string id;  // unique within a batch; the only field echoed back
  std::string prompt_id;
  std::string text;
};

struct ScoreReply {
  std::string id;
  double score = 0.0;
};

struct ScoreFailure {
  std::string id;
  std::string reason;

  bool operator==(const ScoreFailure&) const = default;
};

struct BatchResult {
  std::vector<ScoreReply> replies;
  std::vector<ScoreFailure> failures;
};

inline nlohmann::json request_to_json(const ScoreRequest& r) {
  return {{"id", r.id}, {"prompt_id", r.prompt_id}, {"text", r.text}};
}

inline ScoreRequest request_from_json(const nlohmann::json& j) {
  return {j.at("id").get<std::string>(), j.at("prompt_id").get<std::string>(), j.at("text").get<std::string>()};
}

/// Outcome of decoding one reply record.
struct ParsedReply {
  std::optional<std::string> id;  // set when an id could be recovered
  std::optional<double> score;    // set when the record is well formed
  std::string error;
};

inline ParsedReply parse_reply(const nlohmann::json& j) {
  ParsedReply out;
  if (!j.is_object()) {
    out.error = "reply is not an object";
    return out;
  }
  auto id = j.find("id");
  if (id == j.end() || !id->is_string()) {
    out.error = "reply has no string id";
    return out;
  }
  out.id = id->get<std::string>();
  auto score = j.find("score");
  if (score == j.end() || !score->is_number()) {
    out.error = "malformed reply: score is not a number";
    return out;
  }
  const double v = score->get<double>();
  if (!std::isfinite(v)) {
    out.error = "malformed reply: score is not finite";
    return out;
  }
  out.score = v;
  return out;
}

inline ParsedReply parse_reply_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    ParsedReply out;
    out.error = "reply line is not valid JSON";
    return out;
  }
  return parse_reply(j);
}

/// Rejects empty or duplicate ids before anything goes on the wire.
/// Returns the failures; `accepted` receives the requests that may be sent.
inline std::vector<ScoreFailure> screen_requests(std::span<const ScoreRequest> requests,
                                                 std::vector<const ScoreRequest*>& accepted) {
  std::vector<ScoreFailure> failures;
  std::map<std::string_view, int> seen;
  for (const auto& r : requests) ++seen[r.id];
  for (const auto& r : requests) {
    if (r.id.empty()) failures.push_back({r.id, "empty request id"});
    else if (seen[r.id] > 1) failures.push_back({r.id, "duplicate request id in batch"});
    else accepted.push_back(&r);
  }
  return failures;
}

struct AdapterOptions {
  std::chrono::milliseconds timeout{30000};  // per batch
  std::size_t max_in_flight = 4;             // concurrent batches
};

/// Caps the number of batches an adapter has on the wire at once.
class InFlightGate {
 public:
  explicit InFlightGate(std::size_t limit) : limit_(limit == 0 ? 1 : limit) {}

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return active_ < limit_; });
    ++active_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      --active_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t limit_;
  std::size_t active_ = 0;
};

class ScorerAdapter {
 public:
  virtual ~ScorerAdapter() = default;

  /// Scores a batch. Never throws for per-id problems; those land in
  /// BatchResult::failures.
  virtual BatchResult score_batch(std::span<const ScoreRequest> requests) = 0;

  /// Stable description used in cache keys.
  virtual std::string describe() const = 0;
};

/// The built-in ridge baseline behind the adapter interface.
class BaselineAdapter final : public ScorerAdapter {
 public:
  explicit BaselineAdapter(BaselineModel model) : model_(std::move(model)) {}

  BatchResult score_batch(std::span<const ScoreRequest> requests) override {
    BatchResult out;
    std::vector<const ScoreRequest*> accepted;
    out.failures = screen_requests(requests, accepted);
    for (const auto* r : accepted) {
      auto it = model_.prompts.find(r->prompt_id);
      if (it == model_.prompts.end()) {
        out.failures.push_back({r->id, "no baseline model for prompt " + r->prompt_id});
        continue;
      }
      out.replies.push_back({r->id, baseline_score(it->second, r->text)});
    }
    return out;
  }

  std::string describe() const override {
    return "baseline:" + Digest{}.add(std::string_view(baseline_to_json(model_).dump())).hex();
  }

  const BaselineModel& model() const noexcept { return model_; }

 private:
  BaselineModel model_;
};

}  // namespace aesrt
