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

// Endpoint transport: POST <base>/score with an array of requests, expect an
// array of replies back.

#include <map>
#include <set>
#include <span>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "aesrt/scorer/adapter.hpp"

namespace aesrt {

class HttpAdapter final : public ScorerAdapter {
 public:
  /// `base_url` is scheme://host[:port], e.g. "http://127.0.0.1:8080".
  HttpAdapter(std::string base_url, AdapterOptions options = {})
      : base_url_(std::move(base_url)), options_(options), gate_(options.max_in_flight) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  }

  BatchResult score_batch(std::span<const ScoreRequest> requests) override {
    BatchResult out;
    if (requests.empty()) return out;
    std::vector<const ScoreRequest*> accepted;
    out.failures = screen_requests(requests, accepted);
    if (accepted.empty()) return out;

    nlohmann::json body = nlohmann::json::array();
    for (const auto* r : accepted) body.push_back(request_to_json(*r));

    gate_.acquire();
    httplib::Client cli(base_url_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    auto res = cli.Post("/score", body.dump(), "application/json");
    gate_.release();

    auto fail_all = [&](const std::string& why) {
      for (const auto* r : accepted) out.failures.push_back({r->id, why});
    };
    if (!res) {
      fail_all(res.error() == httplib::Error::Read ? "timeout" : "transport error: " + httplib::to_string(res.error()));
      return out;
    }
    if (res->status != 200) {
      fail_all("HTTP status " + std::to_string(res->status));
      return out;
    }
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      fail_all("reply body is not valid JSON");
      return out;
    }
    if (!reply.is_array()) {
      fail_all("reply body is not an array");
      return out;
    }
    std::set<std::string> waiting;
    for (const auto* r : accepted) waiting.insert(r->id);
    for (const auto& item : reply) {
      const ParsedReply p = parse_reply(item);
      if (!p.id || !waiting.count(*p.id)) continue;
      waiting.erase(*p.id);
      if (p.score) out.replies.push_back({*p.id, *p.score});
      else out.failures.push_back({*p.id, p.error});
    }
    for (const auto& id : waiting) out.failures.push_back({id, "no reply for id"});
    return out;
  }

  std::string describe() const override { return base_url_; }

 private:
  std::string base_url_;
  AdapterOptions options_;
  InFlightGate gate_;
};

}  // namespace aesrt
