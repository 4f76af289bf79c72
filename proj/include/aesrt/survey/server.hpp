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

#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "aesrt/rng.hpp"
#include "aesrt/survey/survey.hpp"

namespace aesrt {

struct ServiceReply {
  int status = 200;
  nlohmann::json body;
};

/// Sessions, pair assignment and annotation intake. Transport independent;
/// `mount` wires it onto an httplib server.
class SurveyService {
 public:
  SurveyService(std::vector<SurveyPair> pairs, const std::filesystem::path& log, std::uint64_t seed = 0)
      : pairs_(std::move(pairs)), index_(index_pairs(pairs_)), store_(log), seed_(seed) {
    if (pairs_.empty()) throw Error("survey has no pairs to serve");
    for (const auto& a : store_.snapshot()) {
      auto [it, fresh] = sessions_.try_emplace(a.annotator_id, Session{a.group, sessions_.size(), {}});
      it->second.done.insert(a.pair_id);
      if (fresh) next_group_ = it->second.group == 1 ? 2 : 1;
    }
  }

  ServiceReply create_session() {
    std::lock_guard lock(mu_);
    std::string id;
    do {
      id = "r-" + Digest{}.add(seed_).add(static_cast<std::uint64_t>(counter_++)).hex().substr(0, 12);
    } while (sessions_.count(id));
    const int group = next_group_;
    next_group_ = group == 1 ? 2 : 1;
    sessions_.emplace(id, Session{group, sessions_.size(), {}});
    return {200, {{"annotator_id", id}, {"group", group}}};
  }

  ServiceReply next_pair(const std::string& annotator_id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(annotator_id);
    if (it == sessions_.end()) return {404, error_body("unknown annotator_id")};
    const auto& s = it->second;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto& p = pairs_[(s.ordinal + k) % pairs_.size()];
      if (!s.done.count(p.pair_id)) return {200, pair_payload(p, s.group)};
    }
    return {200, {{"done", true}}};
  }

  ServiceReply submit(const std::string& body) {
    Annotation a;
    try {
      a = annotation_from_json(nlohmann::json::parse(body));
    } catch (const nlohmann::json::exception&) {
      return {400, error_body("body is not JSON")};
    } catch (const Error& e) {
      return {400, error_body(e.what())};
    }
    std::lock_guard lock(mu_);
    auto s = sessions_.find(a.annotator_id);
    if (s == sessions_.end()) return {404, error_body("unknown annotator_id")};
    auto p = index_.find(a.pair_id);
    if (p == index_.end()) return {404, error_body("unknown pair_id")};
    if (a.group != s->second.group) return {400, error_body("group does not match the session")};
    if (auto err = validate_annotation(a, p->second); !err.empty()) return {400, error_body(err)};
    if (s->second.done.count(a.pair_id)) return {409, error_body("pair already annotated by this annotator")};
    store_.append(a);
    s->second.done.insert(a.pair_id);
    return {200, {{"status", "ok"}}};
  }

  ServiceReply summary() const { return {200, summary_to_json(summarize(store_.snapshot(), index_))}; }

  SurveySummary live_summary() const { return summarize(store_.snapshot(), index_); }
  const std::map<std::string, SurveyPair>& pairs() const noexcept { return index_; }
  std::size_t annotations() const { return store_.size(); }

  /// Registers the API routes and, when it exists, the static asset directory at /.
  void mount(httplib::Server& server, const std::filesystem::path& static_dir = {}) {
    auto send = [](httplib::Response& res, const ServiceReply& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    server.Get("/api/session", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, create_session());
    });
    server.Get("/api/pair", [this, send](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("annotator_id")) return send(res, {400, error_body("annotator_id is required")});
      send(res, next_pair(req.get_param_value("annotator_id")));
    });
    server.Post("/api/annotation", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, submit(req.body));
    });
    server.Get("/api/summary", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, summary());
    });
    if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) {
      server.set_mount_point("/", static_dir.string());
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<!doctype html><title>aesrt survey</title><p>No survey UI assets are installed.</p>",
                        "text/html");
      });
    }
  }

 private:
  struct Session {
    int group = 1;
    std::size_t ordinal = 0;
    std::set<std::string> done;
  };

  static nlohmann::json error_body(const std::string& msg) { return {{"status", "error"}, {"error", msg}}; }

  std::vector<SurveyPair> pairs_;
  std::map<std::string, SurveyPair> index_;
  AnnotationStore store_;
  std::uint64_t seed_;
  mutable std::mutex mu_;
  std::map<std::string, Session> sessions_;
  std::size_t counter_ = 0;
  int next_group_ = 1;
};

}  // namespace aesrt
