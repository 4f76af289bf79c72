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

// A scripted external scorer for protocol tests. Speaks the line transport on
// stdin/stdout, or the endpoint transport with --http.

#include <algorithm>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "aesrt/textops.hpp"

namespace {

struct Behaviour {
  double constant = 3.0;
  bool by_length = false;
  std::set<std::string> malformed;
  std::set<std::string> dropped;
  bool garbage = false;
};

// nullopt when the request is dropped
std::optional<nlohmann::json> answer(const Behaviour& b, const nlohmann::json& req) {
  const std::string id = req.value("id", "");
  if (b.dropped.count(id)) return std::nullopt;
  if (b.malformed.count(id)) return nlohmann::json{{"id", id}, {"score", "not-a-number"}};
  const double score =
      b.by_length ? static_cast<double>(aesrt::word_count(req.value("text", ""))) / 10.0 : b.constant;
  return nlohmann::json{{"id", id}, {"score", score}};
}

int run_lines(const Behaviour& b, std::size_t reverse, std::size_t exit_after) {
  std::vector<nlohmann::json> held;
  std::size_t seen = 0;
  auto flush = [&] {
    if (b.garbage && !held.empty()) std::cout << "this is not a reply\n";
    for (auto it = held.rbegin(); it != held.rend(); ++it)
      if (auto a = answer(b, *it)) std::cout << a->dump() << '\n';
    std::cout.flush();
    held.clear();
  };
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      continue;
    }
    if (exit_after && ++seen > exit_after) return 3;
    held.push_back(std::move(req));
    if (held.size() >= std::max<std::size_t>(reverse, 1)) flush();
  }
  flush();
  return 0;
}

int run_http(const Behaviour& b, int port, bool reverse) {
  httplib::Server server;
  server.Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      res.status = 400;
      return;
    }
    if (!body.is_array()) {
      res.status = 400;
      return;
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : body)
      if (auto a = answer(b, r)) out.push_back(*a);
    if (reverse) std::reverse(out.begin(), out.end());
    res.set_content(out.dump(), "application/json");
  });
  if (!server.bind_to_port("127.0.0.1", port)) {
    std::cerr << "stub_scorer: cannot bind port " << port << '\n';
    return 1;
  }
  server.listen_after_bind();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scripted scorer for adapter tests"};
  Behaviour b;
  std::size_t reverse = 1;
  std::size_t exit_after = 0;
  int http_port = 0;
  std::vector<std::string> malformed, dropped;
  app.add_option("--constant", b.constant, "score returned for every request");
  app.add_flag("--length", b.by_length, "score = words / 10");
  app.add_option("--reverse", reverse, "hold N requests, then answer them last-first");
  app.add_option("--malformed-id", malformed, "answer this id with a non-numeric score");
  app.add_option("--drop-id", dropped, "never answer this id");
  app.add_flag("--garbage", b.garbage, "emit a junk line before each group of replies");
  app.add_option("--exit-after", exit_after, "exit once this many requests were read");
  app.add_option("--http", http_port, "serve POST /score on this port instead of stdin/stdout");
  CLI11_PARSE(app, argc, argv);
  b.malformed.insert(malformed.begin(), malformed.end());
  b.dropped.insert(dropped.begin(), dropped.end());
  if (http_port > 0) return run_http(b, http_port, reverse > 1);
  return run_lines(b, reverse, exit_after);
}
