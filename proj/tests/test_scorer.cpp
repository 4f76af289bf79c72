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

#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <netinet/in.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "aesrt/metrics.hpp"
#include "aesrt/sample_corpus.hpp"
#include "aesrt/scorer/scorer.hpp"

namespace aesrt {
namespace {

using namespace std::chrono_literals;

const std::string kStub = AESRT_STUB_SCORER;

std::vector<ScoreRequest> requests(std::size_t n, const std::string& prompt_id = "sample-na") {
  std::vector<ScoreRequest> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({"q" + std::to_string(i), prompt_id, "Some words number " + std::to_string(i) + "."});
  return out;
}

std::map<std::string, double> by_id(const BatchResult& r) {
  std::map<std::string, double> out;
  for (const auto& x : r.replies) out[x.id] = x.score;
  return out;
}

std::map<std::string, std::string> failures_by_id(const BatchResult& r) {
  std::map<std::string, std::string> out;
  for (const auto& f : r.failures) out[f.id] = f.reason;
  return out;
}

// Text whose four features move independently: length, prompt overlap,
// repetition and sentence shape all vary with the seed.
std::string synthetic_text(std::mt19937_64& gen) {
  static const std::vector<std::string> on_topic = {"patience", "waiting", "calm", "story", "difficult", "situation"};
  static const std::vector<std::string> off_topic = {"purple", "engine", "harbor", "violin", "glacier", "saddle",
                                                     "pepper", "lantern", "orchid", "meteor"};
  const int sentences = 1 + static_cast<int>(gen() % 5);
  std::string text;
  for (int s = 0; s < sentences; ++s) {
    const int words = 3 + static_cast<int>(gen() % 9);
    std::string sent;
    for (int w = 0; w < words; ++w) {
      const auto& pool = gen() % 3 == 0 ? on_topic : off_topic;
      std::string word = pool[gen() % pool.size()];
      if (w == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
      sent += (w ? " " : "") + word;
    }
    text += (s ? " " : "") + sent + ".";
  }
  return text;
}

// --- baseline ------------------------------------------------------------------------

TEST(Baseline, UnregularizedFitRecoversLinearTarget) {
  const Prompt& prompt = bundled_sample_corpus().prompt("sample-na");
  const auto vocab = prompt_vocabulary(prompt);
  const FeatureVector true_w = {2.0, -3.0, 5.0, 0.25};
  std::mt19937_64 gen(5);
  std::vector<TrainingSample> samples;
  for (int i = 0; i < 80; ++i) {
    const auto text = synthetic_text(gen);
    const auto f = extract_features(text, vocab);
    double y = 7.0;
    for (std::size_t k = 0; k < kFeatureCount; ++k) y += true_w[k] * f[k];
    samples.push_back({text, y});
  }
  Prompt wide = prompt;
  wide.score_min = -1000;
  wide.score_max = 1000;
  const auto m = fit_prompt_model(wide, samples, 0.0);
  for (const auto& s : samples) EXPECT_NEAR(baseline_score(m, s.text), s.target, 1e-6);
}

TEST(Baseline, HeavyRidgePredictsTheMean) {
  const Corpus& c = bundled_sample_corpus();
  const auto model = train_baseline(c, 1e12);
  for (const auto& [id, prompt] : c.prompts) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto* r : c.responses_for(id)) {
      sum += *r->human_score;
      ++n;
    }
    const double mean = sum / static_cast<double>(n);
    for (const auto* r : c.responses_for(id)) EXPECT_NEAR(baseline_score(model, prompt, r->text), mean, 1e-6);
  }
}

TEST(Baseline, DeterministicAndInRange) {
  const Corpus& c = bundled_sample_corpus();
  const auto a = train_baseline(c);
  const auto b = train_baseline(c);
  EXPECT_EQ(baseline_to_json(a), baseline_to_json(b));
  std::vector<double> human, machine;
  for (const auto& r : c.responses) {
    const Prompt& p = c.prompt_of(r);
    const double s = baseline_score(a, p, r.text);
    EXPECT_EQ(s, baseline_score(b, p, r.text));
    EXPECT_GE(s, p.score_min);
    EXPECT_LE(s, p.score_max);
    human.push_back(normalize_score(*r.human_score, p));
    machine.push_back(normalize_score(s, p));
  }
  EXPECT_GT(pearson(human, machine).value_or(0.0), 0.5);
}

TEST(Baseline, EmptyTextScoresMinimum) {
  const Corpus& c = bundled_sample_corpus();
  const auto model = train_baseline(c);
  for (const auto& [id, prompt] : c.prompts) {
    EXPECT_EQ(baseline_score(model, prompt, ""), prompt.score_min);
    EXPECT_EQ(baseline_score(model, prompt, "  \n "), prompt.score_min);
  }
}

TEST(Baseline, TrainingPreconditions) {
  const Corpus& c = bundled_sample_corpus();
  EXPECT_THROW(train_baseline(c, -1.0), ScorerError);
  EXPECT_THROW(train_baseline(c, std::nan("")), ScorerError);
  Corpus small = c;
  small.responses.resize(5);
  EXPECT_THROW(train_baseline(small), ScorerError);
}

TEST(Baseline, AdapterReportsUnknownPrompt) {
  auto adapter = make_adapter("baseline:lambda=2", bundled_sample_corpus());
  auto reqs = requests(2);
  reqs.push_back({"x", "nope", "Text."});
  const auto res = adapter->score_batch(reqs);
  EXPECT_EQ(res.replies.size(), 2u);
  EXPECT_EQ(failures_by_id(res).count("x"), 1u);
}

TEST(MakeAdapter, RejectsBadUris) {
  const Corpus& c = bundled_sample_corpus();
  EXPECT_THROW(make_adapter("baseline:alpha=1", c), ConfigError);
  EXPECT_THROW(make_adapter("baseline:lambda=abc", c), ConfigError);
  EXPECT_THROW(make_adapter("exec:  ", c), ConfigError);
  EXPECT_THROW(make_adapter("ftp://x", c), ConfigError);
}

// --- line transport ---------------------------------------------------------------------

AdapterOptions quick(std::chrono::milliseconds t = 5000ms) {
  AdapterOptions o;
  o.timeout = t;
  return o;
}

TEST(ExecAdapter, ConstantEcho) {
  ExecAdapter a(kStub + " --constant 3", quick());
  const auto reqs = requests(10);
  const auto res = a.score_batch(reqs);
  EXPECT_TRUE(res.failures.empty());
  ASSERT_EQ(res.replies.size(), 10u);
  for (const auto& [id, s] : by_id(res)) EXPECT_EQ(s, 3.0) << id;
}

TEST(ExecAdapter, OutOfOrderRepliesMatchById) {
  ExecAdapter a(kStub + " --length --reverse 5", quick());
  const auto reqs = requests(10);
  const auto res = a.score_batch(reqs);
  ASSERT_TRUE(res.failures.empty());
  const auto got = by_id(res);
  for (const auto& r : reqs) EXPECT_DOUBLE_EQ(got.at(r.id), static_cast<double>(word_count(r.text)) / 10.0);
}

TEST(ExecAdapter, MalformedReplyFailsThatIdOnly) {
  ExecAdapter a(kStub + " --malformed-id q1 --garbage", quick());
  const auto reqs = requests(3);
  const auto res = a.score_batch(reqs);
  EXPECT_EQ(res.replies.size(), 2u);
  const auto f = failures_by_id(res);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f.count("q1"), 1u);
  EXPECT_GE(a.garbage_lines(), 1u);
}

TEST(ExecAdapter, DroppedIdTimesOut) {
  ExecAdapter a(kStub + " --drop-id q2", quick(300ms));
  const auto reqs = requests(4);
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = a.score_batch(reqs);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 3s);
  EXPECT_EQ(res.replies.size(), 3u);
  EXPECT_EQ(failures_by_id(res).at("q2"), "timeout");
}

TEST(ExecAdapter, ProcessExitFailsOutstanding) {
  ExecAdapter a(kStub + " --exit-after 2", quick());
  const auto reqs = requests(5);
  const auto res = a.score_batch(reqs);
  EXPECT_EQ(res.replies.size() + res.failures.size(), 5u);
  EXPECT_FALSE(res.failures.empty());
  for (const auto& f : res.failures) EXPECT_EQ(f.reason, "scorer process exited");
  const auto again = a.score_batch(reqs);
  EXPECT_TRUE(again.replies.empty());
  EXPECT_EQ(again.failures.size(), 5u);
}

TEST(ExecAdapter, EmptyBatchAndDuplicateIds) {
  ExecAdapter a(kStub, quick());
  EXPECT_TRUE(a.score_batch({}).replies.empty());
  std::vector<ScoreRequest> dup = {{"a", "p", "x"}, {"a", "p", "y"}, {"", "p", "z"}, {"b", "p", "w"}};
  const auto res = a.score_batch(dup);
  EXPECT_EQ(res.replies.size(), 1u);
  EXPECT_EQ(res.failures.size(), 3u);
}

TEST(ExecAdapter, ConcurrentBatches) {
  AdapterOptions o = quick();
  o.max_in_flight = 3;
  ExecAdapter a(kStub + " --length", o);
  std::vector<std::thread> threads;
  std::vector<BatchResult> results(6);
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&, t] {
      std::vector<ScoreRequest> reqs;
      for (int i = 0; i < 20; ++i)
        reqs.push_back({"t" + std::to_string(t) + "-" + std::to_string(i), "p", std::string(i + 1, 'x')});
      results[static_cast<std::size_t>(t)] = a.score_batch(reqs);
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& r : results) {
    EXPECT_TRUE(r.failures.empty());
    EXPECT_EQ(r.replies.size(), 20u);
  }
}

TEST(ScoreRecords, ClampsAndNormalizes) {
  ExecAdapter a(kStub + " --constant 40", quick());
  const auto& prompts = bundled_sample_corpus().prompts;
  const auto reqs = requests(3);
  const auto batch = score_records(a, "stub", prompts, reqs);
  ASSERT_EQ(batch.records.size(), 3u);
  EXPECT_EQ(batch.clamped, 3u);
  for (const auto& r : batch.records) {
    EXPECT_EQ(r.raw_score, 30.0);
    EXPECT_EQ(r.normalized, 100.0);
    EXPECT_TRUE(r.clamped);
    EXPECT_EQ(r.scorer_id, "stub");
  }
  auto odd = requests(1, "missing");
  EXPECT_EQ(score_records(a, "stub", prompts, odd).failures.size(), 1u);
}

// --- endpoint transport ---------------------------------------------------------------------

int free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);
  ::close(fd);
  return port;
}

class StubServer {
 public:
  explicit StubServer(const std::string& flags) : port_(free_port()) {
    const std::string cmd = kStub + " --http " + std::to_string(port_) + " " + flags;
    pid_ = ::fork();
    if (pid_ == 0) {
      ::execl("/bin/sh", "sh", "-c", ("exec " + cmd).c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    httplib::Client cli("127.0.0.1", port_);
    for (int i = 0; i < 200; ++i) {
      if (auto r = cli.Post("/score", "[]", "application/json")) break;
      std::this_thread::sleep_for(10ms);
    }
  }
  ~StubServer() {
    ::kill(pid_, SIGTERM);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  int port_;
  pid_t pid_ = -1;
};

TEST(HttpAdapter, ScoresOutOfOrderBatch) {
  StubServer server("--length --reverse 2 --malformed-id q3 --drop-id q4");
  auto adapter = make_adapter(server.url(), bundled_sample_corpus(), quick());
  const auto reqs = requests(6);
  const auto res = adapter->score_batch(reqs);
  const auto got = by_id(res);
  EXPECT_EQ(got.size(), 4u);
  EXPECT_DOUBLE_EQ(got.at("q0"), 0.4);
  const auto f = failures_by_id(res);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_EQ(f.at("q4"), "no reply for id");
  EXPECT_EQ(f.count("q3"), 1u);
}

TEST(HttpAdapter, UnreachableEndpointFailsEveryId) {
  HttpAdapter adapter("http://127.0.0.1:" + std::to_string(free_port()), quick(500ms));
  const auto reqs = requests(3);
  const auto res = adapter.score_batch(reqs);
  EXPECT_TRUE(res.replies.empty());
  EXPECT_EQ(res.failures.size(), 3u);
}

}  // namespace
}  // namespace aesrt
