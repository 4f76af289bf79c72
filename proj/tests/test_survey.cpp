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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <gtest/gtest.h>

#include "aesrt/survey/server.hpp"
#include "aesrt/survey/survey.hpp"

namespace aesrt {
namespace {

namespace fs = std::filesystem;

class SurveyDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("aesrt_survey_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

Prompt range_prompt(int lo, int hi) {
  Prompt p;
  p.id = "p";
  p.question_text = "Q?";
  p.score_min = lo;
  p.score_max = hi;
  p.kind = PromptKind::Narrative;
  return p;
}

SurveyPair make_pair(std::string id, TestKind test, int original = 8, Prompt prompt = range_prompt(0, 10)) {
  return {std::move(id), std::move(prompt), "r1", "Original text.", original, "Changed text.", test};
}

Annotation group1(std::string pair_id, std::string who, int adv, Direction d, std::set<Reason> reasons = {}) {
  Annotation a;
  a.pair_id = std::move(pair_id);
  a.annotator_id = std::move(who);
  a.group = 1;
  a.score_adversarial = adv;
  a.direction = d;
  a.reasons = std::move(reasons);
  return a;
}

ImpactReport report(double npos, double nneg, double mupos, std::optional<double> p, double muneg = 0) {
  ImpactReport r;
  r.key.scorer_id = "s";
  r.key.prompt_id = "*";
  r.n = 10;
  r.n_pos_pct = npos;
  r.n_neg_pct = nneg;
  r.mu_pos_pct = mupos;
  r.mu_neg_pct = muneg;
  r.p_value = p;
  return r;
}

// --- case selection ----------------------------------------------------------------------

TEST(Predicate, Examples) {
  const SurveyPredicate pred;
  EXPECT_TRUE(pred(report(60, 20, 1, 0.001)));
  EXPECT_FALSE(pred(report(5, 90, 2, 0.001)));
  EXPECT_TRUE(pred(report(5, 90, 12, 0.001)));
  EXPECT_TRUE(pred(report(5, 90, 2, 0.2)));
  EXPECT_TRUE(pred(report(5, 90, 2, std::nullopt)));
  SurveyPredicate only_mu;
  only_mu.pos_at_least_neg = false;
  only_mu.t_test_not_rejected = false;
  EXPECT_FALSE(only_mu(report(60, 20, 1, 0.5)));
}

TEST(Predicate, SelectionIsSorted) {
  EXPECT_TRUE(select_survey_cases({}).empty());
  auto a = report(60, 20, 1, 0.001);
  a.key.test = TestKind::DelEnd;
  auto b = report(60, 20, 1, 0.001);
  b.key.test = TestKind::AddSong;
  auto c = report(5, 90, 2, 0.001);
  const auto keys = select_survey_cases({a, c, b});
  ASSERT_EQ(keys.size(), 2u);
  EXPECT_TRUE(keys[0] < keys[1]);
}

// --- annotations -----------------------------------------------------------------------------

TEST(Annotation, Validation) {
  const auto p = make_pair("x", TestKind::AddSong, 8);
  EXPECT_EQ(validate_annotation(group1("x", "a", 6, Direction::Lower, {Reason::Relevance}), p), "");
  EXPECT_EQ(validate_annotation(group1("x", "a", 8, Direction::Equal), p), "");
  EXPECT_NE(validate_annotation(group1("x", "a", 6, Direction::Higher, {Reason::Relevance}), p), "");
  EXPECT_NE(validate_annotation(group1("x", "a", 6, Direction::Lower), p), "");
  EXPECT_NE(validate_annotation(group1("x", "a", 11, Direction::Higher, {Reason::Clarity}), p), "");
  auto g2 = group1("x", "a", 6, Direction::Lower, {Reason::Grammar});
  g2.group = 2;
  EXPECT_NE(validate_annotation(g2, p), "");
  g2.score_original = 5;
  EXPECT_NE(validate_annotation(g2, p), "");  // 6 > 5 is Higher
  g2.score_original = 7;
  EXPECT_EQ(validate_annotation(g2, p), "");
  auto g1 = group1("x", "a", 6, Direction::Lower, {Reason::Grammar});
  g1.score_original = 7;
  EXPECT_NE(validate_annotation(g1, p), "");
  g1 = group1("x", "a", 6, Direction::Lower, {Reason::Grammar});
  g1.group = 3;
  EXPECT_NE(validate_annotation(g1, p), "");
}

TEST(Annotation, JsonRoundTrip) {
  auto a = group1("x", "a", 6, Direction::Lower, {Reason::Relevance, Reason::Repetition});
  a.group = 2;
  a.score_original = 9;
  a.comment = "odd";
  a.timestamp = "2026-01-01T00:00:00Z";
  EXPECT_EQ(annotation_from_json(annotation_to_json(a)), a);
  EXPECT_THROW(annotation_from_json(nlohmann::json::parse(R"({"pair_id":"x"})")), Error);
  EXPECT_THROW(annotation_from_json(nlohmann::json::parse(
                   R"({"pair_id":"x","annotator_id":"a","group":1,"score_adversarial":1,"direction":"Sideways"})")),
               Error);
  EXPECT_THROW(annotation_from_json(nlohmann::json::parse(
                   R"({"pair_id":"x","annotator_id":"a","group":1,"score_adversarial":1,"direction":"Equal","reasons":["Vibes"]})")),
               Error);
}

TEST(Pairs, PayloadHidesScoreFromGroupTwo) {
  const auto p = make_pair("x", TestKind::AddSong);
  const auto one = pair_payload(p, 1);
  const auto two = pair_payload(p, 2);
  EXPECT_EQ(one.at("original_score"), 8);
  EXPECT_FALSE(two.contains("original_score"));
  EXPECT_EQ(two.at("adversarial_text"), "Changed text.");
  EXPECT_EQ(pair_from_json(pair_to_json(p)), p);
  auto same = pair_to_json(p);
  same["adversarial_text"] = same["original_text"];
  EXPECT_THROW(pair_from_json(same), Error);
}

TEST(Pairs, BuiltFromFlaggedCases) {
  const Corpus& c = bundled_sample_corpus();
  const ResourcePack pk = load_resource_pack(default_resource_dir());
  ImpactKey song{"baseline", TestKind::AddSong, "sample-na", 10, Position::End, false};
  ImpactKey shuf{"baseline", TestKind::ShuffleSent, "*", 10, Position::End, false};
  const auto pairs = build_survey_pairs(c, pk, {song, shuf}, 1, 3);
  ASSERT_EQ(pairs.size(), 6u);
  std::set<std::string> ids;
  for (const auto& p : pairs) {
    ids.insert(p.pair_id);
    EXPECT_NE(p.original_text, p.adversarial_text);
    if (p.test == TestKind::AddSong) {
      EXPECT_EQ(p.prompt.id, "sample-na");
    }
  }
  EXPECT_EQ(ids.size(), 6u);
  EXPECT_EQ(build_survey_pairs(c, pk, {song, shuf}, 1, 3), pairs);
}

// --- aggregation -----------------------------------------------------------------------------

std::vector<Annotation> ten_annotations() {
  std::vector<Annotation> out;
  const int adv[10] = {6, 4, 7, 5, 2, 7, 6, 9, 10, 8};
  for (int i = 0; i < 10; ++i) {
    const Direction d = adv[i] < 8 ? Direction::Lower : adv[i] > 8 ? Direction::Higher : Direction::Equal;
    std::set<Reason> rs;
    if (d == Direction::Lower) rs = {i % 2 ? Reason::Relevance : Reason::Organization};
    if (d == Direction::Higher) rs = {Reason::Clarity};
    out.push_back(group1("x", "a" + std::to_string(i), adv[i], d, rs));
  }
  return out;
}

TEST(Summary, TenAnnotations) {
  const auto pairs = index_pairs({make_pair("x", TestKind::AddSong, 8)});
  const auto anns = ten_annotations();
  const auto s = summarize(anns, pairs);
  ASSERT_EQ(s.tests.size(), 1u);
  const auto& t = s.tests[0];
  EXPECT_EQ(t.n, 10u);
  EXPECT_DOUBLE_EQ(t.pct_people_down, 70.0);
  EXPECT_DOUBLE_EQ(t.pct_people_up, 20.0);
  // drops 2,4,1,3,6,1,2 over a width of 10, averaged over the 7 who lowered
  double oracle = 0;
  for (int d : {2, 4, 1, 3, 6, 1, 2}) oracle += d * 10.0;
  EXPECT_NEAR(t.score_drop_pct, oracle / 7.0, 1e-12);
  ASSERT_FALSE(t.reasons_down.empty());
  EXPECT_EQ(t.reasons_down[0].reason, Reason::Organization);
  EXPECT_EQ(t.reasons_down[0].count, 4u);
  EXPECT_EQ(t.reasons_up.at(0).reason, Reason::Clarity);
  EXPECT_EQ(drop_pct_from_summary(s).at(TestKind::AddSong), t.score_drop_pct);
}

TEST(Summary, SevenLowerByTwo) {
  const auto pairs = index_pairs({make_pair("x", TestKind::AddSong, 8)});
  std::vector<Annotation> anns;
  for (int i = 0; i < 7; ++i) anns.push_back(group1("x", "d" + std::to_string(i), 6, Direction::Lower, {Reason::Grammar}));
  for (int i = 0; i < 3; ++i) anns.push_back(group1("x", "e" + std::to_string(i), 8, Direction::Equal));
  const auto t = summarize(anns, pairs).tests.at(0);
  EXPECT_EQ(t.pct_people_down, 70.0);
  EXPECT_EQ(t.score_drop_pct, 20.0);
  EXPECT_EQ(t.pct_people_up, 0.0);
}

TEST(Summary, AllEqualAndUnmatched) {
  const auto pairs = index_pairs({make_pair("x", TestKind::AddSong, 8)});
  std::vector<Annotation> anns;
  for (int i = 0; i < 4; ++i) anns.push_back(group1("x", "a" + std::to_string(i), 8, Direction::Equal));
  anns.push_back(group1("ghost", "b", 8, Direction::Equal));
  const auto s = summarize(anns, pairs);
  EXPECT_EQ(s.unmatched, 1u);
  EXPECT_EQ(s.annotations, 5u);
  EXPECT_DOUBLE_EQ(s.tests.at(0).pct_people_down, 0.0);
  EXPECT_DOUBLE_EQ(s.tests.at(0).pct_people_up, 0.0);
  EXPECT_DOUBLE_EQ(s.tests.at(0).score_drop_pct, 0.0);
}

TEST(Summary, PermutationInvariant) {
  const auto pairs = index_pairs({make_pair("x", TestKind::AddSong, 8)});
  auto anns = ten_annotations();
  const auto base = summary_to_json(summarize(anns, pairs));
  std::mt19937 gen(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(anns.begin(), anns.end(), gen);
    EXPECT_EQ(summary_to_json(summarize(anns, pairs)), base);
  }
}

TEST(Divergence, HumanMinusMachine) {
  SurveySummary s;
  TestSummary t;
  t.test = TestKind::AddSong;
  t.score_drop_pct = 30.0;
  s.tests.push_back(t);
  auto r = report(50, 0, 10, 0.5);
  r.key.test = TestKind::AddSong;
  const auto rows = human_machine_divergence(s, {r});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].machine_drop_pct, -5.0);
  EXPECT_DOUBLE_EQ(rows[0].divergence, 35.0);
  auto other = r;
  other.key.test = TestKind::DelEnd;
  EXPECT_THROW(human_machine_divergence(s, {other}), Error);
}

// --- persistence and service --------------------------------------------------------------------

TEST_F(SurveyDir, ReplayEqualsLive) {
  const auto log = dir_ / "annotations.jsonl";
  const std::vector<SurveyPair> pairs = {make_pair("x", TestKind::AddSong, 8), make_pair("y", TestKind::DelEnd, 5)};
  SurveyService svc(pairs, log);
  const auto who = svc.create_session().body.at("annotator_id").get<std::string>();
  EXPECT_EQ(svc.submit(annotation_to_json(group1("x", who, 6, Direction::Lower, {Reason::Grammar})).dump()).status, 200);
  EXPECT_EQ(svc.submit(annotation_to_json(group1("y", who, 5, Direction::Equal)).dump()).status, 200);
  EXPECT_EQ(summarize(replay_annotations(log), index_pairs(pairs)), svc.live_summary());
  SurveyService again(pairs, log);
  EXPECT_EQ(again.live_summary(), svc.live_summary());
  EXPECT_EQ(again.next_pair(who).body, nlohmann::json({{"done", true}}));
}

TEST_F(SurveyDir, SubmitStatusCodes) {
  SurveyService svc({make_pair("x", TestKind::AddSong, 8)}, dir_ / "a.jsonl");
  const auto s1 = svc.create_session().body;
  const auto s2 = svc.create_session().body;
  EXPECT_EQ(s1.at("group"), 1);
  EXPECT_EQ(s2.at("group"), 2);
  const auto who = s1.at("annotator_id").get<std::string>();
  EXPECT_EQ(svc.submit("{not json").status, 400);
  EXPECT_EQ(svc.submit(annotation_to_json(group1("x", "nobody", 8, Direction::Equal)).dump()).status, 404);
  EXPECT_EQ(svc.submit(annotation_to_json(group1("zzz", who, 8, Direction::Equal)).dump()).status, 404);
  EXPECT_EQ(svc.submit(annotation_to_json(group1("x", who, 6, Direction::Equal)).dump()).status, 400);
  auto wrong_group = group1("x", who, 8, Direction::Equal);
  wrong_group.group = 2;
  wrong_group.score_original = 8;
  EXPECT_EQ(svc.submit(annotation_to_json(wrong_group).dump()).status, 400);
  EXPECT_EQ(svc.next_pair(who).body.at("pair_id"), "x");
  EXPECT_EQ(svc.submit(annotation_to_json(group1("x", who, 8, Direction::Equal)).dump()).status, 200);
  EXPECT_EQ(svc.submit(annotation_to_json(group1("x", who, 8, Direction::Equal)).dump()).status, 409);
  EXPECT_EQ(svc.next_pair("nobody").status, 404);
  EXPECT_EQ(svc.annotations(), 1u);
}

TEST_F(SurveyDir, ConcurrentSubmissionsAllPersist) {
  std::vector<SurveyPair> pairs;
  for (int i = 0; i < 20; ++i) pairs.push_back(make_pair("p" + std::to_string(i), TestKind::AddSong, 8));
  const auto log = dir_ / "a.jsonl";
  SurveyService svc(pairs, log);
  const auto who = svc.create_session().body.at("annotator_id").get<std::string>();
  std::vector<std::thread> threads;
  std::vector<int> codes(20);
  for (int i = 0; i < 20; ++i) {
    threads.emplace_back([&, i] {
      codes[static_cast<std::size_t>(i)] =
          svc.submit(annotation_to_json(group1("p" + std::to_string(i), who, 7, Direction::Lower, {Reason::Clarity})).dump())
              .status;
    });
  }
  for (auto& t : threads) t.join();
  for (int c : codes) EXPECT_EQ(c, 200);
  const auto back = replay_annotations(log);
  EXPECT_EQ(back.size(), 20u);
  std::set<std::string> ids;
  for (const auto& a : back) ids.insert(a.pair_id);
  EXPECT_EQ(ids.size(), 20u);
}

TEST_F(SurveyDir, CorruptLogFailsAtStartup) {
  const auto log = dir_ / "a.jsonl";
  std::ofstream(log) << annotation_to_json(group1("x", "a", 8, Direction::Equal)).dump() << "\n{truncated\n";
  try {
    SurveyService svc({make_pair("x", TestKind::AddSong)}, log);
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST_F(SurveyDir, HttpEndpoints) {
  const std::vector<SurveyPair> pairs = {make_pair("x", TestKind::AddSong, 8), make_pair("y", TestKind::DelEnd, 5)};
  SurveyService svc(pairs, dir_ / "a.jsonl");
  httplib::Server server;
  svc.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto root = cli.Get("/");
  ASSERT_TRUE(root);
  EXPECT_EQ(root->status, 200);
  auto session = cli.Get("/api/session");
  ASSERT_TRUE(session);
  const auto who = nlohmann::json::parse(session->body).at("annotator_id").get<std::string>();
  auto pair = cli.Get("/api/pair?annotator_id=" + who);
  ASSERT_TRUE(pair);
  const auto pj = nlohmann::json::parse(pair->body);
  EXPECT_TRUE(pj.contains("original_score"));
  EXPECT_EQ(cli.Get("/api/pair")->status, 400);
  auto post = cli.Post("/api/annotation",
                       annotation_to_json(group1(pj.at("pair_id"), who, 2, Direction::Lower, {Reason::Relevance})).dump(),
                       "application/json");
  ASSERT_TRUE(post);
  EXPECT_EQ(post->status, 200);
  auto summary = cli.Get("/api/summary");
  ASSERT_TRUE(summary);
  EXPECT_EQ(nlohmann::json::parse(summary->body).at("annotations"), 1);

  server.stop();
  th.join();
}

TEST_F(SurveyDir, ServesStaticAssets) {
  fs::create_directories(dir_ / "static");
  std::ofstream(dir_ / "static" / "index.html") << "<p>survey</p>";
  SurveyService svc({make_pair("x", TestKind::AddSong)}, dir_ / "a.jsonl");
  httplib::Server server;
  svc.mount(server, dir_ / "static");
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Get("/");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, "<p>survey</p>");
  server.stop();
  th.join();
}

}  // namespace
}  // namespace aesrt
