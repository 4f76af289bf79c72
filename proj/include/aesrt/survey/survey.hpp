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

// Human annotation survey: case selection, pairs, annotations and their
// aggregation.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aesrt/corpus.hpp"
#include "aesrt/error.hpp"
#include "aesrt/metrics.hpp"
#include "aesrt/perturb/apply.hpp"
#include "aesrt/runner/report.hpp"

namespace aesrt {

// --- case selection ------------------------------------------------------------------

/// A report is flagged when any enabled clause holds.
struct SurveyPredicate {
  bool pos_at_least_neg = true;  // N_pos >= N_neg
  bool mu_pos_above = true;      // mu_pos > mu_pos_threshold
  double mu_pos_threshold = 10.0;
  bool t_test_not_rejected = true;  // p >= alpha, or p undefined
  double alpha = 0.05;

  bool operator()(const ImpactReport& r) const {
    if (pos_at_least_neg && r.n_pos_pct >= r.n_neg_pct) return true;
    if (mu_pos_above && r.mu_pos_pct > mu_pos_threshold) return true;
    if (t_test_not_rejected && (!r.p_value || *r.p_value >= alpha)) return true;
    return false;
  }
};

inline std::vector<ImpactKey> select_survey_cases(const std::vector<ImpactReport>& reports,
                                                  const SurveyPredicate& predicate = {}) {
  std::vector<ImpactKey> out;
  for (const auto& r : reports)
    if (predicate(r)) out.push_back(r.key);
  std::sort(out.begin(), out.end());
  return out;
}

// --- vocabulary ------------------------------------------------------------------------

enum class Reason { Relevance, Organization, Readability, Transitions, Grammar, Conventions, Clarity, Repetition };

inline constexpr std::array<std::string_view, 8> kReasonNames = {"Relevance",   "Organization", "Readability",
                                                                 "Transitions", "Grammar",      "Conventions",
                                                                 "Clarity",     "Repetition"};

inline std::string_view to_string(Reason r) noexcept { return kReasonNames[static_cast<std::size_t>(r)]; }

inline std::optional<Reason> parse_reason(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kReasonNames.size(); ++i)
    if (kReasonNames[i] == s) return static_cast<Reason>(i);
  return std::nullopt;
}

enum class Direction { Lower, Equal, Higher };

inline std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Lower: return "Lower";
    case Direction::Equal: return "Equal";
    case Direction::Higher: break;
  }
  return "Higher";
}

inline std::optional<Direction> parse_direction(std::string_view s) noexcept {
  if (s == "Lower") return Direction::Lower;
  if (s == "Equal") return Direction::Equal;
  if (s == "Higher") return Direction::Higher;
  return std::nullopt;
}

// --- pairs -----------------------------------------------------------------------------

struct SurveyPair {
  std::string pair_id;
  Prompt prompt;
  std::string original_id;
  std::string original_text;
  int original_score = 0;
  std::string adversarial_text;
  TestKind test = TestKind::ShuffleSent;

  bool operator==(const SurveyPair&) const = default;
};

inline nlohmann::json pair_to_json(const SurveyPair& p) {
  return {{"pair_id", p.pair_id},
          {"prompt", prompt_to_json(p.prompt)},
          {"original_id", p.original_id},
          {"original_text", p.original_text},
          {"original_score", p.original_score},
          {"adversarial_text", p.adversarial_text},
          {"test", to_string(p.test)}};
}

inline SurveyPair pair_from_json(const nlohmann::json& j) {
  SurveyPair p;
  p.pair_id = j.at("pair_id").get<std::string>();
  p.prompt = prompt_from_json(j.at("prompt"));
  p.original_id = j.at("original_id").get<std::string>();
  p.original_text = j.at("original_text").get<std::string>();
  p.original_score = j.at("original_score").get<int>();
  p.adversarial_text = j.at("adversarial_text").get<std::string>();
  auto t = parse_test_kind(j.at("test").get<std::string>());
  if (!t) throw Error("survey pair " + p.pair_id + " has an unknown test");
  p.test = *t;
  if (p.adversarial_text == p.original_text) throw Error("survey pair " + p.pair_id + " does not change the text");
  return p;
}

/// What a rater sees. Group 2 never receives the original score.
inline nlohmann::json pair_payload(const SurveyPair& p, int group) {
  nlohmann::json j = {{"pair_id", p.pair_id},
                      {"group", group},
                      {"test", to_string(p.test)},
                      {"prompt",
                       {{"id", p.prompt.id},
                        {"question_text", p.prompt.question_text},
                        {"score_min", p.prompt.score_min},
                        {"score_max", p.prompt.score_max}}},
                      {"original_text", p.original_text},
                      {"adversarial_text", p.adversarial_text}};
  if (p.prompt.reading_passage) j["prompt"]["reading_passage"] = *p.prompt.reading_passage;
  if (group == 1) j["original_score"] = p.original_score;
  return j;
}

/// Up to `per_case` pairs for each flagged (test, prompt). The grid point of
/// the first flagged key for that case is used to generate the variant.
inline std::vector<SurveyPair> build_survey_pairs(const Corpus& corpus, const ResourcePack& pack,
                                                  const std::vector<ImpactKey>& flagged, std::uint64_t seed,
                                                  std::size_t per_case = 5) {
  std::map<std::pair<TestKind, std::string>, ImpactKey> cases;
  for (const auto& k : flagged) cases.emplace(std::make_pair(k.test, k.prompt_id), k);
  std::vector<SurveyPair> out;
  for (const auto& [ck, key] : cases) {
    std::size_t taken = 0;
    for (const auto& r : corpus.responses) {
      if (taken >= per_case) break;
      if (!r.human_score) continue;
      if (key.prompt_id != kPooledPrompt && r.prompt_id != key.prompt_id) continue;
      PerturbSpec s;
      s.test = key.test;
      s.c1 = key.c1;
      s.c2 = key.c2;
      s.bounded = key.bounded;
      s.seed = seed;
      const auto& prompt = corpus.prompt_of(r);
      std::string adv;
      try {
        adv = apply(s, r, prompt, pack).text;
      } catch (const PerturbError&) {
        continue;
      }
      if (adv == r.text) continue;
      const std::string id = "p-" + Digest{}.add(std::string_view(r.id)).add(s.digest()).hex();
      if (std::any_of(out.begin(), out.end(), [&](const SurveyPair& p) { return p.pair_id == id; })) continue;
      out.push_back({id, prompt, r.id, r.text, *r.human_score, std::move(adv), key.test});
      ++taken;
    }
  }
  return out;
}

inline std::vector<SurveyPair> load_survey_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open survey pairs " + path.string());
  std::vector<SurveyPair> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      out.push_back(pair_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("survey pairs line " + std::to_string(n) + ": " + e.what());
    }
  }
  if (out.empty()) throw Error("survey pairs file " + path.string() + " holds no pairs");
  return out;
}

// --- annotations -------------------------------------------------------------------------

struct Annotation {
  std::string pair_id;
  std::string annotator_id;
  int group = 1;
  std::optional<int> score_original;  // group 2 only
  int score_adversarial = 0;
  std::set<Reason> reasons;
  Direction direction = Direction::Equal;
  std::string comment;
  std::string timestamp;

  bool operator==(const Annotation&) const = default;
};

inline nlohmann::json annotation_to_json(const Annotation& a) {
  nlohmann::json reasons = nlohmann::json::array();
  for (auto r : a.reasons) reasons.push_back(to_string(r));
  nlohmann::json j = {{"pair_id", a.pair_id},
                      {"annotator_id", a.annotator_id},
                      {"group", a.group},
                      {"score_adversarial", a.score_adversarial},
                      {"reasons", reasons},
                      {"direction", to_string(a.direction)},
                      {"timestamp", a.timestamp}};
  j["score_original"] = a.score_original ? nlohmann::json(*a.score_original) : nlohmann::json(nullptr);
  j["comment"] = a.comment.empty() ? nlohmann::json(nullptr) : nlohmann::json(a.comment);
  return j;
}

/// Throws Error describing the first structural problem.
inline Annotation annotation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("annotation must be an object");
  Annotation a;
  try {
    a.pair_id = j.at("pair_id").get<std::string>();
    a.annotator_id = j.at("annotator_id").get<std::string>();
    a.group = j.at("group").get<int>();
    if (j.contains("score_original") && !j["score_original"].is_null()) a.score_original = j["score_original"].get<int>();
    a.score_adversarial = j.at("score_adversarial").get<int>();
    if (j.contains("reasons")) {
      for (const auto& r : j["reasons"]) {
        auto parsed = parse_reason(r.get<std::string>());
        if (!parsed) throw Error("unknown reason: " + r.get<std::string>());
        a.reasons.insert(*parsed);
      }
    }
    auto d = parse_direction(j.at("direction").get<std::string>());
    if (!d) throw Error("direction must be Lower, Equal or Higher");
    a.direction = *d;
    if (j.contains("comment") && !j["comment"].is_null()) a.comment = j["comment"].get<std::string>();
    if (j.contains("timestamp") && !j["timestamp"].is_null()) a.timestamp = j["timestamp"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad annotation field: ") + e.what());
  }
  return a;
}

/// The score the adversarial score is compared against.
inline int reference_score(const Annotation& a, const SurveyPair& p) {
  return a.group == 2 && a.score_original ? *a.score_original : p.original_score;
}

/// Empty when valid, else the reason for rejection.
inline std::string validate_annotation(const Annotation& a, const SurveyPair& p) {
  if (a.annotator_id.empty()) return "annotator_id is empty";
  if (a.group != 1 && a.group != 2) return "group must be 1 or 2";
  if (a.group == 1 && a.score_original) return "score_original is only collected from group 2";
  if (a.group == 2 && !a.score_original) return "group 2 annotations need score_original";
  if (!p.prompt.in_range(a.score_adversarial)) return "score_adversarial is outside the prompt range";
  if (a.score_original && !p.prompt.in_range(*a.score_original)) return "score_original is outside the prompt range";
  const int ref = reference_score(a, p);
  const Direction implied = a.score_adversarial < ref   ? Direction::Lower
                            : a.score_adversarial > ref ? Direction::Higher
                                                        : Direction::Equal;
  if (implied != a.direction) return "direction does not match the scores";
  if (a.direction != Direction::Equal && a.reasons.empty()) return "reasons are required when the score changes";
  return {};
}

// --- aggregation -------------------------------------------------------------------------

struct ReasonCount {
  Reason reason = Reason::Relevance;
  std::size_t count = 0;

  bool operator==(const ReasonCount&) const = default;
};

struct TestSummary {
  TestKind test = TestKind::ShuffleSent;
  std::size_t n = 0;
  double score_drop_pct = 0.0;
  double pct_people_down = 0.0;
  double pct_people_up = 0.0;
  std::vector<ReasonCount> reasons_down;  // most frequent first
  std::vector<ReasonCount> reasons_up;

  bool operator==(const TestSummary&) const = default;
};

struct SurveySummary {
  std::vector<TestSummary> tests;  // catalog order
  std::size_t annotations = 0;
  std::size_t unmatched = 0;  // annotations naming an unknown pair

  bool operator==(const SurveySummary&) const = default;
};

namespace detail {

inline std::vector<ReasonCount> rank_reasons(const std::map<Reason, std::size_t>& counts) {
  std::vector<ReasonCount> out;
  for (const auto& [r, c] : counts) out.push_back({r, c});
  std::stable_sort(out.begin(), out.end(), [](const ReasonCount& a, const ReasonCount& b) { return a.count > b.count; });
  return out;
}

}  // namespace detail

inline SurveySummary summarize(const std::vector<Annotation>& annotations, const std::map<std::string, SurveyPair>& pairs) {
  struct Acc {
    std::size_t n = 0, down = 0, up = 0;
    double drop_sum = 0.0;
    std::map<Reason, std::size_t> reasons_down, reasons_up;
  };
  std::map<TestKind, Acc> acc;
  SurveySummary s;
  s.annotations = annotations.size();
  for (const auto& a : annotations) {
    auto it = pairs.find(a.pair_id);
    if (it == pairs.end()) {
      ++s.unmatched;
      continue;
    }
    const auto& p = it->second;
    auto& t = acc[p.test];
    ++t.n;
    const int ref = reference_score(a, p);
    if (a.score_adversarial < ref) {
      ++t.down;
      t.drop_sum += 100.0 * (ref - a.score_adversarial) / p.prompt.range_width();
      for (auto r : a.reasons) ++t.reasons_down[r];
    } else if (a.score_adversarial > ref) {
      ++t.up;
      for (auto r : a.reasons) ++t.reasons_up[r];
    }
  }
  for (const auto& [test, t] : acc) {
    TestSummary ts;
    ts.test = test;
    ts.n = t.n;
    ts.pct_people_down = 100.0 * static_cast<double>(t.down) / static_cast<double>(t.n);
    ts.pct_people_up = 100.0 * static_cast<double>(t.up) / static_cast<double>(t.n);
    ts.score_drop_pct = t.down ? t.drop_sum / static_cast<double>(t.down) : 0.0;
    ts.reasons_down = detail::rank_reasons(t.reasons_down);
    ts.reasons_up = detail::rank_reasons(t.reasons_up);
    s.tests.push_back(std::move(ts));
  }
  return s;
}

inline std::map<std::string, SurveyPair> index_pairs(const std::vector<SurveyPair>& pairs) {
  std::map<std::string, SurveyPair> out;
  for (const auto& p : pairs) out.emplace(p.pair_id, p);
  return out;
}

inline nlohmann::json summary_to_json(const SurveySummary& s) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : s.tests) {
    auto reasons = [](const std::vector<ReasonCount>& rs) {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& r : rs) a.push_back({{"reason", to_string(r.reason)}, {"count", r.count}});
      return a;
    };
    tests.push_back({{"test", to_string(t.test)},
                     {"n", t.n},
                     {"score_drop_pct", t.score_drop_pct},
                     {"pct_people_down", t.pct_people_down},
                     {"pct_people_up", t.pct_people_up},
                     {"reasons_down", reasons(t.reasons_down)},
                     {"reasons_up", reasons(t.reasons_up)}});
  }
  return {{"tests", tests}, {"annotations", s.annotations}, {"unmatched", s.unmatched}};
}

/// Drop percentages for a training set, taken from a survey summary.
inline std::map<TestKind, double> drop_pct_from_summary(const SurveySummary& s) {
  std::map<TestKind, double> out;
  for (const auto& t : s.tests) out[t.test] = t.score_drop_pct;
  return out;
}

struct DivergenceRow {
  std::string scorer_id;
  TestKind test = TestKind::ShuffleSent;
  double human_drop_pct = 0.0;
  double machine_drop_pct = 0.0;
  double divergence = 0.0;  // human - machine
  std::size_t paired = 0;
  std::optional<double> t_stat;
  std::optional<double> p_value;
};

/// Machine drop per report = mu_neg*N_neg/100 - mu_pos*N_pos/100, averaged
/// over the pooled-prompt reports of each (scorer, test). When
/// `machine_adversarial` maps pair ids to a scorer's normalized adversarial
/// score, the human adversarial scores of that test are t-tested against it.
inline std::vector<DivergenceRow> human_machine_divergence(
    const SurveySummary& summary, const std::vector<ImpactReport>& reports,
    const std::vector<Annotation>& annotations = {}, const std::map<std::string, SurveyPair>& pairs = {},
    const std::map<std::string, std::map<std::string, double>>& machine_adversarial = {}) {
  std::map<std::pair<std::string, TestKind>, std::pair<double, std::size_t>> machine;
  for (const auto& r : reports) {
    if (r.key.prompt_id != kPooledPrompt) continue;
    auto& m = machine[{r.key.scorer_id, r.key.test}];
    m.first += r.mu_neg_pct * r.n_neg_pct / 100.0 - r.mu_pos_pct * r.n_pos_pct / 100.0;
    ++m.second;
  }
  std::vector<DivergenceRow> out;
  for (const auto& [key, m] : machine) {
    auto t = std::find_if(summary.tests.begin(), summary.tests.end(),
                          [&](const TestSummary& s) { return s.test == key.second; });
    if (t == summary.tests.end()) continue;
    DivergenceRow row;
    row.scorer_id = key.first;
    row.test = key.second;
    row.human_drop_pct = t->score_drop_pct;
    row.machine_drop_pct = m.first / static_cast<double>(m.second);
    row.divergence = row.human_drop_pct - row.machine_drop_pct;
    auto ms = machine_adversarial.find(key.first);
    if (ms != machine_adversarial.end()) {
      std::vector<ScorePair> tp;
      for (const auto& a : annotations) {
        auto p = pairs.find(a.pair_id);
        auto s = ms->second.find(a.pair_id);
        if (p == pairs.end() || s == ms->second.end() || p->second.test != key.second) continue;
        tp.push_back({s->second, normalize_score(a.score_adversarial, p->second.prompt)});
      }
      row.paired = tp.size();
      if (tp.size() >= 2) {
        const auto tt = paired_t_test(tp);
        row.t_stat = tt.t_stat;
        row.p_value = tt.p_value;
      }
    }
    out.push_back(std::move(row));
  }
  if (out.empty()) throw Error("survey summary and machine reports share no tests");
  return out;
}

// --- persistence ---------------------------------------------------------------------------

/// Append-only annotations.jsonl. Every append is one complete line written
/// under a single lock.
class AnnotationStore {
 public:
  explicit AnnotationStore(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (in) {
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
          records_.push_back(annotation_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
          throw Error("corrupt annotation log " + path_.string() + " at line " + std::to_string(n) + ": " + e.what());
        }
      }
      if (in.bad()) throw Error("cannot read annotation log " + path_.string());
    }
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw Error("annotation log " + path_.string() + " is not writable");
  }

  void append(const Annotation& a) {
    const std::string line = annotation_to_json(a).dump() + "\n";
    std::lock_guard lock(mu_);
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) throw Error("failed to append to " + path_.string());
    records_.push_back(a);
  }

  std::vector<Annotation> snapshot() const {
    std::lock_guard lock(mu_);
    return records_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::ofstream out_;
  std::vector<Annotation> records_;
};

/// Re-reads an annotation log from disk.
inline std::vector<Annotation> replay_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open annotation log " + path.string());
  std::vector<Annotation> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(annotation_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error("corrupt annotation log at line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace aesrt
