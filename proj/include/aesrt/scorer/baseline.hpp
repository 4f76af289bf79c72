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

// Per-prompt ridge regression over four surface features of a response.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

// <resolv.h> (pulled in by httplib) defines _res, which Eigen uses as a name.
#pragma push_macro("_res")
#undef _res
#include <Eigen/Dense>
#pragma pop_macro("_res")
#include <json.hpp>

#include "aesrt/corpus.hpp"
#include "aesrt/error.hpp"
#include "aesrt/keyphrase.hpp"
#include "aesrt/textops.hpp"

namespace aesrt {

inline constexpr std::size_t kFeatureCount = 4;

using FeatureVector = std::array<double, kFeatureCount>;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "log_words", "prompt_overlap", "type_token_ratio", "mean_sentence_length"};

/// Folded content words of a prompt's question and passage.
inline std::set<std::string> prompt_vocabulary(const Prompt& prompt) {
  std::set<std::string> vocab;
  auto add = [&](std::string_view text) {
    for (auto tok : tokens(text)) {
      const std::string lower = to_lower(token_core(tok).text);
      if (!lower.empty() && !is_stopword(lower)) vocab.insert(fold_term(lower));
    }
  };
  add(prompt.question_text);
  if (prompt.reading_passage) add(*prompt.reading_passage);
  return vocab;
}

/// log(1 + words), share of content words found in the prompt, type-token
/// ratio, and words per sentence. All zero for empty text.
inline FeatureVector extract_features(std::string_view text, const std::set<std::string>& vocab) {
  FeatureVector f{};
  const auto toks = tokens(text);
  if (toks.empty()) return f;
  std::set<std::string> types;
  std::size_t cores = 0, content = 0, overlap = 0;
  for (auto tok : toks) {
    const std::string lower = to_lower(token_core(tok).text);
    if (lower.empty()) continue;
    ++cores;
    types.insert(lower);
    if (is_stopword(lower)) continue;
    ++content;
    if (vocab.count(fold_term(lower))) ++overlap;
  }
  const double words = static_cast<double>(toks.size());
  const auto sentences = std::max<std::size_t>(split_sentences(text).size(), 1);
  f[0] = std::log1p(words);
  f[1] = content ? static_cast<double>(overlap) / static_cast<double>(content) : 0.0;
  f[2] = cores ? static_cast<double>(types.size()) / static_cast<double>(cores) : 0.0;
  f[3] = words / static_cast<double>(sentences);
  return f;
}

inline FeatureVector extract_features(std::string_view text, const Prompt& prompt) {
  return extract_features(text, prompt_vocabulary(prompt));
}

/// Trained weights for one prompt, over standardized features.
struct PromptModel {
  std::string prompt_id;
  int score_min = 0;
  int score_max = 1;
  FeatureVector mean{};
  FeatureVector scale{};  // standard deviation, 0 for constant features
  FeatureVector weights{};
  double intercept = 0.0;
  double lambda = 1.0;
  std::set<std::string> vocabulary;

  /// Unclamped linear prediction.
  double predict_raw(const FeatureVector& f) const noexcept {
    double y = intercept;
    for (std::size_t k = 0; k < kFeatureCount; ++k)
      if (scale[k] > 0.0) y += weights[k] * (f[k] - mean[k]) / scale[k];
    return y;
  }
};

struct BaselineModel {
  std::map<std::string, PromptModel> prompts;

  const PromptModel& at(const std::string& prompt_id) const {
    auto it = prompts.find(prompt_id);
    if (it == prompts.end()) throw ScorerError("baseline has no model for prompt " + prompt_id);
    return it->second;
  }
};

struct TrainingSample {
  std::string text;
  double target = 0.0;
};

inline constexpr std::size_t kMinTrainingResponses = 10;

/// Closed-form ridge fit on already extracted samples of one prompt.
inline PromptModel fit_prompt_model(const Prompt& prompt, const std::vector<TrainingSample>& samples, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ScorerError("ridge strength must be a finite non-negative number");
  if (samples.size() < kMinTrainingResponses)
    throw ScorerError("prompt " + prompt.id + " has " + std::to_string(samples.size()) + " scored responses; need at least " +
                      std::to_string(kMinTrainingResponses));
  PromptModel m;
  m.prompt_id = prompt.id;
  m.score_min = prompt.score_min;
  m.score_max = prompt.score_max;
  m.lambda = lambda;
  m.vocabulary = prompt_vocabulary(prompt);

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(kFeatureCount));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto f = extract_features(samples[static_cast<std::size_t>(i)].text, m.vocabulary);
    for (std::size_t k = 0; k < kFeatureCount; ++k) x(i, static_cast<Eigen::Index>(k)) = f[k];
    y(i) = samples[static_cast<std::size_t>(i)].target;
  }

  // standardize columns; constant columns drop out
  std::vector<Eigen::Index> live;
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    m.mean[k] = x.col(c).mean();
    const double var = (x.col(c).array() - m.mean[k]).square().mean();
    m.scale[k] = var > 1e-24 ? std::sqrt(var) : 0.0;
    if (m.scale[k] > 0.0) {
      x.col(c) = (x.col(c).array() - m.mean[k]) / m.scale[k];
      live.push_back(c);
    }
  }
  m.intercept = y.mean();
  if (live.empty()) return m;

  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(live.size()));
  for (std::size_t j = 0; j < live.size(); ++j) z.col(static_cast<Eigen::Index>(j)) = x.col(live[j]);
  const Eigen::VectorXd yc = y.array() - m.intercept;
  Eigen::MatrixXd a = z.transpose() * z;
  a.diagonal().array() += lambda;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < a.rows())
    throw ScorerError("normal matrix is singular for prompt " + prompt.id + "; use a ridge strength above 0");
  const Eigen::VectorXd w = lu.solve(z.transpose() * yc);
  for (std::size_t j = 0; j < live.size(); ++j) {
    const double v = w(static_cast<Eigen::Index>(j));
    if (!std::isfinite(v)) throw ScorerError("non-finite weight while training prompt " + prompt.id);
    m.weights[static_cast<std::size_t>(live[j])] = v;
  }
  return m;
}

/// Trains one model per prompt on responses that carry a human score.
inline BaselineModel train_baseline(const Corpus& corpus, double lambda = 1.0) {
  BaselineModel model;
  for (const auto& [id, prompt] : corpus.prompts) {
    std::vector<TrainingSample> samples;
    for (const auto* r : corpus.responses_for(id))
      if (r->human_score) samples.push_back({r->text, static_cast<double>(*r->human_score)});
    model.prompts.emplace(id, fit_prompt_model(prompt, samples, lambda));
  }
  if (model.prompts.empty()) throw ScorerError("corpus has no prompts to train on");
  return model;
}

/// Prediction clamped to the prompt range. Empty text scores the minimum.
inline double baseline_score(const PromptModel& m, std::string_view text) {
  if (word_count(text) == 0) return m.score_min;
  const double y = m.predict_raw(extract_features(text, m.vocabulary));
  return std::clamp(y, static_cast<double>(m.score_min), static_cast<double>(m.score_max));
}

inline double baseline_score(const BaselineModel& model, const Prompt& prompt, std::string_view text) {
  return baseline_score(model.at(prompt.id), text);
}

inline nlohmann::json baseline_to_json(const BaselineModel& model) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [id, m] : model.prompts) {
    nlohmann::json j;
    j["features"] = kFeatureNames;
    j["mean"] = m.mean;
    j["scale"] = m.scale;
    j["weights"] = m.weights;
    j["intercept"] = m.intercept;
    j["lambda"] = m.lambda;
    j["score_min"] = m.score_min;
    j["score_max"] = m.score_max;
    out[id] = std::move(j);
  }
  return out;
}

}  // namespace aesrt
