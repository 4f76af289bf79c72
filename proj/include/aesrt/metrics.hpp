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

// Agreement statistics and overstability metrics.
//
// Values that are mathematically undefined (a single shared QWK category,
// zero variance) come back as std::nullopt instead of NaN.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aesrt {

/// Rounds half away from zero onto the integer category grid.
inline int to_category(double score) noexcept { return static_cast<int>(std::lround(score)); }

/// Quadratic weighted kappa over the categories [score_min, score_max]:
/// k = 1 - sum(w*O) / sum(w*E), w_ij = (i-j)^2 / (N-1)^2.
inline std::optional<double> qwk(std::span<const int> a, std::span<const int> b, int score_min, int score_max) {
  if (a.size() != b.size()) throw std::invalid_argument("qwk: rating lists differ in length");
  if (a.size() < 2) throw std::invalid_argument("qwk: need at least two ratings");
  if (score_max <= score_min) throw std::invalid_argument("qwk: empty score range");
  const std::size_t cats = static_cast<std::size_t>(score_max - score_min + 1);
  std::vector<double> observed(cats * cats, 0.0);
  std::vector<double> hist_a(cats, 0.0);
  std::vector<double> hist_b(cats, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] < score_min || a[k] > score_max || b[k] < score_min || b[k] > score_max)
      throw std::invalid_argument("qwk: rating outside the score range");
    const auto i = static_cast<std::size_t>(a[k] - score_min);
    const auto j = static_cast<std::size_t>(b[k] - score_min);
    observed[i * cats + j] += 1.0;
    hist_a[i] += 1.0;
    hist_b[j] += 1.0;
  }
  const double n = static_cast<double>(a.size());
  const double denom_w = static_cast<double>((cats - 1) * (cats - 1));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < cats; ++i) {
    for (std::size_t j = 0; j < cats; ++j) {
      const double d = static_cast<double>(i) - static_cast<double>(j);
      const double w = d * d / denom_w;
      num += w * observed[i * cats + j];
      den += w * hist_a[i] * hist_b[j] / n;
    }
  }
  if (den == 0.0) return std::nullopt;
  return 1.0 - num / den;
}

/// QWK on real-valued scores, rounded to categories first.
inline std::optional<double> qwk_real(std::span<const double> a, std::span<const double> b, int score_min,
                                      int score_max) {
  std::vector<int> ia;
  std::vector<int> ib;
  for (double x : a) ia.push_back(to_category(x));
  for (double x : b) ib.push_back(to_category(x));
  return qwk(ia, ib, score_min, score_max);
}

/// Pearson's r from the raw sums.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: lists differ in length");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  // centred sums are the same quantities as n*sum(xy) - sum(x)*sum(y) etc.
  // divided by n, with far less cancellation
  const double mx = sx / n;
  const double my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  double r = sxy / std::sqrt(sxx * syy);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return r;
}

struct AgreementReport {
  std::optional<double> qwk;
  std::optional<double> pearson;
  std::size_t n = 0;
};

inline AgreementReport agreement(std::span<const double> human, std::span<const double> machine, int score_min,
                                 int score_max) {
  return {qwk_real(human, machine, score_min, score_max), pearson(human, machine), human.size()};
}

// --- overstability metrics -------------------------------------------------------

/// One response: f(r) and f(r') as percentages of the score range.
struct ScorePair {
  double original = 0.0;
  double adversarial = 0.0;
};

/// What the mean shift of impacted samples is divided by.
enum class MuDenominator {
  Impacted,  // count of positively (negatively) impacted samples
  Total,     // all n samples
};

struct AdversarialMetrics {
  std::size_t n = 0;
  double n_pos_pct = 0.0;
  double n_neg_pct = 0.0;
  double mu_pos_pct = 0.0;
  double mu_neg_pct = 0.0;
  double sigma_pct = 0.0;
};

inline AdversarialMetrics adversarial_metrics(std::span<const ScorePair> pairs,
                                              MuDenominator denominator = MuDenominator::Impacted) {
  AdversarialMetrics m;
  m.n = pairs.size();
  if (pairs.empty()) throw std::invalid_argument("adversarial_metrics: no pairs");
  std::size_t pos = 0, neg = 0;
  double up = 0.0, down = 0.0, mean_d = 0.0;
  for (const auto& p : pairs) {
    if (p.original < p.adversarial) {
      ++pos;
      up += p.adversarial - p.original;
    } else if (p.original > p.adversarial) {
      ++neg;
      down += p.original - p.adversarial;
    }
    mean_d += p.original - p.adversarial;
  }
  const double n = static_cast<double>(pairs.size());
  mean_d /= n;
  double ss = 0.0;
  for (const auto& p : pairs) {
    const double d = p.original - p.adversarial - mean_d;
    ss += d * d;
  }
  m.n_pos_pct = 100.0 * static_cast<double>(pos) / n;
  m.n_neg_pct = 100.0 * static_cast<double>(neg) / n;
  if (denominator == MuDenominator::Impacted) {
    m.mu_pos_pct = pos ? up / static_cast<double>(pos) : 0.0;
    m.mu_neg_pct = neg ? down / static_cast<double>(neg) : 0.0;
  } else {
    m.mu_pos_pct = up / n;
    m.mu_neg_pct = down / n;
  }
  m.sigma_pct = std::sqrt(ss / n);
  return m;
}

// --- paired t-test -------------------------------------------------------------

namespace detail {

/// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cf(a, b, x) / a;
  return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability of Student's t with `dof` degrees of freedom.
inline double student_t_two_sided(double t, double dof) {
  return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

struct TTestResult {
  std::optional<double> t_stat;
  std::size_t dof = 0;
  std::optional<double> p_value;
};

/// Two-tailed paired t-test on d_i = f(r_i) - f(r'_i).
inline TTestResult paired_t_test(std::span<const ScorePair> pairs) {
  if (pairs.size() < 2) throw std::invalid_argument("paired_t_test: need at least two pairs");
  const double n = static_cast<double>(pairs.size());
  double mean = 0.0;
  for (const auto& p : pairs) mean += p.original - p.adversarial;
  mean /= n;
  double ss = 0.0;
  for (const auto& p : pairs) {
    const double d = p.original - p.adversarial - mean;
    ss += d * d;
  }
  TTestResult r;
  r.dof = pairs.size() - 1;
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) return r;
  const double t = mean / (sd / std::sqrt(n));
  r.t_stat = t;
  double p = student_t_two_sided(t, static_cast<double>(r.dof));
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  r.p_value = p;
  return r;
}

/// Paired t-test on two score lists.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: lists differ in length");
  std::vector<ScorePair> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) pairs.push_back({a[i], b[i]});
  return paired_t_test(pairs);
}

}  // namespace aesrt
