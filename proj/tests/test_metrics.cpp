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

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include "aesrt/metrics.hpp"

namespace aesrt {
namespace {

// --- oracles, written straight from the definitions --------------------------------

std::optional<double> qwk_oracle(const std::vector<int>& a, const std::vector<int>& b, int lo, int hi) {
  const int cats = hi - lo + 1;
  const double n = static_cast<double>(a.size());
  double wo = 0.0, we = 0.0;
  for (int i = 0; i < cats; ++i) {
    for (int j = 0; j < cats; ++j) {
      const double w = static_cast<double>((i - j) * (i - j)) / ((cats - 1) * (cats - 1));
      double o = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) o += (a[k] - lo == i && b[k] - lo == j) ? 1.0 : 0.0;
      double e = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t l = 0; l < b.size(); ++l) e += (a[k] - lo == i && b[l] - lo == j) ? 1.0 : 0.0;
      wo += w * o;
      we += w * e / n;
    }
  }
  if (we == 0.0) return std::nullopt;
  return 1.0 - wo / we;
}

std::optional<double> pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  long double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
  }
  const long double num = n * sxy - sx * sy;
  const long double den = std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  if (den == 0) return std::nullopt;
  return static_cast<double>(num / den);
}

struct MetricsOracle {
  double n_pos, n_neg, mu_pos, mu_neg, sigma;
};

MetricsOracle metrics_oracle(const std::vector<ScorePair>& pairs, bool impacted) {
  std::vector<double> d;
  for (const auto& p : pairs) d.push_back(p.adversarial - p.original);
  const double n = static_cast<double>(d.size());
  double pos = 0, neg = 0, sum_pos = 0, sum_neg = 0;
  for (double x : d) {
    if (x > 0) {
      pos += 1;
      sum_pos += x;
    }
    if (x < 0) {
      neg += 1;
      sum_neg -= x;
    }
  }
  double mean = 0;
  for (double x : d) mean += x / n;
  double var = 0;
  for (double x : d) var += (x - mean) * (x - mean) / n;
  MetricsOracle m;
  m.n_pos = 100 * pos / n;
  m.n_neg = 100 * neg / n;
  m.mu_pos = impacted ? (pos > 0 ? sum_pos / pos : 0) : sum_pos / n;
  m.mu_neg = impacted ? (neg > 0 ? sum_neg / neg : 0) : sum_neg / n;
  m.sigma = std::sqrt(var);
  return m;
}

struct TOracle {
  std::optional<double> t, p;
};

TOracle t_oracle(const std::vector<double>& d) {
  const double n = static_cast<double>(d.size());
  double mean = 0;
  for (double x : d) mean += x;
  mean /= n;
  double ss = 0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1));
  if (sd == 0) return {};
  const double t = mean / (sd / std::sqrt(n));
  boost::math::students_t dist(n - 1);
  return {t, 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)))};
}

std::vector<ScorePair> from_differences(const std::vector<double>& d) {
  std::vector<ScorePair> out;
  for (double x : d) out.push_back({50.0, 50.0 - x});  // original - adversarial = x
  return out;
}

// --- fixtures -------------------------------------------------------------------------

TEST(Qwk, PerfectAgreement) {
  const std::vector<int> a = {2, 5, 7, 9};
  EXPECT_DOUBLE_EQ(*qwk(a, a, 2, 12), 1.0);
}

TEST(Qwk, HandComputedZero) {
  const std::vector<int> a = {0, 0, 1, 1};
  const std::vector<int> b = {0, 1, 0, 1};
  EXPECT_NEAR(*qwk(a, b, 0, 1), 0.0, 1e-12);
}

TEST(Qwk, ReversedMatchesOracle) {
  const std::vector<int> a = {0, 1, 2};
  const std::vector<int> b = {2, 1, 0};
  EXPECT_NEAR(*qwk(a, b, 0, 2), *qwk_oracle(a, b, 0, 2), 1e-9);
  EXPECT_NEAR(*qwk(a, b, 0, 2), -1.0, 1e-12);
}

TEST(Qwk, Preconditions) {
  const std::vector<int> one = {1};
  const std::vector<int> two = {1, 2};
  const std::vector<int> bad = {1, 9};
  EXPECT_THROW(qwk(one, one, 0, 3), std::invalid_argument);
  EXPECT_THROW(qwk(two, one, 0, 3), std::invalid_argument);
  EXPECT_THROW(qwk(two, bad, 0, 3), std::invalid_argument);
  const std::vector<int> same = {1, 1};
  EXPECT_FALSE(qwk(same, same, 0, 3).has_value());
}

TEST(Pearson, Fixtures) {
  const std::vector<double> x = {1, 2, 3, 4};
  std::vector<double> affine;
  for (double v : x) affine.push_back(2 * v + 3);
  EXPECT_NEAR(*pearson(x, x), 1.0, 1e-12);
  EXPECT_NEAR(*pearson(x, affine), 1.0, 1e-12);
  EXPECT_NEAR(*pearson(x, std::vector<double>{1, 3, 2, 4}), 0.8, 1e-12);
  EXPECT_FALSE(pearson(x, std::vector<double>{2, 2, 2, 2}).has_value());
}

TEST(AdversarialMetrics, NoImpact) {
  const std::vector<ScorePair> p = {{10, 10}, {30, 30}};
  const auto m = adversarial_metrics(p);
  EXPECT_EQ(m.n_pos_pct, 0.0);
  EXPECT_EQ(m.n_neg_pct, 0.0);
  EXPECT_EQ(m.mu_pos_pct, 0.0);
  EXPECT_EQ(m.mu_neg_pct, 0.0);
  EXPECT_EQ(m.sigma_pct, 0.0);
}

TEST(AdversarialMetrics, ThreePairFixture) {
  const std::vector<ScorePair> p = {{20, 30}, {40, 40}, {60, 50}};
  const auto m = adversarial_metrics(p);
  EXPECT_NEAR(m.n_pos_pct, 33.333, 1e-3);
  EXPECT_NEAR(m.n_neg_pct, 33.333, 1e-3);
  EXPECT_NEAR(m.mu_pos_pct, 10.0, 1e-3);
  EXPECT_NEAR(m.mu_neg_pct, 10.0, 1e-3);
  EXPECT_NEAR(m.sigma_pct, 8.165, 1e-3);
}

TEST(AdversarialMetrics, SinglePair) {
  const std::vector<ScorePair> p = {{0, 100}};
  const auto m = adversarial_metrics(p);
  EXPECT_EQ(m.n_pos_pct, 100.0);
  EXPECT_EQ(m.mu_pos_pct, 100.0);
  EXPECT_EQ(m.sigma_pct, 0.0);
}

TEST(AdversarialMetrics, TotalDenominator) {
  const std::vector<ScorePair> p = {{20, 30}, {40, 40}, {60, 50}};
  const auto m = adversarial_metrics(p, MuDenominator::Total);
  EXPECT_NEAR(m.mu_pos_pct, 10.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.mu_neg_pct, 10.0 / 3.0, 1e-12);
  EXPECT_THROW(adversarial_metrics(std::vector<ScorePair>{}), std::invalid_argument);
}

TEST(PairedTTest, ZeroMean) {
  const auto r = paired_t_test(from_differences({-1, 1, -1, 1}));
  ASSERT_TRUE(r.t_stat && r.p_value);
  EXPECT_NEAR(*r.t_stat, 0.0, 1e-12);
  EXPECT_NEAR(*r.p_value, 1.0, 1e-12);
}

TEST(PairedTTest, MatchesStudentT) {
  const std::vector<double> d = {1, 1, 1, 1, 2};
  const auto r = paired_t_test(from_differences(d));
  const auto o = t_oracle(d);
  ASSERT_TRUE(r.t_stat && r.p_value);
  EXPECT_EQ(r.dof, 4u);
  EXPECT_NEAR(*r.t_stat, 6.0, 1e-9);
  EXPECT_NEAR(*r.t_stat, *o.t, 1e-9);
  EXPECT_NEAR(*r.p_value, *o.p, 1e-6);
}

TEST(PairedTTest, Preconditions) {
  EXPECT_THROW(paired_t_test(from_differences({1})), std::invalid_argument);
  const auto constant = paired_t_test(from_differences({2, 2, 2}));
  EXPECT_FALSE(constant.t_stat.has_value());
  EXPECT_FALSE(constant.p_value.has_value());
}

// --- randomized equivalence -------------------------------------------------------------

TEST(MetricsOracle, TwoHundredRandomCases) {
  std::mt19937_64 gen(12345);
  for (int trial = 0; trial < 200; ++trial) {
    const int lo = static_cast<int>(gen() % 4);
    const int hi = lo + 1 + static_cast<int>(gen() % 10);
    const std::size_t n = 2 + gen() % 30;
    std::vector<int> a(n), b(n);
    std::vector<double> x(n), y(n), d(n);
    std::vector<ScorePair> pairs(n);
    std::uniform_int_distribution<int> cat(lo, hi);
    std::uniform_real_distribution<double> pct(0.0, 100.0);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = cat(gen);
      b[i] = cat(gen);
      x[i] = pct(gen);
      y[i] = pct(gen);
      // a third of the pairs are ties so both signs and zeros occur
      pairs[i] = {x[i], gen() % 3 == 0 ? x[i] : y[i]};
      d[i] = pairs[i].original - pairs[i].adversarial;
    }
    const auto k = qwk(a, b, lo, hi);
    const auto ko = qwk_oracle(a, b, lo, hi);
    ASSERT_EQ(k.has_value(), ko.has_value());
    if (k) {
      EXPECT_NEAR(*k, *ko, 1e-9) << "trial " << trial;
    }

    const auto r = pearson(x, y);
    const auto ro = pearson_oracle(x, y);
    ASSERT_EQ(r.has_value(), ro.has_value());
    if (r) {
      EXPECT_NEAR(*r, *ro, 1e-9) << "trial " << trial;
    }

    for (bool impacted : {true, false}) {
      const auto m = adversarial_metrics(pairs, impacted ? MuDenominator::Impacted : MuDenominator::Total);
      const auto mo = metrics_oracle(pairs, impacted);
      EXPECT_NEAR(m.n_pos_pct, mo.n_pos, 1e-9);
      EXPECT_NEAR(m.n_neg_pct, mo.n_neg, 1e-9);
      EXPECT_NEAR(m.mu_pos_pct, mo.mu_pos, 1e-9);
      EXPECT_NEAR(m.mu_neg_pct, mo.mu_neg, 1e-9);
      EXPECT_NEAR(m.sigma_pct, mo.sigma, 1e-9);
    }

    const auto t = paired_t_test(pairs);
    const auto to = t_oracle(d);
    ASSERT_EQ(t.t_stat.has_value(), to.t.has_value());
    if (t.t_stat) {
      EXPECT_NEAR(*t.t_stat, *to.t, 1e-9 * std::max(1.0, std::fabs(*to.t)));
      EXPECT_NEAR(*t.p_value, *to.p, 1e-6) << "trial " << trial;
    }
  }
}

TEST(IncompleteBeta, KnownValues) {
  EXPECT_NEAR(incomplete_beta(1, 1, 0.3), 0.3, 1e-12);
  EXPECT_NEAR(incomplete_beta(2, 3, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(incomplete_beta(2, 3, 1.0), 1.0, 1e-15);
  // I_x(a, b) = 1 - I_{1-x}(b, a)
  EXPECT_NEAR(incomplete_beta(2.5, 0.5, 0.7), 1.0 - incomplete_beta(0.5, 2.5, 0.3), 1e-12);
}

}  // namespace
}  // namespace aesrt
