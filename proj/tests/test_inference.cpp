/*
 * Copyright 2026 The predictu Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "predictu/error.hpp"
#include "predictu/inference.hpp"
#include "predictu/random.hpp"

namespace predictu {
namespace {

CaseControlCounts make_counts(const std::vector<std::int64_t>& cases,
                              const std::vector<std::int64_t>& controls, double rho) {
  std::vector<CountRow> rows;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    rows.push_back({{i, "g" + std::to_string(i)}, cases[i], controls[i]});
  }
  return CaseControlCounts::from_rows(rows, rho);
}

std::vector<GenotypeId> ids(std::size_t g) {
  std::vector<GenotypeId> out;
  for (std::size_t i = 0; i < g; ++i) out.push_back({i, "g" + std::to_string(i)});
  return out;
}

// Order by ascending plug-in risk n_case/(n_case + n_control), then index.
std::vector<GenotypeId> risk_order(const CaseControlCounts& c) {
  std::vector<GenotypeId> out = ids(c.rows.size());
  std::stable_sort(out.begin(), out.end(), [&](const GenotypeId& a, const GenotypeId& b) {
    const auto& ra = c.rows[a.index];
    const auto& rb = c.rows[b.index];
    return ra.n_case * (rb.n_case + rb.n_control) < rb.n_case * (ra.n_case + ra.n_control);
  });
  return out;
}

const CaseControlCounts kTwo = make_counts({2, 8}, {8, 2}, 0.1);

TEST(TwoSampleU, TwoGenotypeExample) {
  const UEstimate u = two_sample_u(kTwo, ids(2));
  EXPECT_NEAR(u.u_hat, 0.108, 1e-15);
  // Plug-in table: 2 p1 p2 (r2 - r1).
  const double a = 0.1 * 0.2 + 0.9 * 0.8;
  const double b = 0.1 * 0.8 + 0.9 * 0.2;
  const double r1 = 0.1 * 0.2 / a;
  const double r2 = 0.1 * 0.8 / b;
  EXPECT_NEAR(u.u_hat, 2 * a * b * (r2 - r1), 1e-15);
}

TEST(TwoSampleU, IdenticalDistributionsGiveZero) {
  EXPECT_EQ(two_sample_u(make_counts({3, 5, 2}, {6, 10, 4}, 0.2), ids(3)).u_hat, 0.0);
}

TEST(TwoSampleU, ReversalNegates) {
  auto rev = ids(2);
  std::reverse(rev.begin(), rev.end());
  EXPECT_NEAR(two_sample_u(kTwo, rev).u_hat, -0.108, 1e-15);
}

TEST(TwoSampleU, ContractionEqualsPairwisePlugIn) {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t g = 1 + rng() % 7;
    std::vector<std::int64_t> c(g);
    std::vector<std::int64_t> d(g);
    for (std::size_t i = 0; i < g; ++i) {
      c[i] = static_cast<std::int64_t>(rng() % 30);
      d[i] = static_cast<std::int64_t>(rng() % 30);
    }
    c[0] += 1;
    d[g - 1] += 1;
    const double rho = 0.05 + 0.4 * static_cast<double>(rng() % 100) / 100.0;
    const CaseControlCounts counts = make_counts(c, d, rho);
    const auto order = ids(g);
    const double nd = static_cast<double>(counts.n_case);
    const double nc = static_cast<double>(counts.n_control);
    std::vector<double> p;
    std::vector<double> r;
    for (std::size_t i = 0; i < g; ++i) {
      const double pc = static_cast<double>(c[i]) / nd;
      const double pd = static_cast<double>(d[i]) / nc;
      const double pi = rho * pc + (1 - rho) * pd;
      p.push_back(pi);
      r.push_back(pi > 0 ? rho * pc / pi : 0.0);
    }
    const UEstimate u = two_sample_u(counts, order);
    EXPECT_NEAR(u.u_hat, oracle::pairwise_u(p, r), 1e-12);
    EXPECT_NEAR(u.u_hat, oracle::subject_variance(c, d, rho).u, 1e-12);
    const auto phi = pair_kernel_table(counts, order);
    EXPECT_EQ(contract(phi, counts), concordance_sum(align_counts(counts, order)));
  }
}

TEST(TwoSampleU, EmptyArmRejected) {
  std::vector<CountRow> rows = {{{0, "a"}, 0, 3}, {{1, "b"}, 0, 2}};
  CaseControlCounts c;
  c.rows = rows;
  c.n_control = 5;
  c.rho = 0.1;
  EXPECT_THROW(two_sample_u(c, ids(2)), InputError);
}

TEST(AsymptoticVariance, MatchesSubjectLevelOracle) {
  const auto oracle_v = oracle::subject_variance({2, 8}, {8, 2}, 0.1);
  EXPECT_NEAR(asymptotic_variance_u(kTwo, ids(2)), oracle_v.variance, 1e-15);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t g = 1 + rng() % 6;
    std::vector<std::int64_t> c(g);
    std::vector<std::int64_t> d(g);
    for (std::size_t i = 0; i < g; ++i) {
      c[i] = static_cast<std::int64_t>(rng() % 12);
      d[i] = static_cast<std::int64_t>(rng() % 12);
    }
    c[0] += 2;
    d[0] += 2;
    const CaseControlCounts counts = make_counts(c, d, 0.2);
    const auto o = oracle::subject_variance(c, d, 0.2);
    EXPECT_NEAR(asymptotic_variance_u(counts, ids(g)), o.variance, 1e-14);
  }
}

TEST(AsymptoticVariance, ConcentratedIsZeroAndScalesInverselyWithN) {
  EXPECT_EQ(asymptotic_variance_u(make_counts({5}, {7}, 0.3), ids(1)), 0.0);
  const double v1 = asymptotic_variance_u(kTwo, ids(2));
  const double v2 = asymptotic_variance_u(make_counts({4, 16}, {16, 4}, 0.1), ids(2));
  EXPECT_GE(v2 / v1, 0.4);
  EXPECT_LE(v2 / v1, 0.6);
  EXPECT_THROW(asymptotic_variance_u(make_counts({1, 0}, {3, 3}, 0.1), ids(2)), InputError);
}

TEST(PopulationVariance, MatchesIndividualExpansion) {
  RiskTable t;
  t.rho = 0.21;
  t.entries = {{{0, "a"}, 0.5, 0.1}, {{1, "b"}, 0.3, 0.2}, {{2, "c"}, 0.2, 0.5}};
  EXPECT_NEAR(population_variance_u(t, 1000),
              oracle::individual_population_variance({500, 300, 200}, {0.1, 0.2, 0.5}), 1e-15);
  RiskTable one;
  one.rho = 0.1;
  one.entries = {{{0, "a"}, 1.0, 0.1}};
  EXPECT_EQ(population_variance_u(one, 100), 0.0);
  RiskTable flat = t;
  for (auto& e : flat.entries) e.r = 0.3;
  EXPECT_NEAR(population_variance_u(flat, 1000), 0.0, 1e-18);
  EXPECT_THROW(population_variance_u(t, 1), InputError);
}

TEST(LargestRemainder, SumsExactly) {
  const std::vector<double> p = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const auto n = largest_remainder_counts(p, 100);
  EXPECT_EQ(n[0] + n[1] + n[2], 100);
  EXPECT_EQ(n[0], 34);
}

TEST(AsymptoticCi, DegenerateCases) {
  UEstimate e;
  e.u_hat = 0.2;
  e.variance = 0.0;
  const UEstimate a = asymptotic_ci(e, 0.95);
  EXPECT_EQ(a.ci->lower, 0.2);
  EXPECT_EQ(a.ci->upper, 0.2);
  e.variance = 0.01;
  const UEstimate b = asymptotic_ci(e, 0.0);
  EXPECT_NEAR(b.ci->lower, 0.2, 1e-15);
  EXPECT_NEAR(b.ci->upper, 0.2, 1e-15);
  const UEstimate c = asymptotic_ci(e, 0.95);
  EXPECT_NEAR(c.ci->upper - 0.2, 1.959963984540054 * 0.1, 1e-12);
}

TEST(PercentileInterval, TypeSevenQuantiles) {
  const ConfidenceInterval ci = percentile_interval({4, 1, 3, 2, 5}, 0.5);
  EXPECT_NEAR(ci.lower, 2.0, 1e-15);
  EXPECT_NEAR(ci.upper, 4.0, 1e-15);
  EXPECT_THROW(percentile_interval({}, 0.9), InputError);
}

TEST(Bootstrap, SingleReplicateCollapses) {
  ResamplePlan plan;
  plan.n_replicates = 1;
  plan.seed = 7;
  const UEstimate b = bootstrap_ci(kTwo, ids(2), plan, 0.95);
  EXPECT_EQ(b.ci->lower, b.ci->upper);
  EXPECT_EQ(b.n_replicates, 1u);
}

TEST(Bootstrap, DeterministicAndWorkerIndependent) {
  const CaseControlCounts c = make_counts({50, 60, 100}, {450, 240, 100}, 0.21);
  ResamplePlan plan;
  plan.n_replicates = 200;
  plan.seed = 1;
  plan.workers = 1;
  const UEstimate a = bootstrap_ci(c, ids(3), plan, 0.95);
  const UEstimate b = bootstrap_ci(c, ids(3), plan, 0.95);
  plan.workers = 4;
  const UEstimate d = bootstrap_ci(c, ids(3), plan, 0.95);
  EXPECT_EQ(a.ci->lower, b.ci->lower);
  EXPECT_EQ(a.ci->upper, d.ci->upper);
  EXPECT_EQ(a.variance, d.variance);
  EXPECT_LT(a.ci->lower, a.u_hat);
  EXPECT_GT(a.ci->upper, a.u_hat);
  plan.seed = 2;
  EXPECT_NE(bootstrap_ci(c, ids(3), plan, 0.95).ci->lower, a.ci->lower);
}

TEST(Bootstrap, FullBandPartialEqualsGlobal) {
  const CaseControlCounts c = make_counts({50, 60, 100}, {450, 240, 100}, 0.21);
  ResamplePlan plan;
  plan.n_replicates = 100;
  plan.seed = 3;
  const UEstimate g = bootstrap_ci(c, ids(3), plan, 0.9);
  const UEstimate p = partial_u_variance(c, ids(3), {0.0, 1.0}, plan, 0.9);
  EXPECT_NEAR(p.u_hat, g.u_hat, 1e-12);
  EXPECT_NEAR(p.ci->lower, g.ci->lower, 1e-12);
  EXPECT_NEAR(p.ci->upper, g.ci->upper, 1e-12);
  EXPECT_NEAR(p.variance, g.variance, 1e-14);
}

TEST(Bootstrap, PopulationUInsideIntervalOnLargeSample) {
  const CaseControlCounts c = make_counts({500, 600, 1000}, {4500, 2400, 1000}, 0.21);
  ResamplePlan plan;
  plan.n_replicates = 300;
  plan.seed = 5;
  const UEstimate b = bootstrap_ci(c, risk_order(c), plan, 0.95);
  EXPECT_LT(b.ci->lower, 0.146);
  EXPECT_GT(b.ci->upper, 0.146);
}

TEST(Permutation, PerfectSeparationHitsMinimum) {
  const CaseControlCounts c = make_counts({0, 40}, {40, 0}, 0.3);
  ResamplePlan plan;
  plan.n_replicates = 199;
  plan.seed = 9;
  plan.scheme = ResampleScheme::LabelPermutation;
  EXPECT_NEAR(permutation_test(c, ids(2), plan), 1.0 / 200.0, 1e-15);
}

TEST(Permutation, DeterministicAndBounded) {
  const CaseControlCounts c = make_counts({10, 12, 9}, {11, 10, 12}, 0.1);
  ResamplePlan plan;
  plan.n_replicates = 300;
  plan.seed = 11;
  plan.scheme = ResampleScheme::LabelPermutation;
  const double p1 = permutation_test(c, ids(3), plan);
  EXPECT_EQ(p1, permutation_test(c, ids(3), plan));
  EXPECT_GT(p1, 0.1);
  EXPECT_LE(p1, 1.0);
}

TEST(SampleVariance, Basic) {
  const std::vector<double> v = {1, 2, 3, 4};
  EXPECT_NEAR(sample_variance(v), 5.0 / 3.0, 1e-15);
}

}  // namespace
}  // namespace predictu
