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
#include <filesystem>

#include <gtest/gtest.h>

#include "predictu/error.hpp"
#include "predictu/simulate.hpp"
#include "predictu/summary_indices.hpp"

namespace predictu {
namespace {

DiseaseModel one_snp() {
  return model_from_penetrance("one", {Snp{0.5, InheritanceMode::Additive, 1.0, {}}},
                               {0.1, 0.2, 0.3});
}

double direct_variance(const DiseaseModel& m) {
  const auto p = genotype_probabilities(m.snps);
  double rho = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) rho += p[i] * m.penetrance[i];
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    v += p[i] * (m.penetrance[i] - rho) * (m.penetrance[i] - rho);
  }
  return v;
}

TEST(Population, OneSnpExample) {
  const DiseaseModel m = one_snp();
  const auto p = genotype_probabilities(m.snps);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  EXPECT_NEAR(p[2], 0.25, 1e-15);
  EXPECT_NEAR(implied_prevalence(m), 0.2, 1e-15);
  PopulationSpec spec;
  spec.model = m;
  spec.size = 1000;
  const Population pop = build_population(spec);
  EXPECT_EQ(pop.counts, (std::vector<std::int64_t>{250, 500, 250}));
  EXPECT_NEAR(pop.rho, 0.2, 1e-15);
  EXPECT_NEAR(pop.case_distribution[2], 0.25 * 0.3 / 0.2, 1e-15);
  EXPECT_NEAR(pop.control_distribution[0], 0.25 * 0.9 / 0.8, 1e-15);
  EXPECT_TRUE(pop.truth.is_monotone());
}

TEST(Population, FourSnpsGiveEightyOneGenotypes) {
  std::vector<Snp> snps(4, Snp{0.3, InheritanceMode::Additive, 1.2, {}});
  const DiseaseModel m = make_disease_model("four", snps, {}, 0.016);
  EXPECT_EQ(genotype_count(4), 81u);
  EXPECT_EQ(m.penetrance.size(), 81u);
  EXPECT_NEAR(implied_prevalence(m), 0.016, 1e-6);
  EXPECT_EQ(genotype_digits(5, 4), (std::vector<int>{2, 1, 0, 0}));
}

TEST(Population, EqualPenetranceGivesZeroU) {
  const DiseaseModel m = model_from_penetrance(
      "flat", {Snp{0.2, InheritanceMode::Additive, 1.0, {}}}, {0.3, 0.3, 0.3});
  PopulationSpec spec;
  spec.model = m;
  spec.size = 5000;
  const Population pop = build_population(spec);
  EXPECT_NEAR(predictiveness_u(pop.truth).value, 0.0, 1e-15);
  EXPECT_NEAR(predictiveness_u_std(pop.truth).value, 0.0, 1e-14);
}

TEST(Population, NonHweFrequencies) {
  Snp s{0.3, InheritanceMode::Additive, 1.0, std::array<double, 3>{0.5, 0.3, 0.2}};
  const auto p = genotype_probabilities(std::vector<Snp>{s}, false);
  EXPECT_NEAR(p[1], 0.3, 1e-15);
  EXPECT_THROW(genotype_probabilities(std::vector<Snp>{Snp{0.3, {}, 1.0, {}}}, false),
               InputError);
}

TEST(Population, MultinomialRealizationIsSeeded) {
  PopulationSpec spec;
  spec.model = one_snp();
  spec.size = 10000;
  spec.realization = Realization::Multinomial;
  spec.seed = 4;
  const Population a = build_population(spec);
  EXPECT_EQ(a.counts, build_population(spec).counts);
  EXPECT_EQ(a.counts[0] + a.counts[1] + a.counts[2], 10000);
}

TEST(Heritability, OneSnpScaledToFivePercent) {
  const DiseaseModel m = calibrate_heritability(one_snp(), 0.05);
  EXPECT_NEAR(direct_variance(m) / 0.16, 0.05, 1e-4);
  EXPECT_NEAR(heritability(m), direct_variance(m) / (0.2 * 0.8), 1e-15);
  EXPECT_NEAR(implied_prevalence(m), 0.2, 1e-9);
}

TEST(Heritability, ScaleZeroAndIdentity) {
  const DiseaseModel flat = scale_penetrance(one_snp(), 0.0);
  EXPECT_NEAR(heritability(flat), 0.0, 1e-15);
  const DiseaseModel base = one_snp();
  const DiseaseModel same = calibrate_heritability(base, heritability(base));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(same.penetrance[i], base.penetrance[i], 1e-12);
  EXPECT_THROW(calibrate_heritability(base, 0.0), InputError);
  EXPECT_THROW(calibrate_heritability(flat, 0.1), NumericError);
}

TEST(Heritability, PrevalencePreservedAfterCalibration) {
  std::vector<Snp> snps = {{0.3, InheritanceMode::Additive, 1.4, {}},
                           {0.2, InheritanceMode::Dominant, 1.3, {}},
                           {0.4, InheritanceMode::Recessive, 1.6, {}}};
  for (double h2 : {0.01, 0.05, 0.1}) {
    const DiseaseModel m = make_disease_model("m", snps, {{0, 1, 1.3}}, 0.05, h2);
    EXPECT_NEAR(implied_prevalence(m), 0.05, 1e-6);
    EXPECT_NEAR(heritability(m), h2, 1e-4);
    for (double r : m.penetrance) {
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0);
    }
  }
}

TEST(SampleCaseControl, ValidatesAndIsSeeded) {
  PopulationSpec spec;
  spec.model = one_snp();
  spec.size = 1000;
  const Population pop = build_population(spec);
  EXPECT_THROW(sample_case_control(pop, 0, 10, 1), InputError);
  const auto a = sample_case_control(pop, 50, 60, 3);
  const auto b = sample_case_control(pop, 50, 60, 3);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].n_case, b.rows[i].n_case);
  EXPECT_EQ(a.n_case, 50);
  EXPECT_EQ(a.n_control, 60);
  EXPECT_NEAR(a.rho, 0.2, 1e-15);
}

TEST(SampleCaseControl, LawOfLargeNumbers) {
  PopulationSpec spec;
  spec.model = one_snp();
  spec.size = 1000;
  const Population pop = build_population(spec);
  const auto c = sample_case_control(pop, 100000, 100000, 8);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LT(std::abs(static_cast<double>(c.rows[i].n_case) / 1e5 - pop.case_distribution[i]),
              0.02);
    EXPECT_LT(std::abs(static_cast<double>(c.rows[i].n_control) / 1e5 -
                       pop.control_distribution[i]),
              0.02);
  }
}

TEST(Presets, ParseAndHitTargets) {
  const auto all = simulation_presets();
  ASSERT_GE(all.size(), 8u);
  std::size_t sim1 = 0;
  for (const auto& p : all) {
    EXPECT_FALSE(p.name.empty());
    EXPECT_GE(p.version, 1);
    if (p.group == "sim1" || p.group == "sim2") {
      EXPECT_DOUBLE_EQ(p.model.target_rho, 0.016);
      EXPECT_NEAR(implied_prevalence(p.model), 0.016, 1e-6);
    }
    if (p.model.target_heritability) {
      EXPECT_NEAR(heritability(p.model), *p.model.target_heritability, 1e-4) << p.name;
    }
    sim1 += p.group == "sim1";
  }
  EXPECT_EQ(sim1, 4u);
  EXPECT_EQ(find_presets("sim2").size(), 3u);
  EXPECT_EQ(find_presets("smoke").size(), 1u);
  EXPECT_THROW(find_presets("no_such_preset"), InputError);
}

TEST(Presets, RejectBadYaml) {
  EXPECT_THROW(parse_population_spec("name: x\nmodel: {target_rho: 0.1}\n"), InputError);
  EXPECT_THROW(parse_population_spec("[1, 2"), InputError);
}

TEST(BiasCoverage, PopulationSamplingHasZeroBias) {
  const auto smoke = find_presets("smoke").front();
  EvalOptions o = smoke.design;
  o.sampling = SamplingMode::Population;
  o.n_replicates = 3;
  o.population_size = smoke.size;
  const auto reports = run_bias_coverage(std::vector<DiseaseModel>{smoke.model}, o);
  ASSERT_EQ(reports.size(), 5u);
  for (const auto& r : reports) {
    EXPECT_EQ(r.pct_bias, 0.0) << index_name(r.index);
    EXPECT_EQ(r.pct_coverage, 100.0);
  }
}

TEST(BiasCoverage, DeterministicAcrossWorkerCounts) {
  const auto smoke = find_presets("smoke").front();
  EvalOptions o = smoke.design;
  o.n_replicates = 6;
  o.n_bootstrap = 20;
  o.population_size = smoke.size;
  o.workers = 1;
  const auto a = run_bias_coverage(std::vector<DiseaseModel>{smoke.model}, o);
  o.workers = 3;
  const auto b = run_bias_coverage(std::vector<DiseaseModel>{smoke.model}, o);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].estimates, b[i].estimates);
    EXPECT_EQ(a[i].pct_coverage, b[i].pct_coverage);
  }
}

TEST(BiasCoverage, NoBootstrapLeavesCoverageUndefined) {
  const auto smoke = find_presets("smoke").front();
  EvalOptions o = smoke.design;
  o.n_replicates = 4;
  o.n_bootstrap = 0;
  o.population_size = smoke.size;
  const auto r = run_bias_coverage(std::vector<DiseaseModel>{smoke.model}, o);
  EXPECT_TRUE(std::isnan(r.front().pct_coverage));
  EXPECT_EQ(r.front().estimates.size(), 4u);
}

TEST(BiasCoverage, BandIndexNeedsBand) {
  const auto smoke = find_presets("smoke").front();
  EvalOptions o;
  o.indices = {IndexKind::UPartial};
  o.n_replicates = 1;
  EXPECT_THROW(run_bias_coverage(std::vector<DiseaseModel>{smoke.model}, o), InputError);
}

TEST(BiasCoverage, BiasShrinksWithSampleSize) {
  std::vector<Snp> snps = {{0.3, InheritanceMode::Additive, 1.5, {}},
                           {0.2, InheritanceMode::Dominant, 1.3, {}},
                           {0.1, InheritanceMode::Additive, 1.2, {}}};
  const DiseaseModel m = make_disease_model("m", snps, {}, 0.1, 0.05);
  EvalOptions o;
  o.indices = {IndexKind::U};
  o.n_replicates = 200;
  o.n_bootstrap = 0;
  o.order_source = OrderSource::TrainingSample;
  o.seed = 21;
  double prev = INFINITY;
  for (std::int64_t n : {500, 2000, 8000}) {
    o.n_case = n;
    o.n_control = n;
    const auto r = run_bias_coverage(std::vector<DiseaseModel>{m}, o);
    const double bias = std::abs(r.front().mean - r.front().true_value);
    EXPECT_LT(bias, prev) << "n = " << n;
    prev = bias;
  }
}

}  // namespace
}  // namespace predictu
