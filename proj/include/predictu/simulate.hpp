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

#ifndef PREDICTU_SIMULATE_HPP_
#define PREDICTU_SIMULATE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "predictu/random.hpp"
#include "predictu/risk_model.hpp"
#include "predictu/summary_indices.hpp"

namespace predictu {

enum class InheritanceMode { Additive, Dominant, Recessive };

struct Snp {
  double maf = 0.0;  // minor allele frequency in (0, 0.5]
  InheritanceMode mode = InheritanceMode::Additive;
  double relative_risk = 1.0;  // per unit of the mode-coded genotype
  // Genotype frequencies (0, 1, 2 minor alleles) for non-HWE populations.
  std::optional<std::array<double, 3>> genotype_frequencies;
};

// Multiplies risk by factor^(x_first * x_second) on the mode-coded genotypes.
struct Interaction {
  std::size_t first = 0;
  std::size_t second = 0;
  double factor = 1.0;
};

// Penetrance over the 3^m multi-locus genotypes. Genotype index k encodes
// the minor-allele count of SNP j as the j-th base-3 digit of k (SNP 0 is the
// least significant digit).
struct DiseaseModel {
  std::string name;
  std::vector<Snp> snps;
  std::vector<Interaction> interactions;
  std::vector<double> penetrance;  // P(D | g) by genotype index
  double target_rho = 0.0;
  std::optional<double> target_heritability;
  bool hwe = true;
};

std::size_t genotype_count(std::size_t n_snps);
std::vector<int> genotype_digits(std::size_t index, std::size_t n_snps);
std::string genotype_label(std::size_t index, std::size_t n_snps);

// Independent loci; per-locus frequencies from HWE at the MAF, or the given
// genotype_frequencies when `hwe` is false.
std::vector<double> genotype_probabilities(std::span<const Snp> snps, bool hwe = true);

// Builds the multiplicative penetrance from marginal effects and
// interactions, then scales the baseline (clipping at 1) so the implied
// prevalence equals target_rho. If `target_h2` is set, the spread is then
// calibrated with calibrate_heritability.
DiseaseModel make_disease_model(std::string name, std::vector<Snp> snps,
                                std::vector<Interaction> interactions,
                                double target_rho,
                                std::optional<double> target_h2 = std::nullopt,
                                bool hwe = true);

// Uses the given penetrance table directly, rescaled to target_rho when
// that is positive.
DiseaseModel model_from_penetrance(std::string name, std::vector<Snp> snps,
                                   std::vector<double> penetrance,
                                   double target_rho = 0.0, bool hwe = true);

double implied_prevalence(const DiseaseModel& model);
// Var(P(D | G)) / (rho (1 - rho)), binary-scale broad-sense heritability.
double heritability(const DiseaseModel& model);

// r' = clip(c + factor (r - rho), 0, 1) with c re-solved so the prevalence
// stays at rho.
DiseaseModel scale_penetrance(const DiseaseModel& model, double factor);

// Bisection on the scale factor until |h2 - target| <= 1e-4 (run to
// ~1e-10). Throws NumericError when clipping keeps the target out of reach.
DiseaseModel calibrate_heritability(const DiseaseModel& model, double target_h2);

enum class Realization { ExpectedCounts, Multinomial };

enum class OrderSource {
  Population,      // the true risk order of the population
  TrainingSample,  // plug-in order learned on an independent training sample
};

enum class SamplingMode {
  CaseControl,  // replicate estimates from sampled case-control data
  Population,   // evaluate on the population itself (no sampling error)
};

struct EvalOptions {
  std::vector<IndexKind> indices = {IndexKind::U, IndexKind::UStd, IndexKind::R,
                                    IndexKind::TG, IndexKind::AE};
  std::size_t n_replicates = 1000;
  std::int64_t n_case = 1000;
  std::int64_t n_control = 1000;
  bool isotonic = false;
  std::uint64_t seed = 0;
  std::size_t n_bootstrap = 500;  // 0: no intervals, coverage is NaN
  double level = 0.95;
  std::optional<Band> band;
  PartialScale partial_scale = PartialScale::BandMass;
  OrderSource order_source = OrderSource::Population;
  SamplingMode sampling = SamplingMode::CaseControl;
  std::int64_t population_size = 1'000'000;
  unsigned workers = 0;
};

struct PopulationSpec {
  std::string name;
  std::string group;
  int version = 1;
  std::int64_t size = 1'000'000;
  DiseaseModel model;
  bool hwe = true;
  Realization realization = Realization::ExpectedCounts;
  std::uint64_t seed = 0;
  EvalOptions design;  // study settings bundled with the preset
};

struct Population {
  std::string name;
  std::int64_t size = 0;
  std::vector<GenotypeId> genotypes;  // enumeration order
  std::vector<double> probability;    // P(g)
  std::vector<std::int64_t> counts;   // N_g, summing to size
  std::vector<double> penetrance;     // P(D | g)
  std::vector<double> case_distribution;     // P(g | D)
  std::vector<double> control_distribution;  // P(g | not D)
  double rho = 0.0;
  RiskTable truth;  // risk-sorted
};

Population build_population(const PopulationSpec& spec);

// Multinomial case and control draws from P(g|D) and P(g|not D).
CaseControlCounts sample_case_control(const Population& population,
                                      std::int64_t n_case, std::int64_t n_control,
                                      std::uint64_t seed);
CaseControlCounts sample_case_control(const Population& population,
                                      std::int64_t n_case, std::int64_t n_control,
                                      Rng& rng);

struct EvalReport {
  std::string model;
  IndexKind index = IndexKind::U;
  bool isotonic = false;
  double true_value = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double pct_bias = 0.0;      // 100 |mean - true| / |true|
  double pct_coverage = 0.0;  // share of CIs containing the true value
  std::size_t n_replicates = 0;
  std::size_t n_failed = 0;   // replicates where the index was undefined
  std::vector<double> estimates;
};

// Bias and CI coverage of each index over replicate case-control samples.
// Replicate r of model m draws from its own stream (seed, m, r); results do
// not depend on the worker count.
std::vector<EvalReport> run_bias_coverage(std::span<const DiseaseModel> models,
                                          const EvalOptions& options);

// Preset files (*.yaml) shipped with the project.
std::filesystem::path default_preset_dir();
PopulationSpec parse_population_spec(const std::string& yaml_text);
PopulationSpec load_population_spec(const std::filesystem::path& path);
// All presets in `dir`, sorted by name.
std::vector<PopulationSpec> simulation_presets(
    const std::filesystem::path& dir = default_preset_dir());
// Presets whose name or group equals `name`.
std::vector<PopulationSpec> find_presets(const std::string& name,
                                         const std::filesystem::path& dir = default_preset_dir());

}  // namespace predictu

#endif  // PREDICTU_SIMULATE_HPP_
