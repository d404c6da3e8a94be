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

#ifndef PREDICTU_INFERENCE_HPP_
#define PREDICTU_INFERENCE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "predictu/risk_model.hpp"
#include "predictu/summary_indices.hpp"

namespace predictu {

enum class UMethod { PopulationHoeffding, TwoSampleAsymptotic, Bootstrap, Permutation };
std::string_view method_name(UMethod method);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
};

struct UEstimate {
  double u_hat = 0.0;
  double variance = 0.0;
  std::optional<ConfidenceInterval> ci;
  UMethod method = UMethod::TwoSampleAsymptotic;
  std::size_t n_replicates = 0;
  std::optional<std::uint64_t> seed;
};

enum class ResampleScheme { StratifiedBootstrap, LabelPermutation };

struct ResamplePlan {
  std::size_t n_replicates = 1000;
  std::uint64_t seed = 0;
  ResampleScheme scheme = ResampleScheme::StratifiedBootstrap;
  unsigned workers = 0;  // 0: default_worker_count()
};

// phi[i][j] = sign(position of row i - position of row j) over the rows of a
// CaseControlCounts, given a genotype order.
class PairKernelTable {
 public:
  explicit PairKernelTable(std::span<const std::size_t> positions);

  std::size_t size() const { return n_; }
  int operator()(std::size_t i, std::size_t j) const { return phi_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<std::int8_t> phi_;
};

PairKernelTable pair_kernel_table(const CaseControlCounts& counts,
                                  std::span<const GenotypeId> order);

// sum_i sum_j n_case_i n_control_j phi[i][j], the O(G^2) contraction.
std::int64_t contract(const PairKernelTable& phi, const CaseControlCounts& counts);

// Rounds p_i N to integers summing to N (largest remainder, ties to the
// lower index).
std::vector<std::int64_t> largest_remainder_counts(std::span<const double> p,
                                                   std::int64_t total);

// Hoeffding-projection variance of U in a finite population of size N:
// (4/N) sum_i w_i (h_i - U)^2 with w_i = N_i / N and
// h_i = sum_j w_j sign(i - j) (r_i - r_j), positions in stored order.
double population_variance_u(const RiskTable& table, std::int64_t population_size);

// Signed concordance sum_{s,t} phi(g_s, g_t) over case/control subject
// pairs, computed from per-position counts in O(G).
std::int64_t concordance_sum(const OrderedCounts& counts);

// 2 rho (1 - rho) concordance_sum / (n_D n_Dbar).
double two_sample_u_value(const OrderedCounts& counts);

// Empirical projection variance of the two-sample estimator. Deviations are
// taken around theta = U / (2 rho (1 - rho)) on the phi scale and the
// 4 rho^2 (1 - rho)^2 factor is applied outside.
double asymptotic_variance_u(const OrderedCounts& counts);

// Two-sample estimate with its asymptotic variance (0 when an arm has fewer
// than two subjects).
UEstimate two_sample_u(const CaseControlCounts& counts,
                       std::span<const GenotypeId> order);
double asymptotic_variance_u(const CaseControlCounts& counts,
                             std::span<const GenotypeId> order);

// Normal interval u_hat +- z sqrt(variance).
UEstimate asymptotic_ci(const UEstimate& estimate, double level);

// Type-7 (linear interpolation) percentile interval.
ConfidenceInterval percentile_interval(std::vector<double> values, double level);

// Values of `statistic` on stratified bootstrap resamples (cases and
// controls resampled separately), indexed [replicate][component].
using CountStatistic = std::function<std::vector<double>(const OrderedCounts&)>;
std::vector<std::vector<double>> bootstrap_replicates(const OrderedCounts& data,
                                                      const ResamplePlan& plan,
                                                      const CountStatistic& statistic);

struct ResampleSummary {
  double estimate = 0.0;
  double variance = 0.0;
  ConfidenceInterval ci;
  std::vector<double> replicates;
};

// Per-component summaries of bootstrap_replicates plus the statistic on the
// observed data.
std::vector<ResampleSummary> bootstrap_summaries(const OrderedCounts& data,
                                                 const ResamplePlan& plan,
                                                 double level,
                                                 const CountStatistic& statistic);

UEstimate bootstrap_ci(const CaseControlCounts& counts,
                       std::span<const GenotypeId> order,
                       const ResamplePlan& plan, double level);

// Two-sided label-permutation p-value (1 + #{|U*| >= |U|}) / (1 + B). Labels
// are permuted at the genotype-count level by multivariate hypergeometric
// redraws.
double permutation_p_value(const OrderedCounts& data, const ResamplePlan& plan);
double permutation_test(const CaseControlCounts& counts,
                        std::span<const GenotypeId> order,
                        const ResamplePlan& plan);

// Bootstrap variance and percentile interval for partial U.
UEstimate partial_u_variance(const CaseControlCounts& counts,
                             std::span<const GenotypeId> order, Band band,
                             const ResamplePlan& plan, double level,
                             bool standardized = false,
                             PartialScale scale = PartialScale::BandMass);

double sample_variance(std::span<const double> values);

}  // namespace predictu

#endif  // PREDICTU_INFERENCE_HPP_
