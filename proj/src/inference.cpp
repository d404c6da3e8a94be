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

#include "predictu/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <boost/math/distributions/normal.hpp>

#include "predictu/error.hpp"
#include "predictu/parallel.hpp"
#include "predictu/random.hpp"

namespace predictu {
namespace {

constexpr std::uint64_t kBootstrapStream = 0xB0075;
constexpr std::uint64_t kPermutationStream = 0x9E57;

void check_level(double level) {
  if (!(level >= 0.0 && level < 1.0)) {
    throw InputError("confidence level must lie in [0, 1)");
  }
}

void check_plan(const ResamplePlan& plan, ResampleScheme expected) {
  if (plan.n_replicates < 1) throw InputError("resample plan needs >= 1 replicate");
  if (plan.scheme != expected) {
    throw InputError(expected == ResampleScheme::StratifiedBootstrap
                         ? "bootstrap requires a StratifiedBootstrap plan"
                         : "permutation requires a LabelPermutation plan");
  }
}

double scale_factor(double rho) { return 2.0 * rho * (1.0 - rho); }

}  // namespace

std::string_view method_name(UMethod method) {
  switch (method) {
    case UMethod::PopulationHoeffding: return "PopulationHoeffding";
    case UMethod::TwoSampleAsymptotic: return "TwoSampleAsymptotic";
    case UMethod::Bootstrap: return "Bootstrap";
    case UMethod::Permutation: return "Permutation";
  }
  return "?";
}

PairKernelTable::PairKernelTable(std::span<const std::size_t> positions)
    : n_(positions.size()), phi_(n_ * n_, 0) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      phi_[i * n_ + j] = static_cast<std::int8_t>(
          (positions[i] > positions[j]) - (positions[i] < positions[j]));
    }
  }
}

PairKernelTable pair_kernel_table(const CaseControlCounts& counts,
                                  std::span<const GenotypeId> order) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < order.size(); ++i) position.emplace(order[i].key(), i);
  std::vector<std::size_t> pos;
  pos.reserve(counts.rows.size());
  std::size_t extra = order.size();
  for (const auto& row : counts.rows) {
    auto it = position.find(row.genotype.key());
    if (it != position.end()) {
      pos.push_back(it->second);
    } else if (row.n_case == 0 && row.n_control == 0) {
      pos.push_back(extra++);  // carries no subjects; any position will do
    } else {
      throw InputError("genotype " + row.genotype.key() + " missing from the order");
    }
  }
  return PairKernelTable(pos);
}

std::int64_t contract(const PairKernelTable& phi, const CaseControlCounts& counts) {
  if (phi.size() != counts.rows.size()) {
    throw InputError("kernel table does not match the counts");
  }
  std::int64_t s = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (std::size_t j = 0; j < phi.size(); ++j) {
      s += counts.rows[i].n_case * counts.rows[j].n_control * phi(i, j);
    }
  }
  return s;
}

std::vector<std::int64_t> largest_remainder_counts(std::span<const double> p,
                                                   std::int64_t total) {
  const double mass = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(mass > 0.0)) throw InputError("largest remainder: zero total mass");
  std::vector<std::int64_t> out(p.size());
  std::vector<double> remainder(p.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double exact = p[i] / mass * static_cast<double>(total);
    out[i] = static_cast<std::int64_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < total && k < idx.size(); ++k, ++assigned) {
    ++out[idx[k]];
  }
  return out;
}

double population_variance_u(const RiskTable& table, std::int64_t population_size) {
  if (population_size < 2) throw InputError("population size must be at least 2");
  if (table.empty()) throw InputError("empty risk table");
  const StepCurve curve(table);
  const std::vector<std::int64_t> n =
      largest_remainder_counts(curve.mass, population_size);
  const double N = static_cast<double>(population_size);
  const std::size_t g = curve.size();
  std::vector<double> w(g);
  for (std::size_t i = 0; i < g; ++i) w[i] = static_cast<double>(n[i]) / N;

  // h_i = r_i (W_below - W_above) - (WR_below - WR_above)
  double total_w = 0.0;
  double total_wr = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    total_w += w[i];
    total_wr += w[i] * curve.risk[i];
  }
  std::vector<double> h(g);
  double below_w = 0.0;
  double below_wr = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double above_w = total_w - below_w - w[i];
    const double above_wr = total_wr - below_wr - w[i] * curve.risk[i];
    h[i] = curve.risk[i] * (below_w - above_w) - (below_wr - above_wr);
    below_w += w[i];
    below_wr += w[i] * curve.risk[i];
  }
  double u = 0.0;
  for (std::size_t i = 0; i < g; ++i) u += w[i] * h[i];
  double s = 0.0;
  for (std::size_t i = 0; i < g; ++i) s += w[i] * (h[i] - u) * (h[i] - u);
  return 4.0 / N * s;
}

std::int64_t concordance_sum(const OrderedCounts& counts) {
  // For each case position, controls strictly below minus strictly above.
  std::int64_t below = 0;
  std::int64_t s = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::int64_t above = counts.n_control - below - counts.controls[i];
    s += counts.cases[i] * (below - above);
    below += counts.controls[i];
  }
  return s;
}

double two_sample_u_value(const OrderedCounts& counts) {
  if (counts.n_case < 1 || counts.n_control < 1) {
    throw InputError("two-sample U needs cases and controls");
  }
  return scale_factor(counts.rho) * static_cast<double>(concordance_sum(counts)) /
         (static_cast<double>(counts.n_case) * static_cast<double>(counts.n_control));
}

double asymptotic_variance_u(const OrderedCounts& counts) {
  if (counts.n_case < 2 || counts.n_control < 2) {
    throw InputError("asymptotic variance needs at least two cases and two controls");
  }
  const double nd = static_cast<double>(counts.n_case);
  const double nc = static_cast<double>(counts.n_control);
  const double theta = static_cast<double>(concordance_sum(counts)) / (nd * nc);

  double case_ss = 0.0;
  double control_ss = 0.0;
  std::int64_t controls_below = 0;
  std::int64_t cases_below = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::int64_t controls_above =
        counts.n_control - controls_below - counts.controls[i];
    const std::int64_t cases_above = counts.n_case - cases_below - counts.cases[i];
    if (counts.cases[i] > 0) {
      const double a = static_cast<double>(controls_below - controls_above) / nc;
      case_ss += static_cast<double>(counts.cases[i]) * (a - theta) * (a - theta);
    }
    if (counts.controls[i] > 0) {
      const double b = static_cast<double>(cases_above - cases_below) / nd;
      control_ss += static_cast<double>(counts.controls[i]) * (b - theta) * (b - theta);
    }
    controls_below += counts.controls[i];
    cases_below += counts.cases[i];
  }
  const double k = scale_factor(counts.rho);
  return k * k * (case_ss / (nd * (nd - 1.0)) + control_ss / (nc * (nc - 1.0)));
}

UEstimate two_sample_u(const CaseControlCounts& counts,
                       std::span<const GenotypeId> order) {
  const OrderedCounts oc = align_counts(counts, order);
  UEstimate est;
  est.method = UMethod::TwoSampleAsymptotic;
  est.u_hat = two_sample_u_value(oc);
  if (oc.n_case >= 2 && oc.n_control >= 2) est.variance = asymptotic_variance_u(oc);
  return est;
}

double asymptotic_variance_u(const CaseControlCounts& counts,
                             std::span<const GenotypeId> order) {
  return asymptotic_variance_u(align_counts(counts, order));
}

UEstimate asymptotic_ci(const UEstimate& estimate, double level) {
  check_level(level);
  if (estimate.variance < 0.0) throw NumericError("negative variance");
  double z = 0.0;
  if (level > 0.0) {
    boost::math::normal_distribution<double> normal;
    z = boost::math::quantile(normal, 0.5 * (1.0 + level));
  }
  UEstimate out = estimate;
  const double half = z * std::sqrt(estimate.variance);
  out.ci = ConfidenceInterval{estimate.u_hat - half, estimate.u_hat + half, level};
  return out;
}

ConfidenceInterval percentile_interval(std::vector<double> values, double level) {
  check_level(level);
  if (values.empty()) throw InputError("percentile interval of no values");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double prob) {
    const double h = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {quantile(0.5 * (1.0 - level)), quantile(0.5 * (1.0 + level)), level};
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double s = 0.0;
  for (double v : values) s += (v - mean) * (v - mean);
  return s / static_cast<double>(values.size() - 1);
}

std::vector<std::vector<double>> bootstrap_replicates(const OrderedCounts& data,
                                                      const ResamplePlan& plan,
                                                      const CountStatistic& statistic) {
  check_plan(plan, ResampleScheme::StratifiedBootstrap);
  if (data.n_case < 1 || data.n_control < 1) {
    throw InputError("bootstrap needs cases and controls");
  }
  return run_replicates<std::vector<double>>(
      plan.n_replicates, plan.workers, [&](std::size_t b) {
        Rng rng = make_rng(plan.seed, kBootstrapStream, b);
        OrderedCounts resample;
        resample.cases.resize(data.size());
        resample.controls.resize(data.size());
        resample.n_case = data.n_case;
        resample.n_control = data.n_control;
        resample.rho = data.rho;
        sample_multinomial(rng, data.n_case, data.cases, resample.cases);
        sample_multinomial(rng, data.n_control, data.controls, resample.controls);
        return statistic(resample);
      });
}

std::vector<ResampleSummary> bootstrap_summaries(const OrderedCounts& data,
                                                 const ResamplePlan& plan,
                                                 double level,
                                                 const CountStatistic& statistic) {
  check_level(level);
  const std::vector<double> observed = statistic(data);
  const auto reps = bootstrap_replicates(data, plan, statistic);
  std::vector<ResampleSummary> out(observed.size());
  for (std::size_t k = 0; k < observed.size(); ++k) {
    out[k].estimate = observed[k];
    out[k].replicates.reserve(reps.size());
    for (const auto& r : reps) {
      if (r.size() != observed.size()) {
        throw NumericError("statistic returned a varying number of components");
      }
      out[k].replicates.push_back(r[k]);
    }
    out[k].variance = sample_variance(out[k].replicates);
    out[k].ci = percentile_interval(out[k].replicates, level);
  }
  return out;
}

UEstimate bootstrap_ci(const CaseControlCounts& counts,
                       std::span<const GenotypeId> order,
                       const ResamplePlan& plan, double level) {
  const OrderedCounts oc = align_counts(counts, order);
  const auto summary = bootstrap_summaries(
      oc, plan, level,
      [](const OrderedCounts& c) { return std::vector<double>{two_sample_u_value(c)}; });
  UEstimate est;
  est.method = UMethod::Bootstrap;
  est.u_hat = summary[0].estimate;
  est.variance = summary[0].variance;
  est.ci = summary[0].ci;
  est.n_replicates = plan.n_replicates;
  est.seed = plan.seed;
  return est;
}

double permutation_p_value(const OrderedCounts& data, const ResamplePlan& plan) {
  check_plan(plan, ResampleScheme::LabelPermutation);
  const std::int64_t observed = std::llabs(concordance_sum(data));
  std::vector<std::int64_t> totals(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    totals[i] = data.cases[i] + data.controls[i];
  }
  const auto extreme = run_replicates<int>(
      plan.n_replicates, plan.workers, [&](std::size_t b) {
        Rng rng = make_rng(plan.seed, kPermutationStream, b);
        OrderedCounts perm;
        perm.cases.resize(data.size());
        perm.controls.resize(data.size());
        perm.n_case = data.n_case;
        perm.n_control = data.n_control;
        sample_multivariate_hypergeometric(rng, totals, data.n_case, perm.cases);
        for (std::size_t i = 0; i < totals.size(); ++i) {
          perm.controls[i] = totals[i] - perm.cases[i];
        }
        return std::llabs(concordance_sum(perm)) >= observed ? 1 : 0;
      });
  const auto hits = std::accumulate(extreme.begin(), extreme.end(), std::size_t{0});
  return static_cast<double>(1 + hits) / static_cast<double>(1 + plan.n_replicates);
}

double permutation_test(const CaseControlCounts& counts,
                        std::span<const GenotypeId> order,
                        const ResamplePlan& plan) {
  return permutation_p_value(align_counts(counts, order), plan);
}

UEstimate partial_u_variance(const CaseControlCounts& counts,
                             std::span<const GenotypeId> order, Band band,
                             const ResamplePlan& plan, double level,
                             bool standardized, PartialScale scale) {
  const OrderedCounts oc = align_counts(counts, order);
  IndexOptions opts;
  opts.band = band;
  opts.partial_scale = scale;
  const IndexKind kind = standardized ? IndexKind::UPartialStd : IndexKind::UPartial;
  const auto summary = bootstrap_summaries(
      oc, plan, level, [&](const OrderedCounts& c) {
        return std::vector<double>{index_value(kind, plugin_curve(c), opts)};
      });
  UEstimate est;
  est.method = UMethod::Bootstrap;
  est.u_hat = summary[0].estimate;
  est.variance = summary[0].variance;
  est.ci = summary[0].ci;
  est.n_replicates = plan.n_replicates;
  est.seed = plan.seed;
  return est;
}

}  // namespace predictu
