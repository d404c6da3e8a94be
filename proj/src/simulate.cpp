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

#include "predictu/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "predictu/error.hpp"
#include "predictu/inference.hpp"
#include "predictu/isotonic.hpp"
#include "predictu/parallel.hpp"

namespace predictu {
namespace {

constexpr std::uint64_t kTrainingStream = 0x7A1;
constexpr std::uint64_t kBootstrapSeedStream = 0xB5;

int coded(int minor_alleles, InheritanceMode mode) {
  switch (mode) {
    case InheritanceMode::Additive: return minor_alleles;
    case InheritanceMode::Dominant: return minor_alleles >= 1 ? 1 : 0;
    case InheritanceMode::Recessive: return minor_alleles == 2 ? 1 : 0;
  }
  return 0;
}

double weighted_prevalence(std::span<const double> prob, std::span<const double> pen) {
  double s = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) s += prob[i] * pen[i];
  return s;
}

// Smallest c in [lo, hi] with f(c) >= target for nondecreasing f.
template <typename F>
double bisect_increasing(F&& f, double target, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Scales `multipliers` by a baseline b so that sum P(g) min(1, b m_g) = rho.
std::vector<double> calibrate_baseline(std::span<const double> prob,
                                       std::span<const double> multipliers,
                                       double rho) {
  double max_m = 0.0;
  for (double m : multipliers) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw InputError("penetrance multipliers must be finite and nonnegative");
    }
    max_m = std::max(max_m, m);
  }
  if (!(max_m > 0.0)) throw NumericError("all penetrance multipliers are zero");
  auto prevalence = [&](double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
      s += prob[i] * std::min(1.0, b * multipliers[i]);
    }
    return s;
  };
  double hi = 1.0 / max_m;
  while (prevalence(hi) < rho) {
    hi *= 2.0;
    if (hi > 1e300) {
      throw NumericError("cannot reach the target prevalence under clipping");
    }
  }
  const double b = bisect_increasing(prevalence, rho, 0.0, hi);
  std::vector<double> pen(multipliers.size());
  for (std::size_t i = 0; i < pen.size(); ++i) {
    pen[i] = std::min(1.0, b * multipliers[i]);
  }
  if (std::abs(weighted_prevalence(prob, pen) - rho) > 1e-9) {
    throw NumericError("prevalence calibration did not converge");
  }
  return pen;
}

void check_snps(std::span<const Snp> snps, bool hwe) {
  if (snps.empty()) throw InputError("disease model needs at least one SNP");
  if (snps.size() > 12) throw InputError("at most 12 SNPs are supported");
  for (const Snp& s : snps) {
    if (hwe) {
      if (!(s.maf > 0.0 && s.maf <= 0.5)) {
        throw InputError("minor allele frequency must lie in (0, 0.5]");
      }
    } else {
      if (!s.genotype_frequencies) {
        throw InputError("non-HWE populations need genotype_frequencies per SNP");
      }
      const auto& f = *s.genotype_frequencies;
      if (f[0] < 0 || f[1] < 0 || f[2] < 0 ||
          std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
        throw InputError("genotype frequencies must be nonnegative and sum to 1");
      }
    }
  }
}

void check_rho_target(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("target_rho must lie in (0, 1)");
}

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::size_t genotype_count(std::size_t n_snps) {
  std::size_t g = 1;
  for (std::size_t i = 0; i < n_snps; ++i) g *= 3;
  return g;
}

std::vector<int> genotype_digits(std::size_t index, std::size_t n_snps) {
  std::vector<int> d(n_snps);
  for (std::size_t j = 0; j < n_snps; ++j) {
    d[j] = static_cast<int>(index % 3);
    index /= 3;
  }
  return d;
}

std::string genotype_label(std::size_t index, std::size_t n_snps) {
  std::string out;
  for (int d : genotype_digits(index, n_snps)) {
    if (!out.empty()) out += '/';
    out += static_cast<char>('0' + d);
  }
  return out;
}

std::vector<double> genotype_probabilities(std::span<const Snp> snps, bool hwe) {
  check_snps(snps, hwe);
  std::vector<std::array<double, 3>> locus(snps.size());
  for (std::size_t j = 0; j < snps.size(); ++j) {
    if (hwe) {
      const double f = snps[j].maf;
      locus[j] = {(1.0 - f) * (1.0 - f), 2.0 * f * (1.0 - f), f * f};
    } else {
      locus[j] = *snps[j].genotype_frequencies;
    }
  }
  const std::size_t g = genotype_count(snps.size());
  std::vector<double> prob(g, 1.0);
  for (std::size_t k = 0; k < g; ++k) {
    std::size_t idx = k;
    for (std::size_t j = 0; j < snps.size(); ++j) {
      prob[k] *= locus[j][idx % 3];
      idx /= 3;
    }
  }
  return prob;
}

DiseaseModel make_disease_model(std::string name, std::vector<Snp> snps,
                                std::vector<Interaction> interactions,
                                double target_rho, std::optional<double> target_h2,
                                bool hwe) {
  check_rho_target(target_rho);
  const std::vector<double> prob = genotype_probabilities(snps, hwe);
  for (const auto& it : interactions) {
    if (it.first >= snps.size() || it.second >= snps.size() || it.first == it.second) {
      throw InputError("interaction refers to an unknown SNP pair");
    }
    if (!(it.factor > 0.0)) throw InputError("interaction factor must be positive");
  }
  const std::size_t g = prob.size();
  std::vector<double> mult(g, 1.0);
  for (std::size_t k = 0; k < g; ++k) {
    const std::vector<int> d = genotype_digits(k, snps.size());
    double log_m = 0.0;
    for (std::size_t j = 0; j < snps.size(); ++j) {
      if (!(snps[j].relative_risk > 0.0)) {
        throw InputError("relative risk must be positive");
      }
      log_m += coded(d[j], snps[j].mode) * std::log(snps[j].relative_risk);
    }
    for (const auto& it : interactions) {
      log_m += coded(d[it.first], snps[it.first].mode) *
               coded(d[it.second], snps[it.second].mode) * std::log(it.factor);
    }
    mult[k] = std::exp(log_m);
  }

  DiseaseModel model;
  model.name = std::move(name);
  model.snps = std::move(snps);
  model.interactions = std::move(interactions);
  model.target_rho = target_rho;
  model.hwe = hwe;
  model.penetrance = calibrate_baseline(prob, mult, target_rho);
  if (target_h2) model = calibrate_heritability(model, *target_h2);
  return model;
}

DiseaseModel model_from_penetrance(std::string name, std::vector<Snp> snps,
                                   std::vector<double> penetrance,
                                   double target_rho, bool hwe) {
  const std::vector<double> prob = genotype_probabilities(snps, hwe);
  if (penetrance.size() != prob.size()) {
    std::ostringstream msg;
    msg << "penetrance table needs " << prob.size() << " entries, got "
        << penetrance.size();
    throw InputError(msg.str());
  }
  for (double r : penetrance) {
    if (!(r >= 0.0 && r <= 1.0)) throw InputError("penetrance must lie in [0, 1]");
  }
  DiseaseModel model;
  model.name = std::move(name);
  model.snps = std::move(snps);
  model.hwe = hwe;
  if (target_rho > 0.0) {
    check_rho_target(target_rho);
    model.penetrance = calibrate_baseline(prob, penetrance, target_rho);
    model.target_rho = target_rho;
  } else {
    model.penetrance = std::move(penetrance);
    model.target_rho = weighted_prevalence(prob, model.penetrance);
  }
  return model;
}

double implied_prevalence(const DiseaseModel& model) {
  return weighted_prevalence(genotype_probabilities(model.snps, model.hwe),
                             model.penetrance);
}

double heritability(const DiseaseModel& model) {
  const std::vector<double> prob = genotype_probabilities(model.snps, model.hwe);
  const double rho = weighted_prevalence(prob, model.penetrance);
  if (!(rho > 0.0 && rho < 1.0)) throw NumericError("prevalence is 0 or 1");
  double v = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double d = model.penetrance[i] - rho;
    v += prob[i] * d * d;
  }
  return v / (rho * (1.0 - rho));
}

DiseaseModel scale_penetrance(const DiseaseModel& model, double factor) {
  if (!(factor >= 0.0)) throw InputError("scale factor must be nonnegative");
  const std::vector<double> prob = genotype_probabilities(model.snps, model.hwe);
  const double rho = weighted_prevalence(prob, model.penetrance);
  std::vector<double> dev(prob.size());
  double min_d = 0.0;
  double max_d = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    dev[i] = factor * (model.penetrance[i] - rho);
    min_d = std::min(min_d, dev[i]);
    max_d = std::max(max_d, dev[i]);
  }
  auto shifted = [&](double c) {
    double s = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
      s += prob[i] * std::clamp(c + dev[i], 0.0, 1.0);
    }
    return s;
  };
  const double c = bisect_increasing(shifted, rho, -max_d, 1.0 - min_d);
  DiseaseModel out = model;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    out.penetrance[i] = std::clamp(c + dev[i], 0.0, 1.0);
  }
  return out;
}

DiseaseModel calibrate_heritability(const DiseaseModel& model, double target_h2) {
  if (!(target_h2 > 0.0 && target_h2 < 1.0)) {
    throw InputError("target heritability must lie in (0, 1)");
  }
  constexpr double kTolerance = 1e-4;
  const double current = heritability(model);
  if (std::abs(current - target_h2) <= kTolerance * 1e-6) {
    DiseaseModel out = model;
    out.target_heritability = target_h2;
    return out;
  }
  if (!(current > 0.0)) {
    throw NumericError("cannot stretch a constant penetrance to reach heritability");
  }
  auto h2_at = [&](double s) { return heritability(scale_penetrance(model, s)); };
  double hi = 1.0;
  while (h2_at(hi) < target_h2) {
    hi *= 2.0;
    if (hi > 1e6) {
      std::ostringstream msg;
      msg << "heritability " << target_h2 << " unreachable under clipping for model "
          << model.name;
      throw NumericError(msg.str());
    }
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h2_at(mid) < target_h2) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  DiseaseModel out = scale_penetrance(model, 0.5 * (lo + hi));
  if (std::abs(heritability(out) - target_h2) > kTolerance) {
    throw NumericError("heritability calibration did not converge");
  }
  out.target_heritability = target_h2;
  return out;
}

Population build_population(const PopulationSpec& spec) {
  if (spec.size < 1) throw InputError("population size must be at least 1");
  const DiseaseModel& model = spec.model;
  const bool hwe = spec.hwe && model.hwe;
  const std::vector<double> exact = genotype_probabilities(model.snps, hwe);
  if (model.penetrance.size() != exact.size()) {
    throw InputError("penetrance table does not match the SNP count");
  }

  Population pop;
  pop.name = spec.name.empty() ? model.name : spec.name;
  pop.size = spec.size;
  pop.penetrance = model.penetrance;
  if (spec.realization == Realization::ExpectedCounts) {
    pop.probability = exact;
    pop.counts = largest_remainder_counts(exact, spec.size);
  } else {
    Rng rng = make_rng(spec.seed, 0x909, 0);
    pop.counts.resize(exact.size());
    sample_multinomial(rng, spec.size, exact, pop.counts);
    pop.probability.resize(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
      pop.probability[i] =
          static_cast<double>(pop.counts[i]) / static_cast<double>(spec.size);
    }
  }
  pop.rho = weighted_prevalence(pop.probability, pop.penetrance);
  if (!(pop.rho > 0.0 && pop.rho < 1.0)) {
    throw NumericError("population prevalence is 0 or 1");
  }

  const std::size_t g = exact.size();
  pop.genotypes.resize(g);
  pop.case_distribution.resize(g);
  pop.control_distribution.resize(g);
  for (std::size_t i = 0; i < g; ++i) {
    pop.genotypes[i] = {i, genotype_label(i, model.snps.size())};
    pop.case_distribution[i] = pop.probability[i] * pop.penetrance[i] / pop.rho;
    pop.control_distribution[i] =
        pop.probability[i] * (1.0 - pop.penetrance[i]) / (1.0 - pop.rho);
  }

  // The true table pairs genotype frequencies with penetrances directly.
  RiskTable& t = pop.truth;
  t.rho = pop.rho;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < g; ++i) {
    if (pop.probability[i] > 0.0) {
      idx.push_back(i);
    } else {
      t.diagnostics.dropped.push_back(pop.genotypes[i]);
    }
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pop.penetrance[a] < pop.penetrance[b];
  });
  for (std::size_t i : idx) {
    t.entries.push_back({pop.genotypes[i], pop.probability[i], pop.penetrance[i]});
    t.ordering.push_back(i);
  }
  return pop;
}

CaseControlCounts sample_case_control(const Population& population,
                                      std::int64_t n_case, std::int64_t n_control,
                                      Rng& rng) {
  if (n_case < 1 || n_control < 1) {
    throw InputError("case-control sample needs n_case >= 1 and n_control >= 1");
  }
  const std::size_t g = population.genotypes.size();
  std::vector<std::int64_t> cases(g);
  std::vector<std::int64_t> controls(g);
  sample_multinomial(rng, n_case, population.case_distribution, cases);
  sample_multinomial(rng, n_control, population.control_distribution, controls);
  std::vector<CountRow> rows;
  for (std::size_t i = 0; i < g; ++i) {
    if (cases[i] == 0 && controls[i] == 0) continue;
    rows.push_back({population.genotypes[i], cases[i], controls[i]});
  }
  return CaseControlCounts::from_rows(std::move(rows), population.rho);
}

CaseControlCounts sample_case_control(const Population& population,
                                      std::int64_t n_case, std::int64_t n_control,
                                      std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x5A, 0);
  return sample_case_control(population, n_case, n_control, rng);
}

std::vector<EvalReport> run_bias_coverage(std::span<const DiseaseModel> models,
                                          const EvalOptions& options) {
  if (options.indices.empty()) throw InputError("no indices requested");
  if (options.n_replicates < 1) throw InputError("need at least one replicate");
  IndexOptions index_options;
  index_options.band = options.band;
  index_options.partial_scale = options.partial_scale;
  for (IndexKind k : options.indices) {
    if (needs_band(k) && !options.band) {
      throw InputError(std::string(index_name(k)) + " requires a band");
    }
  }
  const std::size_t n_idx = options.indices.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto evaluate = [&](const StepCurve& raw) {
    const StepCurve curve = options.isotonic ? isotonic_refit(raw) : raw;
    std::vector<double> v(n_idx);
    for (std::size_t k = 0; k < n_idx; ++k) {
      try {
        v[k] = index_value(options.indices[k], curve, index_options);
      } catch (const NumericError&) {
        v[k] = nan;
      }
    }
    return v;
  };

  std::vector<EvalReport> reports;
  for (std::size_t m = 0; m < models.size(); ++m) {
    PopulationSpec spec;
    spec.name = models[m].name;
    spec.model = models[m];
    spec.size = options.population_size;
    const Population pop = build_population(spec);
    const std::vector<double> truth = evaluate(StepCurve(pop.truth));
    const std::vector<GenotypeId> true_order = pop.truth.genotype_order();

    struct Replicate {
      std::vector<double> estimate;
      std::vector<char> covered;
    };
    const auto reps = run_replicates<Replicate>(
        options.n_replicates, options.workers, [&](std::size_t r) {
          Replicate out;
          if (options.sampling == SamplingMode::Population) {
            out.estimate = truth;
            out.covered.assign(n_idx, 1);
            return out;
          }
          Rng rng = make_rng(options.seed, m, r);
          std::vector<GenotypeId> order = true_order;
          if (options.order_source == OrderSource::TrainingSample) {
            Rng train_rng = make_rng(options.seed ^ kTrainingStream, m, r);
            const CaseControlCounts train =
                sample_case_control(pop, options.n_case, options.n_control, train_rng);
            order = estimate_risk_table(train).genotype_order();
          }
          const CaseControlCounts test =
              sample_case_control(pop, options.n_case, options.n_control, rng);
          const ValidationCurve vc = apply_model_to_test(order, test);
          const OrderedCounts oc = align_counts(test, vc.table.genotype_order());

          out.estimate = evaluate(plugin_curve(oc));
          out.covered.assign(n_idx, 0);
          if (options.n_bootstrap == 0) return out;
          ResamplePlan plan;
          plan.n_replicates = options.n_bootstrap;
          plan.seed = derive_seed(options.seed, kBootstrapSeedStream + m, r);
          plan.workers = 1;
          const auto reps = bootstrap_replicates(
              oc, plan, [&](const OrderedCounts& c) { return evaluate(plugin_curve(c)); });
          std::vector<double> column;
          column.reserve(reps.size());
          for (std::size_t k = 0; k < n_idx; ++k) {
            column.clear();
            for (const auto& rep : reps) {
              if (!std::isnan(rep[k])) column.push_back(rep[k]);
            }
            if (column.empty() || std::isnan(out.estimate[k])) continue;
            const ConfidenceInterval ci = percentile_interval(column, options.level);
            out.covered[k] = ci.lower <= truth[k] && truth[k] <= ci.upper;
          }
          return out;
        });

    for (std::size_t k = 0; k < n_idx; ++k) {
      EvalReport rep;
      rep.model = pop.name;
      rep.index = options.indices[k];
      rep.isotonic = options.isotonic;
      rep.true_value = truth[k];
      rep.n_replicates = options.n_replicates;
      std::size_t covered = 0;
      for (const auto& r : reps) {
        if (std::isnan(r.estimate[k])) {
          ++rep.n_failed;
          continue;
        }
        rep.estimates.push_back(r.estimate[k]);
        covered += r.covered[k] ? 1 : 0;
      }
      rep.mean = mean(rep.estimates);
      rep.sd = std::sqrt(sample_variance(rep.estimates));
      rep.pct_bias = truth[k] != 0.0
                         ? 100.0 * std::abs(rep.mean - truth[k]) / std::abs(truth[k])
                         : (rep.mean == 0.0 ? 0.0 : nan);
      const std::size_t valid = rep.estimates.size();
      const bool has_ci =
          options.n_bootstrap > 0 || options.sampling == SamplingMode::Population;
      rep.pct_coverage = valid > 0 && has_ci
                             ? 100.0 * static_cast<double>(covered) / static_cast<double>(valid)
                             : nan;
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

}  // namespace predictu
