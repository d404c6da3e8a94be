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

#ifndef PREDICTU_RISK_MODEL_HPP_
#define PREDICTU_RISK_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace predictu {

// One multi-locus genotype. When both sides carry a label, genotypes are
// matched across datasets by label; otherwise by index.
struct GenotypeId {
  std::size_t index = 0;
  std::string label;

  std::string key() const;
  friend bool operator==(const GenotypeId&, const GenotypeId&) = default;
};

struct RiskEntry {
  GenotypeId genotype;
  double p = 0.0;  // population proportion
  double r = 0.0;  // predicted risk P(D | g)
};

struct TableDiagnostics {
  std::vector<GenotypeId> dropped;   // zero-mass genotypes removed from the table
  std::vector<GenotypeId> boundary;  // estimated risk exactly 0 or 1
  std::vector<GenotypeId> unseen;    // test genotypes absent from a training order
  std::vector<std::string> warnings;
};

// The discrete predictiveness curve. `entries` are in stored (curve) order:
// ascending risk for tables built from conditionals, training order for
// tables evaluated on an independent test set.
struct RiskTable {
  std::vector<RiskEntry> entries;
  double rho = 0.0;
  // ordering[k] is the input row that ended up at entries[k].
  std::vector<std::size_t> ordering;
  TableDiagnostics diagnostics;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  bool is_monotone() const;
  double total_mass() const;
  // Σ p_i r_i; equals rho for tables built from consistent conditionals.
  double implied_prevalence() const;
  std::vector<GenotypeId> genotype_order() const;
};

struct CurvePoint {
  double q = 0.0;
  double r = 0.0;
};

// Right-continuous step function: risk r_i holds on (q_{i-1}, q_i].
struct CurvePoints {
  std::vector<CurvePoint> points;
  std::vector<GenotypeId> genotypes;  // parallel to points
};

// Mass/risk arrays in stored order; the representation every index is
// computed from.
struct StepCurve {
  std::vector<double> mass;
  std::vector<double> risk;

  StepCurve() = default;
  StepCurve(std::vector<double> mass, std::vector<double> risk);
  StepCurve(const RiskTable& table);    // NOLINT(google-explicit-constructor)
  StepCurve(const CurvePoints& curve);  // NOLINT(google-explicit-constructor)

  std::size_t size() const { return mass.size(); }
  bool empty() const { return mass.empty(); }
};

struct CountRow {
  GenotypeId genotype;
  std::int64_t n_case = 0;
  std::int64_t n_control = 0;
};

struct CaseControlCounts {
  std::vector<CountRow> rows;
  std::int64_t n_case = 0;
  std::int64_t n_control = 0;
  double rho = 0.0;  // external prevalence

  // Totals are summed from the rows.
  static CaseControlCounts from_rows(std::vector<CountRow> rows, double rho);
  // Throws InputError on negative counts, empty arms, inconsistent totals or
  // rho outside (0, 1).
  void validate() const;
};

// Case/control counts laid out by curve position, the form the resampling
// engines work on.
struct OrderedCounts {
  std::vector<GenotypeId> genotypes;
  std::vector<std::int64_t> cases;
  std::vector<std::int64_t> controls;
  std::int64_t n_case = 0;
  std::int64_t n_control = 0;
  double rho = 0.0;

  std::size_t size() const { return cases.size(); }
};

struct EstimateOptions {
  // Add-k smoothing applied to every observed genotype in both arms.
  double pseudocount = 0.0;
};

// Bayes construction of (p_i, r_i) from conditional genotype frequencies,
// sorted by ascending risk (ties keep input order). Genotypes with p_i = 0
// are dropped with a warning. If `genotypes` is empty, ids 0..n-1 are used.
RiskTable build_risk_table(std::span<const double> conditional_case,
                           std::span<const double> conditional_control,
                           double rho,
                           std::span<const GenotypeId> genotypes = {});

// Plug-in estimate from case-control counts.
RiskTable estimate_risk_table(const CaseControlCounts& counts,
                              const EstimateOptions& options = {});

// Cumulative quantiles of the risk-sorted table.
CurvePoints curve_points(const RiskTable& table);

// Cumulative quantiles in the table's stored order (no sorting).
CurvePoints stored_order_points(const RiskTable& table);

struct ValidationCurve {
  RiskTable table;  // stored in training order, unseen genotypes appended
  CurvePoints points;
};

// Re-estimates risks on test counts and lays them out in the training order.
// The result may be non-monotone. Test genotypes missing from the training
// order are appended, sorted by their own estimated risk, and listed in
// diagnostics.unseen.
ValidationCurve apply_model_to_test(std::span<const GenotypeId> train_order,
                                    const CaseControlCounts& test_counts,
                                    const EstimateOptions& options = {});

// Aligns counts to `order`. Every genotype with a nonzero count must appear
// in `order`; genotypes of `order` absent from the counts get zero rows.
OrderedCounts align_counts(const CaseControlCounts& counts,
                           std::span<const GenotypeId> order);

// Plug-in (p̂, r̂) in position order, skipping positions with no subjects.
StepCurve plugin_curve(const OrderedCounts& counts);

}  // namespace predictu

#endif  // PREDICTU_RISK_MODEL_HPP_
