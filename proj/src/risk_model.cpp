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

#include "predictu/risk_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "predictu/error.hpp"

namespace predictu {
namespace {

constexpr double kNormTolerance = 1e-9;

void check_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    std::ostringstream msg;
    msg << "prevalence rho must lie in (0, 1), got " << rho;
    throw InputError(msg.str());
  }
}

double risk_from(double a, double b, double rho) {
  const double num = a * rho;
  const double den = num + b * (1.0 - rho);
  return num / den;
}

bool is_boundary(double r) { return r == 0.0 || r == 1.0; }

std::vector<GenotypeId> default_ids(std::size_t n) {
  std::vector<GenotypeId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i].index = i;
  return ids;
}

// Stable order of positions by ascending risk.
std::vector<std::size_t> risk_order(const std::vector<RiskEntry>& entries) {
  std::vector<std::size_t> idx(entries.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return entries[a].r < entries[b].r;
  });
  return idx;
}

struct Conditionals {
  std::vector<GenotypeId> ids;
  std::vector<double> cases;
  std::vector<double> controls;
  std::vector<GenotypeId> dropped;
};

// Conditional frequencies from counts, dropping genotypes with no subjects.
Conditionals conditionals_from(const CaseControlCounts& counts,
                               const EstimateOptions& options) {
  counts.validate();
  if (options.pseudocount < 0.0) {
    throw InputError("pseudocount must be nonnegative");
  }
  Conditionals c;
  for (const auto& row : counts.rows) {
    if (row.n_case == 0 && row.n_control == 0) {
      c.dropped.push_back(row.genotype);
      continue;
    }
    c.ids.push_back(row.genotype);
    c.cases.push_back(static_cast<double>(row.n_case) + options.pseudocount);
    c.controls.push_back(static_cast<double>(row.n_control) +
                         options.pseudocount);
  }
  const double k = options.pseudocount * static_cast<double>(c.ids.size());
  const double n_case = static_cast<double>(counts.n_case) + k;
  const double n_control = static_cast<double>(counts.n_control) + k;
  for (auto& v : c.cases) v /= n_case;
  for (auto& v : c.controls) v /= n_control;
  return c;
}

void flag_boundaries(RiskTable& table) {
  for (const auto& e : table.entries) {
    if (is_boundary(e.r)) table.diagnostics.boundary.push_back(e.genotype);
  }
}

}  // namespace

std::string GenotypeId::key() const {
  return label.empty() ? "#" + std::to_string(index) : label;
}

bool RiskTable::is_monotone() const {
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].r < entries[i - 1].r) return false;
  }
  return true;
}

double RiskTable::total_mass() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.p;
  return s;
}

double RiskTable::implied_prevalence() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.p * e.r;
  return s;
}

std::vector<GenotypeId> RiskTable::genotype_order() const {
  std::vector<GenotypeId> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.genotype);
  return out;
}

StepCurve::StepCurve(std::vector<double> m, std::vector<double> r)
    : mass(std::move(m)), risk(std::move(r)) {
  if (mass.size() != risk.size()) {
    throw InputError("step curve mass and risk lengths differ");
  }
}

StepCurve::StepCurve(const RiskTable& table) {
  mass.reserve(table.size());
  risk.reserve(table.size());
  for (const auto& e : table.entries) {
    mass.push_back(e.p);
    risk.push_back(e.r);
  }
}

StepCurve::StepCurve(const CurvePoints& curve) {
  mass.reserve(curve.points.size());
  risk.reserve(curve.points.size());
  double prev = 0.0;
  for (const auto& pt : curve.points) {
    mass.push_back(pt.q - prev);
    risk.push_back(pt.r);
    prev = pt.q;
  }
}

CaseControlCounts CaseControlCounts::from_rows(std::vector<CountRow> rows,
                                               double rho) {
  CaseControlCounts c;
  c.rows = std::move(rows);
  c.rho = rho;
  for (const auto& row : c.rows) {
    c.n_case += row.n_case;
    c.n_control += row.n_control;
  }
  return c;
}

void CaseControlCounts::validate() const {
  check_rho(rho);
  std::int64_t sum_case = 0;
  std::int64_t sum_control = 0;
  for (const auto& row : rows) {
    if (row.n_case < 0 || row.n_control < 0) {
      throw InputError("negative count for genotype " + row.genotype.key());
    }
    sum_case += row.n_case;
    sum_control += row.n_control;
  }
  if (sum_case != n_case || sum_control != n_control) {
    throw InputError("row counts do not add up to the arm totals");
  }
  if (n_case < 1) throw InputError("no cases in case-control data");
  if (n_control < 1) throw InputError("no controls in case-control data");
}

RiskTable build_risk_table(std::span<const double> conditional_case,
                           std::span<const double> conditional_control,
                           double rho, std::span<const GenotypeId> genotypes) {
  const std::size_t n = conditional_case.size();
  if (n == 0) throw InputError("no genotypes given");
  if (conditional_control.size() != n) {
    throw InputError("case and control conditionals differ in length");
  }
  if (!genotypes.empty() && genotypes.size() != n) {
    throw InputError("genotype ids and conditionals differ in length");
  }
  check_rho(rho);
  double sum_case = 0.0;
  double sum_control = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (conditional_case[i] < 0.0 || conditional_control[i] < 0.0) {
      throw InputError("conditional genotype frequencies must be nonnegative");
    }
    sum_case += conditional_case[i];
    sum_control += conditional_control[i];
  }
  if (std::abs(sum_case - 1.0) > kNormTolerance ||
      std::abs(sum_control - 1.0) > kNormTolerance) {
    throw InputError("conditional genotype frequencies must each sum to 1");
  }

  std::vector<GenotypeId> ids = genotypes.empty()
                                    ? default_ids(n)
                                    : std::vector<GenotypeId>(genotypes.begin(),
                                                              genotypes.end());
  RiskTable table;
  table.rho = rho;
  std::vector<RiskEntry> raw;
  std::vector<std::size_t> row_of;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = conditional_case[i];
    const double b = conditional_control[i];
    const double p = a * rho + b * (1.0 - rho);
    if (p == 0.0) {
      table.diagnostics.dropped.push_back(ids[i]);
      continue;
    }
    raw.push_back({ids[i], p, risk_from(a, b, rho)});
    row_of.push_back(i);
  }
  if (!table.diagnostics.dropped.empty()) {
    table.diagnostics.warnings.push_back(
        std::to_string(table.diagnostics.dropped.size()) +
        " genotype(s) with zero mass dropped");
  }
  if (raw.empty()) throw InputError("every genotype has zero mass");

  for (std::size_t k : risk_order(raw)) {
    table.entries.push_back(raw[k]);
    table.ordering.push_back(row_of[k]);
  }
  flag_boundaries(table);
  if (std::abs(table.implied_prevalence() - rho) > kNormTolerance) {
    table.diagnostics.warnings.push_back(
        "sum of p*r deviates from rho by more than 1e-9");
  }
  return table;
}

RiskTable estimate_risk_table(const CaseControlCounts& counts,
                              const EstimateOptions& options) {
  Conditionals c = conditionals_from(counts, options);
  if (c.ids.empty()) throw InputError("no genotype carries any subject");
  RiskTable table = build_risk_table(c.cases, c.controls, counts.rho, c.ids);
  table.diagnostics.dropped.insert(table.diagnostics.dropped.begin(),
                                   c.dropped.begin(), c.dropped.end());
  return table;
}

CurvePoints stored_order_points(const RiskTable& table) {
  CurvePoints out;
  out.points.reserve(table.size());
  double q = 0.0;
  for (const auto& e : table.entries) {
    q += e.p;
    out.points.push_back({q, e.r});
    out.genotypes.push_back(e.genotype);
  }
  return out;
}

CurvePoints curve_points(const RiskTable& table) {
  if (table.empty()) throw InputError("empty risk table");
  RiskTable sorted = table;
  sorted.entries.clear();
  sorted.ordering.clear();
  // Equal risks fall back to genotype index so that the result does not
  // depend on the stored order.
  std::vector<std::size_t> idx(table.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = table.entries[a];
    const auto& eb = table.entries[b];
    if (ea.r != eb.r) return ea.r < eb.r;
    return ea.genotype.index < eb.genotype.index;
  });
  for (std::size_t k : idx) sorted.entries.push_back(table.entries[k]);
  return stored_order_points(sorted);
}

ValidationCurve apply_model_to_test(std::span<const GenotypeId> train_order,
                                    const CaseControlCounts& test_counts,
                                    const EstimateOptions& options) {
  Conditionals c = conditionals_from(test_counts, options);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < train_order.size(); ++i) {
    position.emplace(train_order[i].key(), i);
  }

  const double rho = test_counts.rho;
  std::vector<std::pair<std::size_t, RiskEntry>> trained;
  std::vector<RiskEntry> unseen;
  for (std::size_t i = 0; i < c.ids.size(); ++i) {
    const double a = c.cases[i];
    const double b = c.controls[i];
    RiskEntry e{c.ids[i], a * rho + b * (1.0 - rho), risk_from(a, b, rho)};
    auto it = position.find(c.ids[i].key());
    if (it == position.end()) {
      unseen.push_back(std::move(e));
    } else {
      trained.emplace_back(it->second, std::move(e));
    }
  }
  if (trained.empty()) {
    throw InputError(
        "test data shares no genotype with the training order");
  }
  std::sort(trained.begin(), trained.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::stable_sort(unseen.begin(), unseen.end(),
                   [](const RiskEntry& x, const RiskEntry& y) {
                     if (x.r != y.r) return x.r < y.r;
                     return x.genotype.index < y.genotype.index;
                   });

  ValidationCurve out;
  RiskTable& table = out.table;
  table.rho = rho;
  table.diagnostics.dropped = c.dropped;
  for (auto& [pos, e] : trained) {
    table.ordering.push_back(pos);
    table.entries.push_back(std::move(e));
  }
  for (auto& e : unseen) {
    table.diagnostics.unseen.push_back(e.genotype);
    table.ordering.push_back(train_order.size() + table.diagnostics.unseen.size() - 1);
    table.entries.push_back(std::move(e));
  }
  if (!unseen.empty()) {
    table.diagnostics.warnings.push_back(
        std::to_string(unseen.size()) +
        " test genotype(s) not in the training order were appended");
  }
  flag_boundaries(table);
  out.points = stored_order_points(table);
  return out;
}

OrderedCounts align_counts(const CaseControlCounts& counts,
                           std::span<const GenotypeId> order) {
  counts.validate();
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!position.emplace(order[i].key(), i).second) {
      throw InputError("genotype listed twice in order: " + order[i].key());
    }
  }
  OrderedCounts out;
  out.genotypes.assign(order.begin(), order.end());
  out.cases.assign(order.size(), 0);
  out.controls.assign(order.size(), 0);
  out.n_case = counts.n_case;
  out.n_control = counts.n_control;
  out.rho = counts.rho;
  for (const auto& row : counts.rows) {
    if (row.n_case == 0 && row.n_control == 0) continue;
    auto it = position.find(row.genotype.key());
    if (it == position.end()) {
      throw InputError("genotype " + row.genotype.key() +
                       " has subjects but is missing from the order");
    }
    out.cases[it->second] += row.n_case;
    out.controls[it->second] += row.n_control;
  }
  return out;
}

StepCurve plugin_curve(const OrderedCounts& counts) {
  StepCurve curve;
  curve.mass.reserve(counts.size());
  curve.risk.reserve(counts.size());
  const double rho = counts.rho;
  const double n_case = static_cast<double>(counts.n_case);
  const double n_control = static_cast<double>(counts.n_control);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts.cases[i] == 0 && counts.controls[i] == 0) continue;
    const double a = static_cast<double>(counts.cases[i]) / n_case;
    const double b = static_cast<double>(counts.controls[i]) / n_control;
    curve.mass.push_back(a * rho + b * (1.0 - rho));
    curve.risk.push_back(risk_from(a, b, rho));
  }
  return curve;
}

}  // namespace predictu
