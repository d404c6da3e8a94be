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

#include "predictu/curve_links.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "predictu/error.hpp"
#include "predictu/summary_indices.hpp"

namespace predictu {
namespace {

std::vector<RiskEntry> sorted_entries(const RiskTable& table) {
  if (table.empty()) throw InputError("empty risk table");
  std::vector<RiskEntry> e = table.entries;
  std::stable_sort(e.begin(), e.end(),
                   [](const RiskEntry& a, const RiskEntry& b) { return a.r < b.r; });
  return e;
}

double prevalence_of(const std::vector<RiskEntry>& e) {
  double s = 0.0;
  for (const auto& x : e) s += x.p * x.r;
  return s;
}

}  // namespace

RocCurve roc_from_table(const RiskTable& table) {
  const std::vector<RiskEntry> e = sorted_entries(table);
  const double rho = prevalence_of(e);
  if (!(rho > 0.0 && rho < 1.0)) {
    throw NumericError("ROC undefined for prevalence 0 or 1");
  }
  RocCurve roc;
  roc.points.reserve(e.size() + 1);
  roc.points.push_back({0.0, 0.0});
  double t = 0.0;
  double f = 0.0;
  for (std::size_t k = e.size(); k-- > 0;) {
    t += e[k].p * (1.0 - e[k].r) / (1.0 - rho);
    f += e[k].p * e[k].r / rho;
    roc.points.push_back({t, f});
  }
  // Pin the far endpoint; accumulated rounding leaves it within ~1e-16.
  roc.points.back() = {1.0, 1.0};
  for (std::size_t k = 1; k < roc.points.size(); ++k) {
    const auto& a = roc.points[k - 1];
    const auto& b = roc.points[k];
    roc.auc += 0.5 * (b.t - a.t) * (a.f + b.f);
  }
  return roc;
}

LorenzCurve lorenz_from_table(const RiskTable& table) {
  const std::vector<RiskEntry> e = sorted_entries(table);
  const double rho = prevalence_of(e);
  if (!(rho > 0.0)) throw NumericError("Lorenz curve undefined for zero risk");
  LorenzCurve lc;
  lc.points.reserve(e.size() + 1);
  lc.points.push_back({0.0, 0.0});
  double q = 0.0;
  double h = 0.0;
  for (const auto& x : e) {
    q += x.p;
    h += x.p * x.r / rho;
    lc.points.push_back({q, h});
  }
  lc.points.back() = {1.0, 1.0};
  for (std::size_t k = 1; k < lc.points.size(); ++k) {
    const auto& a = lc.points[k - 1];
    const auto& b = lc.points[k];
    lc.auc += 0.5 * (b.q - a.q) * (a.h + b.h);
  }
  return lc;
}

IdentityCheck check_roc_identity(const RiskTable& table) {
  IdentityCheck c;
  c.u = predictiveness_u(table).value;
  c.monotone = table.is_monotone();
  const double rho = table.implied_prevalence();
  c.predicted = 2.0 * rho * (1.0 - rho) * (2.0 * roc_from_table(table).auc - 1.0);
  c.residual = std::abs(c.u - c.predicted);
  return c;
}

IdentityCheck check_lorenz_identity(const RiskTable& table) {
  IdentityCheck c;
  c.u = predictiveness_u(table).value;
  c.monotone = table.is_monotone();
  const double rho = table.implied_prevalence();
  c.predicted = 4.0 * rho * (0.5 - lorenz_from_table(table).auc);
  c.residual = std::abs(c.u - c.predicted);
  return c;
}

double lorenz_roc_residual(const RiskTable& table) {
  const double rho = table.implied_prevalence();
  const double auc_r = roc_from_table(table).auc;
  const double auc_l = lorenz_from_table(table).auc;
  return std::abs(auc_l - ((1.0 - rho) * (1.0 - auc_r) + 0.5 * rho));
}

}  // namespace predictu
