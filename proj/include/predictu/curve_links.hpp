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

#ifndef PREDICTU_CURVE_LINKS_HPP_
#define PREDICTU_CURVE_LINKS_HPP_

#include <vector>

#include "predictu/risk_model.hpp"

namespace predictu {

struct RocPoint {
  double t = 0.0;  // 1 - specificity
  double f = 0.0;  // sensitivity
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1), t nondecreasing
  double auc = 0.0;
};

struct LorenzPoint {
  double q = 0.0;  // population quantile
  double h = 0.0;  // cumulative share of total risk
};

struct LorenzCurve {
  std::vector<LorenzPoint> points;  // (0,0) ... (1,1)
  double auc = 0.0;
};

// ROC of the risk score: genotypes are swept from highest to lowest risk
// and "positive" means risk above the threshold genotype. The implied
// conditionals are P(g|D) = p r / rho and P(g|not D) = p (1 - r) / (1 - rho)
// with rho = sum p r of the table. AUC by trapezoid, exact for this
// piecewise-linear curve.
RocCurve roc_from_table(const RiskTable& table);

// Lorenz curve of risk over the risk-sorted population.
LorenzCurve lorenz_from_table(const RiskTable& table);

struct IdentityCheck {
  double u = 0.0;         // U of the table in stored order
  double predicted = 0.0; // U implied by the curve area
  double residual = 0.0;  // |u - predicted|
  bool monotone = true;   // identities are exact only for monotone tables
};

// U against 2 rho (1 - rho) (2 AUC_R - 1).
IdentityCheck check_roc_identity(const RiskTable& table);

// U against 4 rho (0.5 - AUC_L). See lorenz_from_table for AUC_L.
IdentityCheck check_lorenz_identity(const RiskTable& table);

// |AUC_L - ((1 - rho)(1 - AUC_R) + rho / 2)|.
double lorenz_roc_residual(const RiskTable& table);

}  // namespace predictu

#endif  // PREDICTU_CURVE_LINKS_HPP_
