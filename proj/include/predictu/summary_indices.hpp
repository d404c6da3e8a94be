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

#ifndef PREDICTU_SUMMARY_INDICES_HPP_
#define PREDICTU_SUMMARY_INDICES_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "predictu/risk_model.hpp"

namespace predictu {

enum class IndexKind { U, UStd, UPartial, UPartialStd, R, TG, AE };

// Pairwise kernel psi(r_i, r_j). Only the risk difference is defined.
enum class Kernel { RiskDifference };

// How the standardized partial U is scaled.
//   BandMass: (U_pt / 2) / (rho_pt (1 - rho_pt)), rho_pt = integral of r over
//             the band (a mass, not a mean).
//   MeanRisk: U_pt / (2 w^2 m (1 - m)), w = q1 - q0, m = rho_pt / w; the
//             maximum attainable U_pt for a band of that width and mean risk.
// Both reduce to U_std on the full band (0, 1).
enum class PartialScale { BandMass, MeanRisk };

struct Band {
  double q0 = 0.0;
  double q1 = 1.0;
  friend bool operator==(const Band&, const Band&) = default;
};

struct IndexResult {
  IndexKind name = IndexKind::U;
  double value = 0.0;
  bool standardized = false;
  std::optional<Band> band;
  double rho_used = 0.0;
  std::optional<double> rho_pt;       // band mass of risk
  std::optional<double> rho_pt_mean;  // rho_pt / (q1 - q0)
  std::vector<std::string> notes;
};

struct IndexOptions {
  std::optional<Band> band;  // required for the partial indices
  PartialScale partial_scale = PartialScale::BandMass;
  bool standardize_r = false;
};

std::string_view index_name(IndexKind kind);
// Accepts canonical names ("U_std") and CLI tokens ("ustd", "upt", ...).
std::optional<IndexKind> parse_index_kind(std::string_view token);
bool needs_band(IndexKind kind);

// U = 2 sum_{i>j} p_i p_j psi(r_i, r_j), i > j in stored order. A
// non-monotone curve is a valid input; inversions contribute negatively.
IndexResult predictiveness_u(const StepCurve& curve,
                             Kernel kernel = Kernel::RiskDifference);
// U / (2 rho (1 - rho)) with rho = sum p_i r_i of the curve.
IndexResult predictiveness_u_std(const StepCurve& curve);
// U restricted to the quantile band (q0, q1]. A genotype straddling an edge
// contributes the part of its mass inside the band, at its own risk.
IndexResult partial_u(const StepCurve& curve, Band band, bool standardized,
                      PartialScale scale = PartialScale::BandMass);
// sum p_i (r_i - rho)^2, optionally divided by rho (1 - rho).
IndexResult r_square(const StepCurve& curve, bool standardize = false);
// sum p_i |r_i - rho|
IndexResult total_gain(const StepCurve& curve);
// H(rho) - sum p_i H(r_i), H the binary entropy in nats.
IndexResult average_entropy(const StepCurve& curve);

IndexResult evaluate_index(IndexKind kind, const StepCurve& curve,
                           const IndexOptions& options = {});

// Value-only evaluation for replicate loops; skips result bookkeeping.
double index_value(IndexKind kind, const StepCurve& curve,
                   const IndexOptions& options = {});

// Binary entropy in nats with H(0) = H(1) = 0.
double binary_entropy(double p);

}  // namespace predictu

#endif  // PREDICTU_SUMMARY_INDICES_HPP_
