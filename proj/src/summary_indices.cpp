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

#include "predictu/summary_indices.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "predictu/error.hpp"

namespace predictu {
namespace {

void require_nonempty(const StepCurve& curve) {
  if (curve.empty()) throw InputError("empty curve");
}

double mean_risk(const StepCurve& curve) {
  double s = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    s += curve.mass[i] * curve.risk[i];
  }
  return s;
}

// 2 sum_{i>j} w_i w_j (r_i - r_j) in one pass over prefix sums.
double pairwise_difference_sum(const std::vector<double>& w,
                               const std::vector<double>& r) {
  double acc = 0.0;
  double cum_w = 0.0;
  double cum_wr = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i] * (r[i] * cum_w - cum_wr);
    cum_w += w[i];
    cum_wr += w[i] * r[i];
  }
  return 2.0 * acc;
}

double bernoulli_variance(double rho, const char* what) {
  const double v = rho * (1.0 - rho);
  if (!(v > 0.0)) {
    std::ostringstream msg;
    msg << what << " undefined: prevalence " << rho << " is 0 or 1";
    throw NumericError(msg.str());
  }
  return v;
}

void check_band(Band band) {
  if (!(band.q0 >= 0.0 && band.q0 < band.q1 && band.q1 <= 1.0)) {
    std::ostringstream msg;
    msg << "band must satisfy 0 <= q0 < q1 <= 1, got (" << band.q0 << ", "
        << band.q1 << ")";
    throw InputError(msg.str());
  }
}

std::vector<double> clip_to_band(const StepCurve& curve, Band band) {
  std::vector<double> m(curve.size(), 0.0);
  double q = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double lo = q;
    const double hi = q + curve.mass[i];
    if (lo >= band.q0 && hi <= band.q1) {
      m[i] = curve.mass[i];
    } else {
      m[i] = std::max(0.0, std::min(hi, band.q1) - std::max(lo, band.q0));
    }
    q = hi;
  }
  return m;
}

struct PartialParts {
  double u = 0.0;
  double rho_pt = 0.0;
  double width = 0.0;
};

PartialParts partial_parts(const StepCurve& curve, Band band) {
  check_band(band);
  require_nonempty(curve);
  std::vector<double> m = (band.q0 <= 0.0 && band.q1 >= 1.0)
                              ? curve.mass
                              : clip_to_band(curve, band);
  PartialParts parts;
  for (std::size_t i = 0; i < m.size(); ++i) {
    parts.rho_pt += m[i] * curve.risk[i];
    parts.width += m[i];
  }
  if (!(parts.width > 0.0)) throw InputError("band carries no genotype mass");
  parts.u = pairwise_difference_sum(m, curve.risk);
  return parts;
}

double standardize_partial(const PartialParts& parts, Band band,
                           PartialScale scale) {
  if (scale == PartialScale::BandMass) {
    return 0.5 * parts.u /
           bernoulli_variance(parts.rho_pt, "standardized partial U");
  }
  const double w = band.q1 - band.q0;
  const double m = parts.rho_pt / w;
  return parts.u / (2.0 * w * w *
                    bernoulli_variance(m, "standardized partial U"));
}

}  // namespace

std::string_view index_name(IndexKind kind) {
  switch (kind) {
    case IndexKind::U: return "U";
    case IndexKind::UStd: return "U_std";
    case IndexKind::UPartial: return "U_partial";
    case IndexKind::UPartialStd: return "U_partial_std";
    case IndexKind::R: return "R";
    case IndexKind::TG: return "TG";
    case IndexKind::AE: return "AE";
  }
  return "?";
}

std::optional<IndexKind> parse_index_kind(std::string_view token) {
  std::string t(token);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "u") return IndexKind::U;
  if (t == "ustd" || t == "u_std") return IndexKind::UStd;
  if (t == "upt" || t == "u_partial") return IndexKind::UPartial;
  if (t == "uptstd" || t == "u_partial_std") return IndexKind::UPartialStd;
  if (t == "r") return IndexKind::R;
  if (t == "tg") return IndexKind::TG;
  if (t == "ae") return IndexKind::AE;
  return std::nullopt;
}

bool needs_band(IndexKind kind) {
  return kind == IndexKind::UPartial || kind == IndexKind::UPartialStd;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log(p) + (1.0 - p) * std::log1p(-p));
}

IndexResult predictiveness_u(const StepCurve& curve, Kernel kernel) {
  require_nonempty(curve);
  IndexResult res;
  res.name = IndexKind::U;
  res.rho_used = mean_risk(curve);
  switch (kernel) {
    case Kernel::RiskDifference:
      res.value = pairwise_difference_sum(curve.mass, curve.risk);
      break;
  }
  return res;
}

IndexResult predictiveness_u_std(const StepCurve& curve) {
  IndexResult res = predictiveness_u(curve);
  res.name = IndexKind::UStd;
  res.standardized = true;
  res.value /= 2.0 * bernoulli_variance(res.rho_used, "standardized U");
  return res;
}

IndexResult partial_u(const StepCurve& curve, Band band, bool standardized,
                      PartialScale scale) {
  const PartialParts parts = partial_parts(curve, band);
  IndexResult res;
  res.name = standardized ? IndexKind::UPartialStd : IndexKind::UPartial;
  res.band = band;
  res.rho_used = mean_risk(curve);
  res.rho_pt = parts.rho_pt;
  res.rho_pt_mean = parts.rho_pt / (band.q1 - band.q0);
  res.value = parts.u;
  if (standardized) {
    res.standardized = true;
    res.value = standardize_partial(parts, band, scale);
    res.notes.push_back(scale == PartialScale::BandMass
                            ? "scaled by rho_pt(1-rho_pt), rho_pt = band risk mass"
                            : "scaled by 2 w^2 m(1-m), m = band mean risk");
  }
  return res;
}

IndexResult r_square(const StepCurve& curve, bool standardize) {
  require_nonempty(curve);
  IndexResult res;
  res.name = IndexKind::R;
  res.rho_used = mean_risk(curve);
  double s = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double d = curve.risk[i] - res.rho_used;
    s += curve.mass[i] * d * d;
  }
  res.value = s;
  if (standardize) {
    res.standardized = true;
    res.value /= bernoulli_variance(res.rho_used, "standardized R");
  }
  return res;
}

IndexResult total_gain(const StepCurve& curve) {
  require_nonempty(curve);
  IndexResult res;
  res.name = IndexKind::TG;
  res.rho_used = mean_risk(curve);
  double s = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    s += curve.mass[i] * std::abs(curve.risk[i] - res.rho_used);
  }
  res.value = s;
  return res;
}

IndexResult average_entropy(const StepCurve& curve) {
  require_nonempty(curve);
  IndexResult res;
  res.name = IndexKind::AE;
  res.rho_used = mean_risk(curve);
  double s = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    s += curve.mass[i] * binary_entropy(curve.risk[i]);
  }
  res.value = binary_entropy(res.rho_used) - s;
  res.notes.push_back("likelihood-reduction form, natural log");
  return res;
}

IndexResult evaluate_index(IndexKind kind, const StepCurve& curve,
                           const IndexOptions& options) {
  if (needs_band(kind) && !options.band) {
    throw InputError(std::string(index_name(kind)) + " requires a band");
  }
  switch (kind) {
    case IndexKind::U: return predictiveness_u(curve);
    case IndexKind::UStd: return predictiveness_u_std(curve);
    case IndexKind::UPartial:
      return partial_u(curve, *options.band, false, options.partial_scale);
    case IndexKind::UPartialStd:
      return partial_u(curve, *options.band, true, options.partial_scale);
    case IndexKind::R: return r_square(curve, options.standardize_r);
    case IndexKind::TG: return total_gain(curve);
    case IndexKind::AE: return average_entropy(curve);
  }
  throw InputError("unknown index");
}

double index_value(IndexKind kind, const StepCurve& curve,
                   const IndexOptions& options) {
  switch (kind) {
    case IndexKind::U:
      require_nonempty(curve);
      return pairwise_difference_sum(curve.mass, curve.risk);
    case IndexKind::UStd:
      require_nonempty(curve);
      return pairwise_difference_sum(curve.mass, curve.risk) /
             (2.0 * bernoulli_variance(mean_risk(curve), "standardized U"));
    case IndexKind::UPartial:
    case IndexKind::UPartialStd: {
      if (!options.band) throw InputError("partial U requires a band");
      const PartialParts parts = partial_parts(curve, *options.band);
      return kind == IndexKind::UPartial
                 ? parts.u
                 : standardize_partial(parts, *options.band,
                                       options.partial_scale);
    }
    default:
      return evaluate_index(kind, curve, options).value;
  }
}

}  // namespace predictu
