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


// Brute-force reference implementations used by the tests. Each one follows
// the defining formula directly (pairwise loops, subject-level expansion,
// exhaustive search) and shares no code with the library.

#ifndef PREDICTU_TESTS_ORACLES_HPP_
#define PREDICTU_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

// 2 sum_{i>j} p_i p_j (r_i - r_j), positions in the given order.
inline double pairwise_u(const std::vector<double>& p, const std::vector<double>& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) s += p[i] * p[j] * (r[i] - r[j]);
  }
  return 2.0 * s;
}

inline double weighted_mean(const std::vector<double>& p, const std::vector<double>& r) {
  double s = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += p[i] * r[i];
    w += p[i];
  }
  return s / w;
}

// Mass of each step inside (q0, q1], by interval intersection.
inline std::vector<double> band_mass(const std::vector<double>& p, double q0, double q1) {
  std::vector<double> m(p.size());
  double left = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double right = left + p[i];
    const double a = std::max(left, q0);
    const double b = std::min(right, q1);
    m[i] = b > a ? b - a : 0.0;
    left = right;
  }
  return m;
}

// Double integral 2 int_{q0}^{q1} int_{q0}^{y} (r(y) - r(x)) dx dy over the
// step function: within a step the integrand is zero, across steps it is the
// product of the in-band masses.
inline double band_u(const std::vector<double>& p, const std::vector<double>& r, double q0,
                     double q1) {
  return pairwise_u(band_mass(p, q0, q1), r);
}

inline double entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log(1.0 - x);
}

// Mann-Whitney AUC over genotype classes: a case outranks a control when its
// risk is higher, ties count one half.
inline double mann_whitney_auc(const std::vector<double>& case_prob,
                               const std::vector<double>& control_prob,
                               const std::vector<double>& risk) {
  double auc = 0.0;
  for (std::size_t i = 0; i < risk.size(); ++i) {
    for (std::size_t j = 0; j < risk.size(); ++j) {
      const double w = case_prob[i] * control_prob[j];
      if (risk[i] > risk[j]) {
        auc += w;
      } else if (risk[i] == risk[j]) {
        auc += 0.5 * w;
      }
    }
  }
  return auc;
}

// Subject-level projection variance of the two-sample estimator. Subjects are
// expanded from per-position counts and every case/control pair is visited.
struct SubjectVariance {
  double u = 0.0;
  double variance = 0.0;
};

inline SubjectVariance subject_variance(const std::vector<std::int64_t>& cases,
                                        const std::vector<std::int64_t>& controls,
                                        double rho) {
  std::vector<int> case_pos;
  std::vector<int> control_pos;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (std::int64_t k = 0; k < cases[i]; ++k) case_pos.push_back(static_cast<int>(i));
    for (std::int64_t k = 0; k < controls[i]; ++k) control_pos.push_back(static_cast<int>(i));
  }
  const double nd = static_cast<double>(case_pos.size());
  const double nc = static_cast<double>(control_pos.size());
  auto phi = [](int a, int b) { return a > b ? 1.0 : (a < b ? -1.0 : 0.0); };
  double total = 0.0;
  std::vector<double> a(case_pos.size(), 0.0);
  std::vector<double> b(control_pos.size(), 0.0);
  for (std::size_t s = 0; s < case_pos.size(); ++s) {
    for (std::size_t t = 0; t < control_pos.size(); ++t) {
      const double v = phi(case_pos[s], control_pos[t]);
      a[s] += v;
      b[t] += v;
      total += v;
    }
  }
  const double theta = total / (nd * nc);
  double sa = 0.0;
  for (double x : a) sa += (x / nc - theta) * (x / nc - theta);
  double sb = 0.0;
  for (double x : b) sb += (x / nd - theta) * (x / nd - theta);
  const double k = 2.0 * rho * (1.0 - rho);
  SubjectVariance out;
  out.u = k * theta;
  out.variance = k * k * (sa / (nd * (nd - 1.0)) + sb / (nc * (nc - 1.0)));
  return out;
}

// Population variance of U by expanding N individuals: projection
// h_s = (1/N) sum_t sign(pos_s - pos_t)(r_s - r_t), variance (4/N) Var(h).
inline double individual_population_variance(const std::vector<std::int64_t>& counts,
                                             const std::vector<double>& r) {
  std::vector<int> pos;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::int64_t k = 0; k < counts[i]; ++k) pos.push_back(static_cast<int>(i));
  }
  const double n = static_cast<double>(pos.size());
  std::vector<double> h(pos.size(), 0.0);
  for (std::size_t s = 0; s < pos.size(); ++s) {
    for (std::size_t t = 0; t < pos.size(); ++t) {
      const int d = pos[s] - pos[t];
      const double sign = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
      h[s] += sign * (r[pos[s]] - r[pos[t]]);
    }
    h[s] /= n;
  }
  double mean = 0.0;
  for (double x : h) mean += x;
  mean /= n;
  double v = 0.0;
  for (double x : h) v += (x - mean) * (x - mean);
  return 4.0 / n * (v / n);
}

// Weighted isotonic regression by exhaustive search over all partitions of
// the sequence into contiguous blocks. A partition is admissible when its
// block means are nondecreasing; the optimum is the admissible partition of
// least weighted squared error.
inline std::vector<double> isotonic_brute_force(const std::vector<double>& x,
                                                const std::vector<double>& w) {
  const std::size_t n = x.size();
  std::vector<double> best;
  double best_sse = std::numeric_limits<double>::infinity();
  if (n == 0) return best;
  for (std::uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
    std::vector<double> fit(n);
    std::vector<double> means;
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool end = i == n - 1 || (cuts >> i) & 1u;
      if (!end) continue;
      double sw = 0.0;
      double sx = 0.0;
      for (std::size_t k = start; k <= i; ++k) {
        sw += w[k];
        sx += w[k] * x[k];
      }
      const double m = sx / sw;
      for (std::size_t k = start; k <= i; ++k) fit[k] = m;
      means.push_back(m);
      start = i + 1;
    }
    if (!std::is_sorted(means.begin(), means.end())) continue;
    double sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) sse += w[k] * (fit[k] - x[k]) * (fit[k] - x[k]);
    if (sse < best_sse - 1e-15) {
      best_sse = sse;
      best = fit;
    }
  }
  return best;
}

}  // namespace oracle

#endif  // PREDICTU_TESTS_ORACLES_HPP_
