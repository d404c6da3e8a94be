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

#include "predictu/isotonic.hpp"

#include "predictu/error.hpp"

namespace predictu {

IsotonicFit pava(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) {
    throw InputError("pava: values and weights differ in length");
  }
  struct Pool {
    std::size_t start;
    std::size_t end;
    double sum_w;
    double sum_wx;
    double value;
  };
  std::vector<Pool> stack;
  stack.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0)) throw InputError("pava: weights must be positive");
    Pool cur{i, i + 1, weights[i], weights[i] * values[i], values[i]};
    while (!stack.empty() && stack.back().value >= cur.value) {
      const Pool& prev = stack.back();
      Pool merged{prev.start, cur.end, prev.sum_w + cur.sum_w,
                  prev.sum_wx + cur.sum_wx, cur.value};
      if (prev.value != cur.value) merged.value = merged.sum_wx / merged.sum_w;
      stack.pop_back();
      cur = merged;
    }
    stack.push_back(cur);
  }

  IsotonicFit fit;
  fit.fitted.resize(values.size());
  fit.blocks.reserve(stack.size());
  for (const Pool& p : stack) {
    for (std::size_t k = p.start; k < p.end; ++k) fit.fitted[k] = p.value;
    fit.blocks.push_back({p.start, p.end, p.value, p.sum_w});
  }
  return fit;
}

RiskTable isotonic_refit(const RiskTable& table) {
  const StepCurve curve(table);
  const IsotonicFit fit = pava(curve.risk, curve.mass);
  RiskTable out = table;
  out.diagnostics.boundary.clear();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.entries[i].r = fit.fitted[i];
    if (fit.fitted[i] == 0.0 || fit.fitted[i] == 1.0) {
      out.diagnostics.boundary.push_back(out.entries[i].genotype);
    }
  }
  return out;
}

StepCurve isotonic_refit(const StepCurve& curve) {
  IsotonicFit fit = pava(curve.risk, curve.mass);
  return StepCurve(curve.mass, std::move(fit.fitted));
}

RiskTable merge_pooled_blocks(const RiskTable& table, const IsotonicFit& fit) {
  if (fit.fitted.size() != table.size()) {
    throw InputError("isotonic fit does not match the table");
  }
  RiskTable out;
  out.rho = table.rho;
  for (const auto& b : fit.blocks) {
    RiskEntry e;
    e.genotype = table.entries[b.start].genotype;
    for (std::size_t k = b.start + 1; k < b.end; ++k) {
      e.genotype.label += "+" + table.entries[k].genotype.key();
    }
    for (std::size_t k = b.start; k < b.end; ++k) e.p += table.entries[k].p;
    e.r = b.value;
    out.entries.push_back(std::move(e));
    out.ordering.push_back(b.start);
  }
  return out;
}

}  // namespace predictu
