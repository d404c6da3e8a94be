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

#ifndef PREDICTU_ISOTONIC_HPP_
#define PREDICTU_ISOTONIC_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "predictu/risk_model.hpp"

namespace predictu {

struct IsotonicBlock {
  std::size_t start = 0;  // first element
  std::size_t end = 0;    // one past the last element
  double value = 0.0;     // weighted mean of the pooled elements
  double weight = 0.0;    // total weight of the pooled elements
};

struct IsotonicFit {
  std::vector<double> fitted;  // same length and order as the input
  std::vector<IsotonicBlock> blocks;
};

// Weighted least-squares nondecreasing fit by pool-adjacent-violators.
// Adjacent blocks with equal values are pooled too, so block values are
// strictly increasing.
IsotonicFit pava(std::span<const double> values, std::span<const double> weights);

// Replaces the risks of `table` with their mass-weighted isotonic fit. The
// stored order is kept, so sum p r is preserved.
RiskTable isotonic_refit(const RiskTable& table);
StepCurve isotonic_refit(const StepCurve& curve);

// Collapses each pooled block of `fit` into a single entry carrying the
// block mass and pooled risk.
RiskTable merge_pooled_blocks(const RiskTable& table, const IsotonicFit& fit);

}  // namespace predictu

#endif  // PREDICTU_ISOTONIC_HPP_
