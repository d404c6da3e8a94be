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

#ifndef PREDICTU_RANDOM_HPP_
#define PREDICTU_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace predictu {

using Rng = std::mt19937_64;

// Mixes (master, stream, index) into an independent 64-bit seed, so that each
// replicate of each experiment owns its own generator regardless of how
// replicates are scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index);
Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

// Multinomial draw of `n` trials over `probs` (need not be normalized) by
// sequential conditional binomials.
void sample_multinomial(Rng& rng, std::int64_t n, std::span<const double> probs,
                        std::span<std::int64_t> out);

// Same, with category weights given as counts (bootstrap resampling).
void sample_multinomial(Rng& rng, std::int64_t n,
                        std::span<const std::int64_t> weights,
                        std::span<std::int64_t> out);

// Number of successes in `draws` draws without replacement from a population
// of `population` items of which `successes` are successes. Exact inverse
// transform, searching outward from the mode.
std::int64_t sample_hypergeometric(Rng& rng, std::int64_t population,
                                   std::int64_t successes, std::int64_t draws);

// Splits `draws` draws without replacement across classes of the given sizes.
void sample_multivariate_hypergeometric(Rng& rng,
                                        std::span<const std::int64_t> class_sizes,
                                        std::int64_t draws,
                                        std::span<std::int64_t> out);

}  // namespace predictu

#endif  // PREDICTU_RANDOM_HPP_
