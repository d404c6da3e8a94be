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

#include "predictu/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "predictu/error.hpp"

namespace predictu {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::int64_t binomial(Rng& rng, std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng);
}

double log_choose(std::int64_t n, std::int64_t k) {
  using boost::math::lgamma;
  return lgamma(static_cast<double>(n) + 1.0) -
         lgamma(static_cast<double>(k) + 1.0) -
         lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (stream * 0xd1b54a32d192ed03ULL));
  h = splitmix64(h ^ (index * 0x8cb92ba72f3d8dd7ULL));
  return h;
}

Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t s = derive_seed(master, stream, index);
  std::seed_seq seq{static_cast<std::uint32_t>(s),
                    static_cast<std::uint32_t>(s >> 32)};
  return Rng(seq);
}

void sample_multinomial(Rng& rng, std::int64_t n, std::span<const double> probs,
                        std::span<std::int64_t> out) {
  if (out.size() != probs.size()) {
    throw InputError("multinomial: output size mismatch");
  }
  double remaining_mass = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0) throw InputError("multinomial: negative probability");
    remaining_mass += probs[i];
    if (probs[i] > 0.0) last = i;
  }
  if (n > 0 && !(remaining_mass > 0.0)) {
    throw InputError("multinomial: probabilities sum to zero");
  }
  std::int64_t remaining = n;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (remaining == 0 || remaining_mass <= 0.0) {
      out[i] = 0;
      continue;
    }
    if (i == last) {
      out[i] = remaining;
      remaining = 0;
      continue;
    }
    const double p = std::clamp(probs[i] / remaining_mass, 0.0, 1.0);
    out[i] = binomial(rng, remaining, p);
    remaining -= out[i];
    remaining_mass -= probs[i];
  }
}

void sample_multinomial(Rng& rng, std::int64_t n,
                        std::span<const std::int64_t> weights,
                        std::span<std::int64_t> out) {
  if (out.size() != weights.size()) {
    throw InputError("multinomial: output size mismatch");
  }
  std::int64_t remaining_weight =
      std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
  std::int64_t remaining = n;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (remaining == 0 || remaining_weight == 0) {
      out[i] = 0;
      continue;
    }
    if (weights[i] == remaining_weight) {
      out[i] = remaining;
      remaining = 0;
      continue;
    }
    const double p = static_cast<double>(weights[i]) /
                     static_cast<double>(remaining_weight);
    out[i] = binomial(rng, remaining, p);
    remaining -= out[i];
    remaining_weight -= weights[i];
  }
}

std::int64_t sample_hypergeometric(Rng& rng, std::int64_t population,
                                   std::int64_t successes, std::int64_t draws) {
  if (population < 0 || successes < 0 || draws < 0 || successes > population ||
      draws > population) {
    throw InputError("hypergeometric: invalid parameters");
  }
  const std::int64_t failures = population - successes;
  const std::int64_t lo = std::max<std::int64_t>(0, draws - failures);
  const std::int64_t hi = std::min(draws, successes);
  if (lo == hi) return lo;

  std::int64_t mode = static_cast<std::int64_t>(
      std::floor((static_cast<double>(draws) + 1.0) *
                 (static_cast<double>(successes) + 1.0) /
                 (static_cast<double>(population) + 2.0)));
  mode = std::clamp(mode, lo, hi);
  const double pmf_mode =
      std::exp(log_choose(successes, mode) +
               log_choose(failures, draws - mode) -
               log_choose(population, draws));

  // pmf(k+1) / pmf(k) and its inverse.
  auto up_ratio = [&](std::int64_t k) {
    return static_cast<double>(successes - k) * static_cast<double>(draws - k) /
           (static_cast<double>(k + 1) *
            static_cast<double>(failures - draws + k + 1));
  };

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  u -= pmf_mode;
  if (u < 0.0) return mode;
  std::int64_t up = mode;
  std::int64_t down = mode;
  double pmf_up = pmf_mode;
  double pmf_down = pmf_mode;
  while (up < hi || down > lo) {
    if (up < hi) {
      pmf_up *= up_ratio(up);
      ++up;
      u -= pmf_up;
      if (u < 0.0) return up;
    }
    if (down > lo) {
      pmf_down /= up_ratio(down - 1);
      --down;
      u -= pmf_down;
      if (u < 0.0) return down;
    }
  }
  // Only reachable through rounding in the tail sums.
  return mode;
}

void sample_multivariate_hypergeometric(Rng& rng,
                                        std::span<const std::int64_t> class_sizes,
                                        std::int64_t draws,
                                        std::span<std::int64_t> out) {
  if (out.size() != class_sizes.size()) {
    throw InputError("hypergeometric: output size mismatch");
  }
  std::int64_t remaining_pop =
      std::accumulate(class_sizes.begin(), class_sizes.end(), std::int64_t{0});
  if (draws > remaining_pop) throw InputError("hypergeometric: too many draws");
  std::int64_t remaining_draws = draws;
  for (std::size_t i = 0; i < class_sizes.size(); ++i) {
    if (remaining_draws == 0) {
      out[i] = 0;
    } else {
      out[i] = sample_hypergeometric(rng, remaining_pop, class_sizes[i],
                                     remaining_draws);
    }
    remaining_pop -= class_sizes[i];
    remaining_draws -= out[i];
  }
}

}  // namespace predictu
