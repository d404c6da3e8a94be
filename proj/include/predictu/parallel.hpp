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

#ifndef PREDICTU_PARALLEL_HPP_
#define PREDICTU_PARALLEL_HPP_

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace predictu {

// Worker count: PREDICTU_THREADS if set and positive, otherwise the hardware
// concurrency (at least 1).
unsigned default_worker_count();

// Resolves a requested worker count (0 = default) against `n_tasks`.
unsigned resolve_workers(unsigned requested, std::size_t n_tasks);

// Evaluates fn(i) for i in [0, n) on up to `workers` threads. Results are
// stored by index, so the output never depends on scheduling. The first
// exception thrown by any task is rethrown after all workers stop.
template <typename T, typename Fn>
std::vector<T> run_replicates(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<T> out(n);
  const unsigned w = resolve_workers(workers, n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (unsigned k = 0; k < w; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace predictu

#endif  // PREDICTU_PARALLEL_HPP_
