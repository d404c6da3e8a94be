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

#include "predictu/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace predictu {

unsigned default_worker_count() {
  if (const char* env = std::getenv("PREDICTU_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
      // unparsable: fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

unsigned resolve_workers(unsigned requested, std::size_t n_tasks) {
  unsigned w = requested == 0 ? default_worker_count() : requested;
  if (const char* env = std::getenv("PREDICTU_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap > 0) w = std::min(w, static_cast<unsigned>(cap));
    } catch (...) {
    }
  }
  if (n_tasks < w) w = static_cast<unsigned>(std::max<std::size_t>(1, n_tasks));
  return w;
}

}  // namespace predictu
