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

#ifndef PREDICTU_ERROR_HPP_
#define PREDICTU_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace predictu {

// Bad input: malformed files, violated preconditions, inconsistent options.
// The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that is defined for the input but cannot be carried out
// (degenerate standardization, calibration that does not converge, ...).
// The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace predictu

#endif  // PREDICTU_ERROR_HPP_
