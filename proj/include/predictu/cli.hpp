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


#ifndef PREDICTU_CLI_HPP_
#define PREDICTU_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "predictu/summary_indices.hpp"

namespace predictu {

struct RunConfig {
  std::string command;  // curve, summarize, validate, links, simulate, report
  std::string input;
  std::string train;
  std::string test;
  std::string model;   // model spec file (simulate)
  std::string preset;  // preset name or group (simulate)
  std::vector<std::string> inputs;  // report
  std::optional<double> rho;
  std::optional<Band> band;
  std::vector<IndexKind> indices;
  PartialScale partial_scale = PartialScale::BandMass;
  bool isotonic = false;
  bool standardize = false;
  std::size_t bootstrap = 0;
  std::size_t permutation = 0;
  std::uint64_t seed = 0;
  double level = 0.95;
  double pseudocount = 0.0;
  double max_bad_rows = 0.01;
  std::optional<std::size_t> replicates;
  std::optional<std::int64_t> n_case;
  std::optional<std::int64_t> n_control;
  std::string order;  // simulate: population or training
  std::string out;
  std::string format = "json";

  // Options that affect results, in a fixed layout (the output directory is
  // left out).
  std::string canonical() const;
};

// "q0:q1" with 0 <= q0 < q1 <= 1.
Band parse_band(const std::string& text);
// Comma-separated index tokens.
std::vector<IndexKind> parse_index_list(const std::string& text);

// Exit codes: 0 success, 2 invalid input or usage, 3 numeric failure.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace predictu

#endif  // PREDICTU_CLI_HPP_
