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


#ifndef PREDICTU_IO_HPP_
#define PREDICTU_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "predictu/curve_links.hpp"
#include "predictu/inference.hpp"
#include "predictu/risk_model.hpp"
#include "predictu/simulate.hpp"
#include "predictu/summary_indices.hpp"

namespace predictu {

inline constexpr std::string_view kToolVersion = "predictu 0.1.0";

// Subjects: sample_id, status, marker columns (one row per subject).
// Counts: genotype_id, n_case, n_control (one row per genotype).
enum class InputFormat { Auto, Subjects, Counts };

struct ParseOptions {
  InputFormat format = InputFormat::Auto;
  // Largest tolerated share of malformed data rows; at least one bad row is
  // always tolerated.
  double max_bad_rows = 0.01;
};

struct ParseReport {
  InputFormat format = InputFormat::Auto;
  char delimiter = ',';
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  std::vector<std::string> markers;  // subject files only
  std::vector<std::string> warnings;
};

struct ParsedInput {
  CaseControlCounts counts;
  ParseReport report;
};

// Lines starting with '#' and blank lines are skipped. The delimiter (tab,
// comma, semicolon or whitespace) is detected from the header. Subject
// genotypes are labelled by joining the marker codes with '/', and indexed
// by sorted label.
ParsedInput parse_input_text(std::string_view text, double rho,
                             const ParseOptions& options = {});
ParsedInput read_input_file(const std::filesystem::path& path, double rho,
                            const ParseOptions& options = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

struct Provenance {
  std::string tool{kToolVersion};
  std::string config_hash;
  std::optional<std::uint64_t> seed;
};

// "# tool: ...", "# config_hash: ...", "# seed: ..." lines.
std::string provenance_header(const Provenance& prov);
nlohmann::ordered_json provenance_json(const Provenance& prov);

std::string counts_csv(const CaseControlCounts& counts,
                       const std::optional<Provenance>& prov = std::nullopt);
std::string curve_csv(const CurvePoints& curve, const Provenance& prov);
std::string roc_csv(const RocCurve& roc, const Provenance& prov);
std::string lorenz_csv(const LorenzCurve& lorenz, const Provenance& prov);
std::string eval_reports_csv(std::span<const EvalReport> reports, const Provenance& prov);

nlohmann::ordered_json to_json(const GenotypeId& id);
nlohmann::ordered_json to_json(const IndexResult& result);
nlohmann::ordered_json to_json(const UEstimate& estimate);
nlohmann::ordered_json to_json(const EvalReport& report);
// rho, G_m, dropped / boundary / unseen genotypes and warnings.
nlohmann::ordered_json table_metadata_json(const RiskTable& table);

// Pretty-printed with two-space indent and a trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace predictu

#endif  // PREDICTU_IO_HPP_
