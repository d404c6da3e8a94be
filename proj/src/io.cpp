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

#include "predictu/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "predictu/error.hpp"

namespace predictu {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back({number, line});
  }
  return out;
}

char detect_delimiter(std::string_view header) {
  for (char c : {'\t', ',', ';'}) {
    if (header.find(c) != std::string_view::npos) return c;
  }
  return ' ';
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  if (delim == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool missing_code(std::string_view s) {
  return s.empty() || s == "NA" || s == "na" || s == "." || s == "?";
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string genotype_text(const GenotypeId& id) {
  return id.label.empty() ? "g" + std::to_string(id.index) : id.label;
}

class BadRowTracker {
 public:
  BadRowTracker(ParseReport& report, double max_share)
      : report_(report), max_share_(max_share) {}

  void drop(std::size_t line, const std::string& why) {
    ++report_.rows_dropped;
    report_.warnings.push_back("line " + std::to_string(line) + ": " + why +
                               "; row dropped");
  }

  void finish() const {
    const auto allowed = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::floor(max_share_ * static_cast<double>(report_.rows_read))));
    if (report_.rows_dropped > allowed) {
      std::ostringstream msg;
      msg << report_.rows_dropped << " of " << report_.rows_read
          << " rows are malformed, above --max-bad-rows " << max_share_;
      throw InputError(msg.str());
    }
  }

 private:
  ParseReport& report_;
  double max_share_;
};

CaseControlCounts parse_subjects(const std::vector<Line>& lines,
                                 const std::vector<std::string>& header,
                                 double rho, ParseReport& report, BadRowTracker& bad) {
  std::optional<std::size_t> status_col;
  std::vector<std::size_t> marker_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "status") {
      status_col = c;
    } else if (header[c] != "sample_id") {
      marker_cols.push_back(c);
    }
  }
  if (!status_col) throw InputError("subject file has no 'status' column");
  if (marker_cols.empty()) throw InputError("subject file has no marker columns");
  for (std::size_t c : marker_cols) report.markers.push_back(header[c]);

  std::map<std::string, std::pair<std::int64_t, std::int64_t>> tally;
  std::string label;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    ++report.rows_read;
    const auto f = split(lines[k].text, report.delimiter);
    if (f.size() != header.size()) {
      bad.drop(lines[k].number, "expected " + std::to_string(header.size()) +
                                    " fields, got " + std::to_string(f.size()));
      continue;
    }
    const std::string_view status = f[*status_col];
    if (missing_code(status)) {
      bad.drop(lines[k].number, "missing status");
      continue;
    }
    if (status != "0" && status != "1") {
      throw InputError("line " + std::to_string(lines[k].number) +
                       ": non-binary status '" + std::string(status) +
                       "' (expected 0 or 1)");
    }
    label.clear();
    bool ok = true;
    for (std::size_t c : marker_cols) {
      if (missing_code(f[c])) {
        ok = false;
        break;
      }
      if (!label.empty()) label += '/';
      label += f[c];
    }
    if (!ok) {
      bad.drop(lines[k].number, "missing genotype code");
      continue;
    }
    auto& cell = tally[label];
    (status == "1" ? cell.first : cell.second) += 1;
  }
  std::vector<CountRow> rows;
  std::size_t index = 0;
  for (const auto& [lab, nc] : tally) {
    rows.push_back({{index++, lab}, nc.first, nc.second});
  }
  return CaseControlCounts::from_rows(std::move(rows), rho);
}

CaseControlCounts parse_count_rows(const std::vector<Line>& lines,
                                   const std::vector<std::string>& header, double rho,
                                   ParseReport& report, BadRowTracker& bad) {
  auto column = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError(std::string("counts file has no '") + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column("genotype_id");
  const std::size_t case_col = column("n_case");
  const std::size_t control_col = column("n_control");

  std::vector<CountRow> rows;
  std::unordered_set<std::string> seen;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    ++report.rows_read;
    const auto f = split(lines[k].text, report.delimiter);
    if (f.size() != header.size()) {
      bad.drop(lines[k].number, "expected " + std::to_string(header.size()) +
                                    " fields, got " + std::to_string(f.size()));
      continue;
    }
    std::int64_t nc = 0;
    std::int64_t nd = 0;
    if (f[id_col].empty() || !parse_int(f[case_col], nc) || !parse_int(f[control_col], nd)) {
      bad.drop(lines[k].number, "unreadable genotype_id or counts");
      continue;
    }
    const std::string id(f[id_col]);
    if (nc < 0 || nd < 0) {
      throw InputError("line " + std::to_string(lines[k].number) +
                       ": negative count for genotype " + id);
    }
    if (!seen.insert(id).second) {
      throw InputError("line " + std::to_string(lines[k].number) +
                       ": duplicate genotype_id " + id);
    }
    rows.push_back({{rows.size(), id}, nc, nd});
  }
  return CaseControlCounts::from_rows(std::move(rows), rho);
}

}  // namespace

ParsedInput parse_input_text(std::string_view text, double rho, const ParseOptions& options) {
  if (!(options.max_bad_rows >= 0.0 && options.max_bad_rows <= 1.0)) {
    throw InputError("--max-bad-rows must lie in [0, 1]");
  }
  const std::vector<Line> lines = content_lines(text);
  if (lines.empty()) throw InputError("input has no header row");
  ParsedInput out;
  ParseReport& report = out.report;
  report.delimiter = detect_delimiter(lines[0].text);
  std::vector<std::string> header;
  for (auto h : split(lines[0].text, report.delimiter)) header.push_back(lower(h));

  auto has = [&](const char* name) {
    return std::find(header.begin(), header.end(), name) != header.end();
  };
  report.format = options.format;
  if (report.format == InputFormat::Auto) {
    if (has("genotype_id")) {
      report.format = InputFormat::Counts;
    } else if (has("sample_id") || has("status")) {
      report.format = InputFormat::Subjects;
    } else {
      throw InputError(
          "unrecognized header: expected sample_id,status,<markers> or "
          "genotype_id,n_case,n_control");
    }
  }
  BadRowTracker bad(report, options.max_bad_rows);
  out.counts = report.format == InputFormat::Counts
                   ? parse_count_rows(lines, header, rho, report, bad)
                   : parse_subjects(lines, header, rho, report, bad);
  bad.finish();
  out.counts.validate();
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

ParsedInput read_input_file(const std::filesystem::path& path, double rho,
                            const ParseOptions& options) {
  try {
    return parse_input_text(read_text_file(path), rho, options);
  } catch (const InputError& e) {
    throw InputError(path.filename().string() + ": " + e.what());
  }
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string provenance_header(const Provenance& prov) {
  std::string out = "# tool: " + prov.tool + "\n# config_hash: " + prov.config_hash + "\n";
  out += "# seed: " + (prov.seed ? std::to_string(*prov.seed) : std::string("none")) + "\n";
  return out;
}

nlohmann::ordered_json provenance_json(const Provenance& prov) {
  nlohmann::ordered_json j;
  j["tool"] = prov.tool;
  j["config_hash"] = prov.config_hash;
  j["seed"] = prov.seed ? nlohmann::ordered_json(*prov.seed) : nlohmann::ordered_json(nullptr);
  return j;
}

std::string counts_csv(const CaseControlCounts& counts, const std::optional<Provenance>& prov) {
  std::string out = prov ? provenance_header(*prov) : std::string{};
  out += "genotype_id,n_case,n_control\n";
  for (const CountRow& row : counts.rows) {
    out += genotype_text(row.genotype) + "," + std::to_string(row.n_case) + "," +
           std::to_string(row.n_control) + "\n";
  }
  return out;
}

std::string curve_csv(const CurvePoints& curve, const Provenance& prov) {
  std::string out = provenance_header(prov) + "genotype,q,r\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    out += genotype_text(curve.genotypes[i]) + "," + fmt(curve.points[i].q) + "," +
           fmt(curve.points[i].r) + "\n";
  }
  return out;
}

std::string roc_csv(const RocCurve& roc, const Provenance& prov) {
  std::string out = provenance_header(prov) + "t,f\n";
  for (const auto& p : roc.points) out += fmt(p.t) + "," + fmt(p.f) + "\n";
  return out;
}

std::string lorenz_csv(const LorenzCurve& lorenz, const Provenance& prov) {
  std::string out = provenance_header(prov) + "q,h\n";
  for (const auto& p : lorenz.points) out += fmt(p.q) + "," + fmt(p.h) + "\n";
  return out;
}

std::string eval_reports_csv(std::span<const EvalReport> reports, const Provenance& prov) {
  std::string out = provenance_header(prov) +
                    "model,index,isotonic,true_value,mean,sd,pct_bias,pct_coverage,"
                    "n_replicates,n_failed\n";
  for (const auto& r : reports) {
    out += r.model + "," + std::string(index_name(r.index)) + "," +
           (r.isotonic ? "1" : "0") + "," + fmt(r.true_value) + "," + fmt(r.mean) + "," +
           fmt(r.sd) + "," + fmt(r.pct_bias) + "," + fmt(r.pct_coverage) + "," +
           std::to_string(r.n_replicates) + "," + std::to_string(r.n_failed) + "\n";
  }
  return out;
}

nlohmann::ordered_json to_json(const GenotypeId& id) { return genotype_text(id); }

nlohmann::ordered_json to_json(const IndexResult& result) {
  nlohmann::ordered_json j;
  j["index"] = std::string(index_name(result.name));
  j["value"] = result.value;
  j["standardized"] = result.standardized;
  if (result.band) {
    j["band"] = {{"q0", result.band->q0}, {"q1", result.band->q1}};
  } else {
    j["band"] = nullptr;
  }
  j["rho"] = result.rho_used;
  if (result.rho_pt) j["rho_pt"] = *result.rho_pt;
  if (result.rho_pt_mean) j["rho_pt_mean"] = *result.rho_pt_mean;
  if (!result.notes.empty()) j["notes"] = result.notes;
  return j;
}

nlohmann::ordered_json to_json(const UEstimate& e) {
  nlohmann::ordered_json j;
  j["u_hat"] = e.u_hat;
  j["variance"] = e.variance;
  if (e.ci) {
    j["ci"] = {{"lower", e.ci->lower}, {"upper", e.ci->upper}, {"level", e.ci->level}};
  } else {
    j["ci"] = nullptr;
  }
  j["method"] = std::string(method_name(e.method));
  j["n_replicates"] = e.n_replicates;
  j["seed"] = e.seed ? nlohmann::ordered_json(*e.seed) : nlohmann::ordered_json(nullptr);
  return j;
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["index"] = std::string(index_name(r.index));
  j["isotonic"] = r.isotonic;
  j["true_value"] = r.true_value;
  j["mean"] = r.mean;
  j["sd"] = r.sd;
  j["pct_bias"] = r.pct_bias;
  j["pct_coverage"] = r.pct_coverage;
  j["n_replicates"] = r.n_replicates;
  j["n_failed"] = r.n_failed;
  return j;
}

nlohmann::ordered_json table_metadata_json(const RiskTable& table) {
  auto ids = [](const std::vector<GenotypeId>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& g : v) a.push_back(to_json(g));
    return a;
  };
  nlohmann::ordered_json j;
  j["rho"] = table.rho;
  j["G_m"] = table.size();
  j["monotone"] = table.is_monotone();
  j["dropped"] = ids(table.diagnostics.dropped);
  j["boundary"] = ids(table.diagnostics.boundary);
  j["unseen"] = ids(table.diagnostics.unseen);
  j["warnings"] = table.diagnostics.warnings;
  return j;
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace predictu
