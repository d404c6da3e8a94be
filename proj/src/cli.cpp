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

#include "predictu/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "predictu/curve_links.hpp"
#include "predictu/error.hpp"
#include "predictu/inference.hpp"
#include "predictu/io.hpp"
#include "predictu/isotonic.hpp"
#include "predictu/risk_model.hpp"
#include "predictu/simulate.hpp"

namespace predictu {
namespace {

using json = nlohmann::ordered_json;

const std::vector<IndexKind> kDefaultIndices = {IndexKind::U, IndexKind::UStd, IndexKind::R,
                                                IndexKind::TG, IndexKind::AE};

std::string join_indices(const std::vector<IndexKind>& v) {
  std::string s;
  for (IndexKind k : v) {
    if (!s.empty()) s += ',';
    s += index_name(k);
  }
  return s;
}

double require_rho(const RunConfig& c) {
  if (!c.rho) throw InputError("--rho is required for case-control input");
  if (!(*c.rho > 0.0 && *c.rho < 1.0)) throw InputError("--rho must lie in (0, 1)");
  return *c.rho;
}

std::vector<IndexKind> requested_indices(const RunConfig& c) {
  std::vector<IndexKind> v = c.indices;
  if (v.empty()) {
    v = kDefaultIndices;
    if (c.band) {
      v.push_back(IndexKind::UPartial);
      v.push_back(IndexKind::UPartialStd);
    }
  }
  for (IndexKind k : v) {
    if (needs_band(k) && !c.band) {
      throw InputError(std::string(index_name(k)) + " requires --band q0:q1");
    }
  }
  return v;
}

IndexOptions index_options(const RunConfig& c) {
  IndexOptions o;
  o.band = c.band;
  o.partial_scale = c.partial_scale;
  o.standardize_r = c.standardize;
  return o;
}

json index_block(const StepCurve& curve, const RunConfig& c) {
  json a = json::array();
  const IndexOptions opts = index_options(c);
  for (IndexKind k : requested_indices(c)) a.push_back(to_json(evaluate_index(k, curve, opts)));
  return a;
}

json parse_block(const ParseReport& r) {
  json j;
  j["format"] = r.format == InputFormat::Counts ? "counts" : "subjects";
  j["rows_read"] = r.rows_read;
  j["rows_dropped"] = r.rows_dropped;
  if (!r.markers.empty()) j["markers"] = r.markers;
  j["warnings"] = r.warnings;
  return j;
}

ParseOptions parse_options(const RunConfig& c) {
  ParseOptions o;
  o.max_bad_rows = c.max_bad_rows;
  return o;
}

class Session {
 public:
  Session(const RunConfig& config, std::ostream& out, std::ostream& err)
      : config_(config), out_(out), err_(err) {}

  ParsedInput load(const std::string& path) {
    if (path.empty()) throw InputError("an input file is required");
    const std::string text = read_text_file(path);
    content_ += fnv1a_hex(text);
    ParsedInput in;
    try {
      in = parse_input_text(text, require_rho(config_), parse_options(config_));
    } catch (const InputError& e) {
      throw InputError(std::filesystem::path(path).filename().string() + ": " + e.what());
    }
    for (const auto& w : in.report.warnings) err_ << "warning: " << w << "\n";
    return in;
  }

  void add_content(const std::string& text) { content_ += fnv1a_hex(text); }

  Provenance provenance(bool seeded) const {
    Provenance p;
    p.config_hash = fnv1a_hex(config_.canonical() + "|" + content_);
    if (seeded) p.seed = config_.seed;
    return p;
  }

  // Writes `name` into the output directory. Without --out, only the
  // primary artifact is printed.
  void emit(const std::string& name, const std::string& content, bool primary) {
    if (!config_.out.empty()) {
      const auto path = std::filesystem::path(config_.out) / name;
      write_text_file(path, content);
      out_ << "wrote " << path.string() << "\n";
    } else if (primary) {
      out_ << content;
    }
  }

  bool csv() const { return config_.format == "csv"; }

 private:
  const RunConfig& config_;
  std::ostream& out_;
  std::ostream& err_;
  std::string content_;
};

std::string indices_csv(const json& indices, const Provenance& prov) {
  std::string s = provenance_header(prov) + "index,value\n";
  for (const auto& r : indices) {
    std::ostringstream v;
    v.precision(17);
    v << r["value"].get<double>();
    s += r["index"].get<std::string>() + "," + v.str() + "\n";
  }
  return s;
}

int cmd_curve(const RunConfig& c, Session& s) {
  const ParsedInput in = s.load(c.input);
  EstimateOptions eo{c.pseudocount};
  const RiskTable table = estimate_risk_table(in.counts, eo);
  const Provenance prov = s.provenance(false);
  json meta;
  meta["provenance"] = provenance_json(prov);
  meta["input"] = parse_block(in.report);
  meta["table"] = table_metadata_json(table);
  s.emit("curve.csv", curve_csv(curve_points(table), prov), s.csv());
  if (c.isotonic) {
    s.emit("curve_isotonic.csv", curve_csv(curve_points(isotonic_refit(table)), prov), false);
  }
  s.emit("curve.json", dump_json(meta), !s.csv());
  return 0;
}

json ci_block(const CaseControlCounts& counts, std::span<const GenotypeId> order,
              const RunConfig& c) {
  json a = json::array();
  const UEstimate asym = asymptotic_ci(two_sample_u(counts, order), c.level);
  a.push_back(to_json(asym));
  ResamplePlan plan;
  plan.seed = c.seed;
  if (c.bootstrap > 0) {
    plan.n_replicates = c.bootstrap;
    a.push_back(to_json(bootstrap_ci(counts, order, plan, c.level)));
  }
  json j;
  j["u"] = a;
  if (c.band && c.bootstrap > 0) {
    plan.n_replicates = c.bootstrap;
    json pt;
    pt["band"] = {{"q0", c.band->q0}, {"q1", c.band->q1}};
    pt["raw"] = to_json(partial_u_variance(counts, order, *c.band, plan, c.level, false,
                                           c.partial_scale));
    pt["standardized"] = to_json(
        partial_u_variance(counts, order, *c.band, plan, c.level, true, c.partial_scale));
    j["partial_u"] = pt;
  }
  if (c.permutation > 0) {
    plan.n_replicates = c.permutation;
    plan.scheme = ResampleScheme::LabelPermutation;
    json p;
    p["p_value"] = permutation_test(counts, order, plan);
    p["n_replicates"] = c.permutation;
    p["seed"] = c.seed;
    j["permutation"] = p;
  }
  return j;
}

int cmd_summarize(const RunConfig& c, Session& s) {
  const ParsedInput in = s.load(c.input);
  EstimateOptions eo{c.pseudocount};
  const RiskTable table = estimate_risk_table(in.counts, eo);
  const Provenance prov = s.provenance(true);
  const std::vector<GenotypeId> order = table.genotype_order();

  json doc;
  doc["provenance"] = provenance_json(prov);
  doc["input"] = parse_block(in.report);
  doc["table"] = table_metadata_json(table);
  doc["indices"] = index_block(table, c);
  std::optional<RiskTable> refit;
  if (c.isotonic) {
    refit = isotonic_refit(table);
    doc["indices_isotonic"] = index_block(*refit, c);
  }
  json ci;
  ci["provenance"] = provenance_json(prov);
  ci.update(ci_block(in.counts, order, c));

  s.emit("curve.csv", curve_csv(curve_points(table), prov), false);
  if (refit) s.emit("curve_isotonic.csv", curve_csv(curve_points(*refit), prov), false);
  s.emit("indices.json", dump_json(doc), !s.csv());
  if (s.csv()) s.emit("indices.csv", indices_csv(doc["indices"], prov), true);
  s.emit("ci.json", dump_json(ci), false);
  return 0;
}

int cmd_validate(const RunConfig& c, Session& s) {
  const ParsedInput train = s.load(c.train);
  const ParsedInput test = s.load(c.test);
  EstimateOptions eo{c.pseudocount};
  const RiskTable train_table = estimate_risk_table(train.counts, eo);
  const ValidationCurve vc = apply_model_to_test(train_table.genotype_order(), test.counts, eo);
  const RiskTable refit = isotonic_refit(vc.table);
  const Provenance prov = s.provenance(true);

  json doc;
  doc["provenance"] = provenance_json(prov);
  json tr;
  tr["input"] = parse_block(train.report);
  tr["table"] = table_metadata_json(train_table);
  tr["indices"] = index_block(train_table, c);
  json te;
  te["input"] = parse_block(test.report);
  te["table"] = table_metadata_json(vc.table);
  te["indices"] = index_block(vc.table, c);
  if (c.isotonic) te["indices_isotonic"] = index_block(refit, c);
  te.update(ci_block(test.counts, vc.table.genotype_order(), c));
  doc["train"] = tr;
  doc["test"] = te;

  s.emit("test_curve.csv", curve_csv(stored_order_points(vc.table), prov), false);
  if (c.isotonic) {
    s.emit("test_curve_isotonic.csv", curve_csv(stored_order_points(refit), prov), false);
  }
  s.emit("validate.json", dump_json(doc), !s.csv());
  if (s.csv()) s.emit("validate.csv", indices_csv(te["indices"], prov), true);
  return 0;
}

int cmd_links(const RunConfig& c, Session& s) {
  const ParsedInput in = s.load(c.input);
  EstimateOptions eo{c.pseudocount};
  const RiskTable table = estimate_risk_table(in.counts, eo);
  const Provenance prov = s.provenance(false);
  const RocCurve roc = roc_from_table(table);
  const LorenzCurve lorenz = lorenz_from_table(table);
  const IdentityCheck ri = check_roc_identity(table);
  const IdentityCheck li = check_lorenz_identity(table);

  json doc;
  doc["provenance"] = provenance_json(prov);
  doc["u"] = ri.u;
  doc["rho"] = table.implied_prevalence();
  doc["auc_roc"] = roc.auc;
  doc["auc_lorenz"] = lorenz.auc;
  doc["roc_identity"] = {{"predicted", ri.predicted}, {"residual", ri.residual}};
  doc["lorenz_identity"] = {{"predicted", li.predicted}, {"residual", li.residual}};
  doc["lorenz_roc_residual"] = lorenz_roc_residual(table);
  s.emit("roc.csv", roc_csv(roc, prov), false);
  s.emit("lorenz.csv", lorenz_csv(lorenz, prov), false);
  s.emit("links.json", dump_json(doc), true);
  return 0;
}

int cmd_simulate(const RunConfig& c, Session& s) {
  std::vector<PopulationSpec> specs;
  if (!c.model.empty()) {
    s.add_content(read_text_file(c.model));
    specs.push_back(load_population_spec(c.model));
  } else if (!c.preset.empty()) {
    specs = find_presets(c.preset);
  } else {
    throw InputError("simulate needs --preset NAME or --model FILE");
  }
  EvalOptions o = specs.front().design;
  o.population_size = specs.front().size;
  if (!c.indices.empty()) o.indices = c.indices;
  if (c.band) o.band = c.band;
  o.partial_scale = c.partial_scale;
  if (c.isotonic) o.isotonic = true;
  if (c.bootstrap > 0) o.n_bootstrap = c.bootstrap;
  if (c.replicates) o.n_replicates = *c.replicates;
  if (c.n_case) o.n_case = *c.n_case;
  if (c.n_control) o.n_control = *c.n_control;
  if (c.seed != 0) o.seed = c.seed;
  o.level = c.level;
  if (c.order == "population") {
    o.order_source = OrderSource::Population;
  } else if (c.order == "training") {
    o.order_source = OrderSource::TrainingSample;
  } else if (!c.order.empty()) {
    throw InputError("--order must be population or training");
  }

  std::vector<DiseaseModel> models;
  for (const auto& sp : specs) models.push_back(sp.model);
  const auto reports = run_bias_coverage(models, o);

  Provenance prov = s.provenance(true);
  prov.seed = o.seed;
  json doc;
  doc["provenance"] = provenance_json(prov);
  json design;
  design["n_case"] = o.n_case;
  design["n_control"] = o.n_control;
  design["replicates"] = o.n_replicates;
  design["bootstrap"] = o.n_bootstrap;
  design["isotonic"] = o.isotonic;
  design["order"] = o.order_source == OrderSource::Population ? "population" : "training";
  if (o.band) design["band"] = {{"q0", o.band->q0}, {"q1", o.band->q1}};
  doc["design"] = design;
  json models_json = json::array();
  for (const auto& sp : specs) {
    json m;
    m["name"] = sp.name;
    m["group"] = sp.group;
    m["version"] = sp.version;
    m["rho"] = implied_prevalence(sp.model);
    m["heritability"] = heritability(sp.model);
    m["n_snps"] = sp.model.snps.size();
    models_json.push_back(m);
  }
  doc["models"] = models_json;
  json reps = json::array();
  for (const auto& r : reports) reps.push_back(to_json(r));
  doc["reports"] = reps;
  s.emit("eval.csv", eval_reports_csv(reports, prov), s.csv());
  s.emit("eval.json", dump_json(doc), !s.csv());
  return 0;
}

std::string csv_number(const json& v) {
  if (!v.is_number()) return "";
  std::ostringstream o;
  o.precision(17);
  o << v.get<double>();
  return o.str();
}

int cmd_report(const RunConfig& c, Session& s) {
  if (c.inputs.empty()) throw InputError("report needs at least one JSON input");
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::map<std::string, std::string>>> rows;
  auto add = [&](const std::string& source, const std::string& index, const json& v) {
    if (std::find(columns.begin(), columns.end(), index) == columns.end()) {
      columns.push_back(index);
    }
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const auto& r) { return r.first == source; });
    if (it == rows.end()) {
      rows.push_back({source, {}});
      it = std::prev(rows.end());
    }
    it->second[index] = csv_number(v);
  };
  for (const auto& path : c.inputs) {
    const std::string text = read_text_file(path);
    s.add_content(text);
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw InputError(path + ": not valid JSON");
    }
    const std::string stem = std::filesystem::path(path).parent_path().filename().string();
    const std::string label = stem.empty() ? std::filesystem::path(path).stem().string() : stem;
    if (doc.contains("reports")) {
      for (const auto& r : doc["reports"]) {
        add(r.at("model").get<std::string>(), r.at("index").get<std::string>(), r.at("mean"));
      }
    } else if (doc.contains("indices")) {
      for (const auto& r : doc["indices"]) {
        add(label, r.at("index").get<std::string>(), r.at("value"));
      }
    } else if (doc.contains("test")) {
      for (const auto& r : doc["test"]["indices"]) {
        add(label, r.at("index").get<std::string>(), r.at("value"));
      }
    } else {
      throw InputError(path + ": no indices or reports block");
    }
  }
  std::string out = provenance_header(s.provenance(false)) + "source";
  for (const auto& col : columns) out += "," + col;
  out += "\n";
  for (const auto& [source, values] : rows) {
    out += source;
    for (const auto& col : columns) {
      const auto it = values.find(col);
      out += "," + (it == values.end() ? std::string{} : it->second);
    }
    out += "\n";
  }
  s.emit("report.csv", out, true);
  return 0;
}

}  // namespace

std::string RunConfig::canonical() const {
  std::ostringstream o;
  o.precision(17);
  o << "command=" << command;
  if (rho) o << "|rho=" << *rho;
  if (band) o << "|band=" << band->q0 << ":" << band->q1;
  o << "|indices=" << join_indices(indices) << "|partial_scale="
    << (partial_scale == PartialScale::BandMass ? "band_mass" : "mean_risk")
    << "|isotonic=" << isotonic << "|standardize=" << standardize
    << "|bootstrap=" << bootstrap << "|permutation=" << permutation << "|seed=" << seed
    << "|level=" << level << "|pseudocount=" << pseudocount
    << "|max_bad_rows=" << max_bad_rows << "|preset=" << preset << "|order=" << order;
  if (replicates) o << "|replicates=" << *replicates;
  if (n_case) o << "|n_case=" << *n_case;
  if (n_control) o << "|n_control=" << *n_control;
  return o.str();
}

Band parse_band(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("--band must look like q0:q1");
  Band b;
  try {
    std::size_t used = 0;
    b.q0 = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("");
    const std::string rest = text.substr(colon + 1);
    b.q1 = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
  } catch (const std::logic_error&) {
    throw InputError("--band must look like q0:q1, got '" + text + "'");
  }
  if (!(b.q0 >= 0.0 && b.q0 < b.q1 && b.q1 <= 1.0)) {
    throw InputError("--band needs 0 <= q0 < q1 <= 1");
  }
  return b;
}

std::vector<IndexKind> parse_index_list(const std::string& text) {
  std::vector<IndexKind> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto k = parse_index_kind(tok);
    if (!k) throw InputError("unknown index '" + tok + "'");
    if (std::find(out.begin(), out.end(), *k) == out.end()) out.push_back(*k);
  }
  if (out.empty()) throw InputError("--indices is empty");
  return out;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.format != "csv" && config.format != "json") {
      throw InputError("--format must be csv or json");
    }
    if (!(config.level > 0.0 && config.level < 1.0)) {
      throw InputError("--level must lie in (0, 1)");
    }
    Session s(config, out, err);
    if (config.command == "curve") return cmd_curve(config, s);
    if (config.command == "summarize") return cmd_summarize(config, s);
    if (config.command == "validate") return cmd_validate(config, s);
    if (config.command == "links") return cmd_links(config, s);
    if (config.command == "simulate") return cmd_simulate(config, s);
    if (config.command == "report") return cmd_report(config, s);
    throw InputError("unknown command '" + config.command + "'");
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  }
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predictiveness curves and predictiveness U for multi-locus genotypes",
               "predictu"};
  app.require_subcommand(1);
  RunConfig c;
  std::string band;
  std::string indices;
  std::string scale = "band_mass";

  auto common = [&](CLI::App* sub, bool needs_rho) {
    auto* rho = sub->add_option("--rho", c.rho, "Disease prevalence from an external source");
    if (needs_rho) rho->required();
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--format", c.format, "Printed format: csv or json");
    sub->add_option("--max-bad-rows", c.max_bad_rows,
                    "Largest tolerated share of malformed rows");
    sub->add_option("--pseudocount", c.pseudocount, "Add-k smoothing of genotype counts");
  };
  auto analysis = [&](CLI::App* sub) {
    sub->add_option("--band", band, "Quantile band q0:q1 for partial U");
    sub->add_option("--indices", indices, "Comma-separated: u,ustd,upt,uptstd,r,tg,ae");
    sub->add_option("--partial-scale", scale, "band_mass or mean_risk");
    sub->add_flag("--isotonic", c.isotonic, "Also summarize the isotonic refit");
    sub->add_flag("--standardize", c.standardize, "Divide R by rho (1 - rho)");
    sub->add_option("--bootstrap", c.bootstrap, "Bootstrap replicates");
    sub->add_option("--seed", c.seed, "Master seed");
    sub->add_option("--level", c.level, "Confidence level");
  };

  auto* curve = app.add_subcommand("curve", "Estimate the predictiveness curve");
  curve->add_option("input", c.input, "Subject or counts file")->required();
  common(curve, true);
  curve->add_flag("--isotonic", c.isotonic, "Also write the isotonic refit");

  auto* summarize = app.add_subcommand("summarize", "Summary indices with inference");
  summarize->add_option("input", c.input, "Subject or counts file")->required();
  common(summarize, true);
  analysis(summarize);
  summarize->add_option("--permutation", c.permutation, "Permutation replicates");

  auto* validate = app.add_subcommand("validate", "Apply a training order to test data");
  validate->add_option("--train", c.train, "Training file")->required();
  validate->add_option("--test", c.test, "Test file")->required();
  common(validate, true);
  analysis(validate);
  validate->add_option("--permutation", c.permutation, "Permutation replicates");

  auto* links = app.add_subcommand("links", "ROC and Lorenz curves of the risk table");
  links->add_option("input", c.input, "Subject or counts file")->required();
  common(links, true);

  auto* simulate = app.add_subcommand("simulate", "Bias and coverage over simulated studies");
  simulate->add_option("--preset", c.preset, "Preset name or group");
  simulate->add_option("--model", c.model, "Model spec file (YAML)");
  simulate->add_option("--out", c.out, "Output directory");
  simulate->add_option("--format", c.format, "Printed format: csv or json");
  analysis(simulate);
  simulate->add_option("--replicates", c.replicates, "Case-control replicates per model");
  simulate->add_option("--n-case", c.n_case, "Cases per replicate");
  simulate->add_option("--n-control", c.n_control, "Controls per replicate");
  simulate->add_option("--order", c.order, "population or training");

  auto* report = app.add_subcommand("report", "Merge JSON results into one CSV table");
  report->add_option("inputs", c.inputs, "JSON files from summarize, validate or simulate");
  report->add_option("--out", c.out, "Output directory");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }
  c.command = app.get_subcommands().front()->get_name();
  try {
    if (!band.empty()) c.band = parse_band(band);
    if (!indices.empty()) c.indices = parse_index_list(indices);
    if (scale == "band_mass") {
      c.partial_scale = PartialScale::BandMass;
    } else if (scale == "mean_risk") {
      c.partial_scale = PartialScale::MeanRisk;
    } else {
      throw InputError("--partial-scale must be band_mass or mean_risk");
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return run_command(c, out, err);
}

}  // namespace predictu
