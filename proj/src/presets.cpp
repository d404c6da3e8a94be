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

#include <algorithm>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "predictu/error.hpp"
#include "predictu/simulate.hpp"

namespace predictu {
namespace {

InheritanceMode parse_mode(const std::string& s) {
  if (s == "additive") return InheritanceMode::Additive;
  if (s == "dominant") return InheritanceMode::Dominant;
  if (s == "recessive") return InheritanceMode::Recessive;
  throw InputError("unknown inheritance mode '" + s + "'");
}

template <typename T>
T get(const YAML::Node& node, const char* key, T fallback) {
  const YAML::Node v = node[key];
  return v ? v.as<T>() : fallback;
}

template <typename T>
T require(const YAML::Node& node, const char* key, const std::string& where) {
  const YAML::Node v = node[key];
  if (!v) throw InputError(where + ": missing key '" + key + "'");
  return v.as<T>();
}

Snp parse_snp(const YAML::Node& node) {
  Snp s;
  s.maf = get<double>(node, "maf", 0.0);
  s.mode = parse_mode(get<std::string>(node, "mode", "additive"));
  s.relative_risk = get<double>(node, "rr", 1.0);
  if (const YAML::Node f = node["genotype_frequencies"]) {
    const auto v = f.as<std::vector<double>>();
    if (v.size() != 3) throw InputError("genotype_frequencies needs three values");
    s.genotype_frequencies = std::array<double, 3>{v[0], v[1], v[2]};
  }
  return s;
}

void parse_design(const YAML::Node& node, EvalOptions& d) {
  if (!node) return;
  d.n_case = get<std::int64_t>(node, "n_case", d.n_case);
  d.n_control = get<std::int64_t>(node, "n_control", d.n_control);
  d.n_replicates = get<std::size_t>(node, "replicates", d.n_replicates);
  d.n_bootstrap = get<std::size_t>(node, "bootstrap", d.n_bootstrap);
  d.level = get<double>(node, "level", d.level);
  d.isotonic = get<bool>(node, "isotonic", d.isotonic);
  d.seed = get<std::uint64_t>(node, "seed", d.seed);
  if (const YAML::Node idx = node["indices"]) {
    d.indices.clear();
    for (const auto& t : idx.as<std::vector<std::string>>()) {
      const auto k = parse_index_kind(t);
      if (!k) throw InputError("unknown index '" + t + "'");
      d.indices.push_back(*k);
    }
  }
  if (const YAML::Node b = node["band"]) {
    const auto v = b.as<std::vector<double>>();
    if (v.size() != 2) throw InputError("band needs two values");
    d.band = Band{v[0], v[1]};
  }
  if (const YAML::Node o = node["order"]) {
    const auto s = o.as<std::string>();
    if (s == "population") {
      d.order_source = OrderSource::Population;
    } else if (s == "training") {
      d.order_source = OrderSource::TrainingSample;
    } else {
      throw InputError("order must be population or training");
    }
  }
}

}  // namespace

std::filesystem::path default_preset_dir() {
  if (const char* env = std::getenv("PREDICTU_PRESET_DIR"); env && *env) return env;
  return PREDICTU_PRESET_DIR;
}

PopulationSpec parse_population_spec(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw InputError(std::string("model spec: ") + e.what());
  }
  try {
    PopulationSpec spec;
    spec.name = require<std::string>(root, "name", "model spec");
    spec.group = get<std::string>(root, "group", "");
    spec.version = get<int>(root, "version", 1);
    if (const YAML::Node pop = root["population"]) {
      spec.size = get<std::int64_t>(pop, "size", spec.size);
      spec.hwe = get<bool>(pop, "hwe", spec.hwe);
      spec.seed = get<std::uint64_t>(pop, "seed", spec.seed);
      const auto real = get<std::string>(pop, "realization", "expected");
      if (real == "expected") {
        spec.realization = Realization::ExpectedCounts;
      } else if (real == "multinomial") {
        spec.realization = Realization::Multinomial;
      } else {
        throw InputError("realization must be expected or multinomial");
      }
    }
    if (spec.size < 1) throw InputError("population size must be at least 1");

    const YAML::Node m = root["model"];
    if (!m) throw InputError("model spec: missing key 'model'");
    const YAML::Node snp_nodes = m["snps"];
    if (!snp_nodes || !snp_nodes.IsSequence()) {
      throw InputError("model spec: 'snps' must be a list");
    }
    std::vector<Snp> snps;
    for (const auto& n : snp_nodes) snps.push_back(parse_snp(n));
    std::vector<Interaction> inter;
    if (const YAML::Node in = m["interactions"]) {
      for (const auto& n : in) {
        const auto pair = require<std::vector<std::size_t>>(n, "snps", "interaction");
        if (pair.size() != 2) throw InputError("interaction needs two SNP indices");
        inter.push_back({pair[0], pair[1], get<double>(n, "factor", 1.0)});
      }
    }
    const double rho = get<double>(m, "target_rho", 0.0);
    std::optional<double> h2;
    if (const YAML::Node h = m["target_h2"]) h2 = h.as<double>();
    if (const YAML::Node pen = m["penetrance"]) {
      spec.model = model_from_penetrance(spec.name, std::move(snps),
                                         pen.as<std::vector<double>>(), rho, spec.hwe);
      if (h2) spec.model = calibrate_heritability(spec.model, *h2);
    } else {
      spec.model = make_disease_model(spec.name, std::move(snps), std::move(inter), rho,
                                      h2, spec.hwe);
    }
    parse_design(root["design"], spec.design);
    return spec;
  } catch (const YAML::Exception& e) {
    throw InputError(std::string("model spec: ") + e.what());
  }
}

PopulationSpec load_population_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model spec " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_population_spec(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.filename().string() + ": " + e.what());
  }
}

std::vector<PopulationSpec> simulation_presets(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".yaml") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw InputError("cannot read preset directory " + dir.string());
  std::vector<PopulationSpec> out;
  for (const auto& f : files) out.push_back(load_population_spec(f));
  std::sort(out.begin(), out.end(),
            [](const PopulationSpec& a, const PopulationSpec& b) { return a.name < b.name; });
  return out;
}

std::vector<PopulationSpec> find_presets(const std::string& name,
                                         const std::filesystem::path& dir) {
  std::vector<PopulationSpec> out;
  for (auto& p : simulation_presets(dir)) {
    if (p.name == name || p.group == name) out.push_back(std::move(p));
  }
  if (out.empty()) throw InputError("unknown preset '" + name + "'");
  return out;
}

}  // namespace predictu
