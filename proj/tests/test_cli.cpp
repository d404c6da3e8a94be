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

#include <chrono>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "predictu/cli.hpp"
#include "predictu/io.hpp"
#include "predictu/risk_model.hpp"
#include "predictu/simulate.hpp"
#include "predictu/summary_indices.hpp"

namespace predictu {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = PREDICTU_FIXTURE_DIR;
const std::string kThree = (kFixtures / "three_genotype.csv").string();

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "predictu_cli_test" / name;
  fs::remove_all(p);
  return p;
}

TEST(Cli, MissingRhoNamesTheFlag) {
  const CliRun r = run({"summarize", kThree});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--rho"), std::string::npos) << r.err;
}

TEST(Cli, BinaryExitCodes) {
  const std::string cli = PREDICTU_CLI_PATH;
  const std::string quiet = " > /dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " summarize " + kThree + quiet).c_str())), 2);
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " summarize " + kThree + " --rho 0.21" + quiet).c_str())),
            0);
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " --help" + quiet).c_str())), 0);
  EXPECT_EQ(WEXITSTATUS(std::system((cli + " frobnicate" + quiet).c_str())), 2);
}

TEST(Cli, ValidationErrorsExitTwo) {
  EXPECT_EQ(run({"summarize", kThree, "--rho", "1.5"}).code, 2);
  EXPECT_EQ(run({"summarize", kThree, "--rho", "0.21", "--band", "0.7:0.2"}).code, 2);
  EXPECT_EQ(run({"summarize", kThree, "--rho", "0.21", "--indices", "u,auc"}).code, 2);
  EXPECT_EQ(run({"summarize", kThree, "--rho", "0.21", "--indices", "upt"}).code, 2);
  EXPECT_EQ(run({"summarize", (kFixtures / "nope.csv").string(), "--rho", "0.2"}).code, 2);
}

TEST(Cli, GoldenSummarizeIsByteIdentical) {
  const fs::path out = scratch("golden");
  const CliRun r = run({"summarize", kThree, "--rho", "0.21", "--bootstrap", "200", "--permutation",
                     "200", "--seed", "1", "--band", "0.5:1", "--isotonic", "--out",
                     out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"indices.json", "ci.json"}) {
    EXPECT_EQ(read_text_file(out / name), read_text_file(kFixtures / "golden" / name)) << name;
  }
  const auto doc = nlohmann::json::parse(read_text_file(out / "indices.json"));
  EXPECT_NEAR(doc["indices"][0]["value"].get<double>(), 0.146, 1e-12);
  EXPECT_NEAR(doc["indices"][1]["value"].get<double>(), 0.4400, 5e-5);
  EXPECT_NEAR(doc["indices"][2]["value"].get<double>(), 0.022900, 1e-12);
  EXPECT_NEAR(doc["indices"][3]["value"].get<double>(), 0.116, 1e-12);
  const std::string curve = read_text_file(out / "curve.csv");
  EXPECT_EQ(curve.rfind("# tool: predictu", 0), 0u);
}

TEST(Cli, DeterministicUnderSeed) {
  const std::vector<std::string> args = {"summarize", kThree, "--rho", "0.21", "--bootstrap",
                                         "100", "--seed", "5", "--format", "json"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Cli, ValidateOnTrainingDataReproducesSummary) {
  const CliRun r = run({"validate", "--train", kThree, "--test", kThree, "--rho", "0.21"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["train"]["indices"], doc["test"]["indices"]);
}

TEST(Cli, ValidateDisjointGenotypesExitTwo) {
  const fs::path dir = scratch("disjoint");
  write_text_file(dir / "other.csv", "genotype_id,n_case,n_control\n7,5,10\n8,6,3\n");
  const CliRun r = run({"validate", "--train", kThree, "--test", (dir / "other.csv").string(),
                     "--rho", "0.21"});
  EXPECT_EQ(r.code, 2);
}

TEST(Validate, TestUBelowTrainingUOnAverage) {
  std::vector<Snp> snps = {{0.3, InheritanceMode::Additive, 1.4, {}},
                           {0.2, InheritanceMode::Dominant, 1.3, {}},
                           {0.1, InheritanceMode::Additive, 1.5, {}}};
  PopulationSpec spec;
  spec.model = make_disease_model("v", snps, {}, 0.1, 0.03);
  spec.size = 100000;
  const Population pop = build_population(spec);
  double train_sum = 0.0;
  double test_sum = 0.0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const auto train = sample_case_control(pop, 300, 300, 2 * k);
    const auto test = sample_case_control(pop, 300, 300, 2 * k + 1);
    const RiskTable t = estimate_risk_table(train);
    train_sum += predictiveness_u(t).value;
    test_sum += predictiveness_u(apply_model_to_test(t.genotype_order(), test).table).value;
  }
  EXPECT_LT(test_sum, train_sum);
}

TEST(Cli, LinksReportsIdentities) {
  const CliRun r = run({"links", kThree, "--rho", "0.21"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_LT(doc["roc_identity"]["residual"].get<double>(), 1e-12);
  EXPECT_LT(doc["lorenz_roc_residual"].get<double>(), 1e-12);
}

TEST(Cli, UnknownPresetExitTwo) {
  const CliRun r = run({"simulate", "--preset", "no_such_preset"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no_such_preset"), std::string::npos) << r.err;
}

TEST(Cli, SmokePresetIsFastAndReplays) {
  const auto start = std::chrono::steady_clock::now();
  const CliRun a = run({"simulate", "--preset", "smoke"});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_LT(secs, 60.0);
  EXPECT_EQ(a.out, run({"simulate", "--preset", "smoke"}).out);
  const auto doc = nlohmann::json::parse(a.out);
  EXPECT_EQ(doc["reports"].size(), 5u);
}

TEST(Cli, ReportMergesAndIsIdempotent) {
  const fs::path dir = scratch("report");
  ASSERT_EQ(run({"summarize", kThree, "--rho", "0.21", "--indices", "tg,u,r", "--out",
                 (dir / "a").string()})
                .code,
            0);
  ASSERT_EQ(run({"simulate", "--preset", "smoke", "--replicates", "3", "--bootstrap", "10",
                 "--indices", "ae,u", "--out", (dir / "b").string()})
                .code,
            0);
  const std::vector<std::string> args = {"report", (dir / "a" / "indices.json").string(),
                                         (dir / "b" / "eval.json").string(), "--out",
                                         (dir / "r").string()};
  ASSERT_EQ(run(args).code, 0);
  const std::string first = read_text_file(dir / "r" / "report.csv");
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(read_text_file(dir / "r" / "report.csv"), first);
  const auto header_at = first.find("source,");
  ASSERT_NE(header_at, std::string::npos);
  const std::string header = first.substr(header_at, first.find('\n', header_at) - header_at);
  EXPECT_EQ(header, "source,TG,U,R,AE");
}

TEST(Cli, ReportWithoutInputsExitTwo) { EXPECT_EQ(run({"report"}).code, 2); }

}  // namespace
}  // namespace predictu
