#include <gtest/gtest.h>

#include "cfo/dataset.hpp"
#include "json.hpp"
#include "pipeline.hpp"

namespace cfo {
namespace {

using testing::cli;
using testing::ScopedDir;
using testing::slurp;

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"synth"}).code, 2);  // --out is required
  EXPECT_EQ(cli({"synth", "--out", "x.csv", "--bogus"}).code, 2);
  const auto r = cli({"evaluate", "--in", CFO_DATA_DIR "/wbc.csv", "--label", "class", "--classifier", "svm"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("classifier"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, HelpAndVersion) {
  const auto help = cli({"--help"});
  EXPECT_EQ(help.code, 0);
  for (const char* sub : {"synth", "stats", "oversample", "baseline", "evaluate", "census", "report"})
    EXPECT_NE(help.out.find(sub), std::string::npos) << sub;
  EXPECT_EQ(cli({"--version"}).out, "cfo 0.1.0\n");
}

TEST(Cli, DataErrorsExitOne) {
  ScopedDir dir("cfo_cli_errors");
  {
    std::ofstream f("bad.csv");
    f << "a,label\n1,x\nfoo,y\n";
  }
  EXPECT_EQ(cli({"stats", "--in", "bad.csv"}).code, 1);
  EXPECT_EQ(cli({"stats", "--in", "missing.csv"}).code, 2);  // existence is checked while parsing
  {
    std::ofstream f("ok.csv");
    f << "a,label\n1,x\n2,x\n3,y\n4,y\n5,y\n";
  }
  EXPECT_EQ(cli({"stats", "--in", "ok.csv", "--label", "nope"}).code, 1);
}

TEST(Cli, ConflictingPairSelection) {
  ScopedDir dir("cfo_cli_pairs");
  ASSERT_EQ(cli({"synth", "--out", "s.csv"}).code, 0);
  EXPECT_EQ(cli({"oversample", "--in", "s.csv", "--out", "a.csv", "--pair", "minority", "majority", "--all-pairs"}).code,
            2);
  EXPECT_EQ(cli({"oversample", "--in", "s.csv", "--out", "a.csv", "--pair", "minority", "nosuch"}).code, 2);
  EXPECT_EQ(cli({"oversample", "--in", "s.csv", "--out", "a.csv", "--epsilon", "-1"}).code, 2);
  EXPECT_EQ(cli({"synth", "--out", "t.csv", "--n-noise", "500"}).code, 2);
}

TEST(Cli, SynthThenOversample) {
  ScopedDir dir("cfo_cli_e2e");
  ASSERT_EQ(cli({"synth", "--seed", "42", "--out", "s.csv"}).code, 0);
  const std::string before = slurp("s.csv");
  const auto r = cli({"oversample", "--in", "s.csv", "--out", "aug.csv", "--trials", "400"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp("s.csv"), before);

  const auto aug = load_csv("aug.csv", "label");
  const std::size_t minority = aug.data.class_size(aug.data.find_class("minority").value());
  EXPECT_GT(minority, 83u);
  EXPECT_LE(minority, 917u);
  EXPECT_EQ(aug.data.class_size(aug.data.find_class("majority").value()), 917u);
  ASSERT_EQ(aug.data.provenance().size(), aug.data.size());
  EXPECT_EQ(aug.data.provenance().front(), "factual");
  EXPECT_EQ(aug.data.provenance().back().rfind("counterfactual:", 0), 0u);

  const auto report = nlohmann::json::parse(slurp("aug.csv.report.json"));
  EXPECT_EQ(report["tool"], "cfo 0.1.0");
  EXPECT_EQ(report["config"]["params"]["trials"], 400);
  EXPECT_EQ(report["config"]["params"]["seed"], 42);
  EXPECT_EQ(report["pairs"][0]["needed"], 834);
  EXPECT_FALSE(report["pairs"][0].contains("elapsed_seconds"));
  EXPECT_EQ(report["rows_appended"], report["pairs"][0]["succeeded"]);
  EXPECT_EQ(report["rows_appended"].get<std::size_t>(), minority - 83);
}

TEST(Cli, StatsEvaluateAndFoldCsv) {
  ScopedDir dir("cfo_cli_eval");
  ASSERT_EQ(cli({"synth", "--out", "s.csv", "--n-total", "300", "--n-minority", "40"}).code, 0);
  const auto stats = cli({"stats", "--in", "s.csv"});
  ASSERT_EQ(stats.code, 0);
  const auto sj = nlohmann::json::parse(stats.out);
  EXPECT_EQ(sj["ingestion"]["rows_kept"], 300);
  EXPECT_EQ(sj["class_pairs"].size(), 1u);
  EXPECT_EQ(sj["feature_stats"].size(), 2u);

  for (const char* method : {"none", "counterfactual", "smote", "adasyn", "random"}) {
    const auto r = cli({"evaluate", "--in", "s.csv", "--method", method, "--folds", "5", "--out", "e.json",
                        "--folds-csv", "folds.csv"});
    ASSERT_EQ(r.code, 0) << method << r.err;
    const auto j = nlohmann::json::parse(slurp("e.json"));
    EXPECT_EQ(j["method"], method);
    EXPECT_EQ(j["metrics"]["leakage"]["violations"], 0);
    EXPECT_EQ(j["metrics"]["per_fold"].size(), 5u);
    const auto csv = slurp("folds.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  }
  EXPECT_EQ(cli({"evaluate", "--in", "s.csv", "--method", "tomek"}).code, 2);
}

TEST(Cli, BaselineAndCensusWithoutModel) {
  ScopedDir dir("cfo_cli_base");
  ASSERT_EQ(cli({"synth", "--out", "s.csv"}).code, 0);
  ASSERT_EQ(cli({"baseline", "--method", "random", "--in", "s.csv", "--out", "r.csv"}).code, 0);
  const auto aug = load_csv("r.csv", "label");
  EXPECT_EQ(aug.data.class_size(1), aug.data.class_size(2));
  const auto c = cli({"census", "--factual", "s.csv", "--augmented", "r.csv"});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto j = nlohmann::json::parse(c.out);
  EXPECT_EQ(j["census"]["generated"]["total"], 834);
  EXPECT_EQ(j["method"], "r");
}

TEST(Cli, ExperimentOneTableMatchesGolden) {
  const auto outputs = testing::run_experiment_one("cfo_cli_exp1", 1);
  const auto& table = outputs.at("table.md");
  EXPECT_EQ(table, slurp(CFO_TEST_DIR "/golden/experiment1_table.md"));
  // Header + separator + three method rows, three region columns plus tau.
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
  EXPECT_NE(table.find("| Ours |"), std::string::npos);
  EXPECT_NE(table.find("| SMOTE |"), std::string::npos);
  EXPECT_NE(table.find("| ADASYN |"), std::string::npos);
  EXPECT_NE(table.find("Boundary minority"), std::string::npos);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const auto a = testing::run_experiment_one("cfo_cli_rep_a", 1);
  const auto b = testing::run_experiment_one("cfo_cli_rep_b", 4);
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace cfo
