#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "ictal/manifest.hpp"
#include "ictal/parameters.hpp"
#include "oracles.hpp"
#include "json.hpp"

namespace ictal {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result ictal_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ictal");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root = new testing::TempDir;
    const auto r = ictal_cli({"synth", "--out", data().string(), "--train-per-class", "3",
                              "--test-per-class", "3", "--minutes", "0.25", "--seed", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ofstream(config()) << R"({"epochs": 2, "batch_size": 4})";
  }
  static void TearDownTestSuite() { delete root; }

  static fs::path data() { return root->path() / "data"; }
  static fs::path manifest() { return data() / "manifest.json"; }
  static fs::path config() { return root->path() / "config.json"; }

  static Result train(const fs::path& out, const std::string& seed_flag = "--seed",
                      const std::string& seed = "1") {
    return ictal_cli({"train", "--config", config().string(), "--manifest", manifest().string(),
                      "--subject", "synth01", "--topology", "nv1x16", seed_flag, seed, "--out",
                      out.string()});
  }

  static testing::TempDir* root;
};
testing::TempDir* CliTest::root = nullptr;

TEST_F(CliTest, SynthWritesManifestAndClips) {
  const auto m = load_manifest(manifest());
  EXPECT_EQ(m.clips.size(), 12u);
  for (const auto& c : m.clips) EXPECT_TRUE(fs::exists(m.resolve(c.path)));
}

TEST_F(CliTest, TrainWritesSelfDescribingRunDirectory) {
  testing::TempDir out;
  const auto r = train(out.path());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto dir = out / "synth01_nv1x16_seed1";
  const auto run = cli::RunManifest::load(dir);
  EXPECT_EQ(run.seed, 1u);
  EXPECT_EQ(run.topology, "nv1x16");
  EXPECT_EQ(run.subject, "synth01");
  EXPECT_EQ(run.config.epochs, 2u);
  EXPECT_FALSE(run.rng_algorithm.empty());
  EXPECT_FALSE(run.toolkit_version.empty());
  EXPECT_EQ(run.train_segments, 6u);
  for (const std::string role : {"parameters", "history"}) {
    const auto file = run.artifact(role);
    ASSERT_TRUE(file.has_value()) << role;
    EXPECT_TRUE(fs::exists(dir / *file)) << role;
  }
  EXPECT_EQ(RunHistory::load(dir / *run.artifact("history")).size(), 2u);
}

TEST_F(CliTest, SeedRangeMakesIndependentRuns) {
  testing::TempDir out;
  const auto r = train(out.path(), "--seeds", "1..3");
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> params;
  for (int s = 1; s <= 3; ++s) {
    const auto dir = out / ("synth01_nv1x16_seed" + std::to_string(s));
    ASSERT_TRUE(fs::exists(dir / "parameters.bin"));
    params.push_back(testing::read_file(dir / "parameters.bin"));
  }
  EXPECT_NE(params[0], params[1]);
  EXPECT_NE(params[1], params[2]);

  // a range run reproduces the single-seed run bit for bit
  testing::TempDir single;
  ASSERT_EQ(train(single.path(), "--seed", "2").code, 0);
  EXPECT_EQ(testing::read_file(single / "synth01_nv1x16_seed2/parameters.bin"), params[1]);
}

TEST_F(CliTest, TrainErrors) {
  testing::TempDir out;
  auto r = ictal_cli({"train", "--config", config().string(), "--manifest", manifest().string(),
                      "--subject", "nobody", "--out", out.path().string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("unknown subject"), std::string::npos);

  std::ofstream(out / "zero.json") << R"({"epochs": 0})";
  r = ictal_cli({"train", "--config", (out / "zero.json").string(), "--manifest",
                 manifest().string(), "--subject", "synth01", "--out", out.path().string()});
  EXPECT_EQ(r.code, 2);

  std::ofstream(out / "typo.json") << R"({"epoch": 3})";
  r = ictal_cli({"train", "--config", (out / "typo.json").string(), "--manifest",
                 manifest().string(), "--subject", "synth01", "--out", out.path().string()});
  EXPECT_EQ(r.code, 2);

  r = ictal_cli({"train", "--manifest", manifest().string(), "--subject", "synth01", "--topology",
                 "nv9", "--out", out.path().string()});
  EXPECT_NE(r.code, 0);

  r = ictal_cli({"train", "--bogus"});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, RefusesToWriteIntoDataDirectory) {
  const auto r = train(data() / "runs");
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(data() / "runs"));
}

TEST_F(CliTest, EvaluateIsDeterministicAndPrintsAuc) {
  testing::TempDir out;
  ASSERT_EQ(train(out.path()).code, 0);
  const auto dir = out / "synth01_nv1x16_seed1";
  const auto a = ictal_cli({"evaluate", "--run", dir.string(), "--out", (out / "a").string()});
  const auto b = ictal_cli({"evaluate", "--run", dir.string(), "--out", (out / "b").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(testing::read_file(out / "a/report.json"), testing::read_file(out / "b/report.json"));
  EXPECT_EQ(testing::read_file(out / "a/roc.csv"), testing::read_file(out / "b/roc.csv"));
  EXPECT_EQ(a.out, b.out);
  const auto pos = a.out.find(" auc ");
  ASSERT_NE(pos, std::string::npos);
  const double auc = std::stod(a.out.substr(pos + 5));
  EXPECT_GE(auc, 0.0);
  EXPECT_LE(auc, 1.0);

  // without --out the report lands in the run directory and is registered
  ASSERT_EQ(ictal_cli({"evaluate", "--run", dir.string()}).code, 0);
  const auto run = cli::RunManifest::load(dir);
  ASSERT_TRUE(run.artifact("report").has_value());
  EXPECT_EQ(testing::read_file(dir / *run.artifact("report")),
            testing::read_file(out / "a/report.json"));
}

TEST_F(CliTest, EvaluateErrors) {
  testing::TempDir out;
  ASSERT_EQ(train(out.path()).code, 0);
  const auto dir = out / "synth01_nv1x16_seed1";

  // same data, but the subject's layout file says something else
  testing::TempDir other;
  auto m = load_manifest(manifest());
  ElectrodeLayout::identity(false).save(other / "other_layout.json");
  m.layouts["synth01"] = other / "other_layout.json";
  for (auto& c : m.clips) c.path = m.resolve(c.path);
  m.base_dir = other.path();
  save_manifest(m, other / "other_manifest.json");
  auto r = ictal_cli({"evaluate", "--run", dir.string(), "--manifest",
                      (other / "other_manifest.json").string(), "--out", (out / "x").string()});
  EXPECT_NE(r.err.find("layout"), std::string::npos) << r.err;
  EXPECT_EQ(r.code, 3);

  std::ofstream(dir / "parameters.bin", std::ios::trunc) << "garbage";
  r = ictal_cli({"evaluate", "--run", dir.string(), "--out", (out / "y").string()});
  EXPECT_EQ(r.code, 3);

  r = ictal_cli({"evaluate", "--run", (out / "missing").string()});
  EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, PredictPrintsProbability) {
  testing::TempDir out;
  ASSERT_EQ(train(out.path()).code, 0);
  const auto m = load_manifest(manifest());
  const auto r = ictal_cli({"predict", "--run", (out / "synth01_nv1x16_seed1").string(), "--clip",
                            m.resolve(m.clips.back().path).string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const double p = std::stod(r.out);
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
}

TEST_F(CliTest, PreprocessedManifestTrainsIdentically) {
  testing::TempDir out;
  auto r = ictal_cli({"preprocess", "--manifest", manifest().string(), "--out",
                      (out / "prep").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pm = load_manifest(out / "prep/manifest.json");
  EXPECT_TRUE(pm.preprocessed);
  EXPECT_EQ(pm.clips.size(), 12u);

  r = ictal_cli({"train", "--config", config().string(), "--manifest",
                 (out / "prep/manifest.json").string(), "--subject", "synth01", "--seed", "1",
                 "--out", (out / "runs").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(train(out / "raw").code, 0);
  EXPECT_EQ(testing::read_file(out / "runs/synth01_nv1x16_seed1/parameters.bin"),
            testing::read_file(out / "raw/synth01_nv1x16_seed1/parameters.bin"));
}

TEST_F(CliTest, SplitCommand) {
  testing::TempDir out;
  const auto r = ictal_cli({"split", "--manifest", manifest().string(), "--fraction", "0.34",
                            "--seed", "4", "--out", out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("validation: 1 interictal, 1 preictal"), std::string::npos) << r.out;
  const auto train_m = load_manifest(out / "train_manifest.json");
  const auto val_m = load_manifest(out / "validation_manifest.json");
  EXPECT_EQ(train_m.clips.size(), 10u);
  EXPECT_EQ(val_m.clips.size(), 2u);
  for (const auto& c : val_m.clips) EXPECT_TRUE(fs::exists(val_m.resolve(c.path)));
}

TEST_F(CliTest, ReportBuildsGridAndListsSkipped) {
  testing::TempDir out;
  ASSERT_EQ(train(out / "runs", "--seeds", "1..3").code, 0);
  for (int s = 1; s <= 2; ++s) {
    const auto dir = out / ("runs/synth01_nv1x16_seed" + std::to_string(s));
    ASSERT_EQ(ictal_cli({"evaluate", "--run", dir.string()}).code, 0);
  }
  const auto r = ictal_cli({"report", "--runs", (out / "runs").string(), "--out",
                            (out / "agg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("seed3"), std::string::npos);
  const auto doc = nlohmann::json::parse(testing::read_file(out / "agg/aggregate.json"));
  ASSERT_EQ(doc["groups"].size(), 1u);
  EXPECT_EQ(doc["groups"][0]["aucs"].size(), 2u);
  EXPECT_EQ(doc["skipped"].size(), 1u);
  const auto table = testing::read_file(out / "agg/table.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')), "subject,nv1x16,nv4x4,nv2x2x4");
  EXPECT_NE(table.find("synth01,"), std::string::npos);
  const auto box = testing::read_file(out / "agg/box_stats.csv");
  EXPECT_NE(box.find("synth01,nv1x16,2,"), std::string::npos);

  testing::TempDir empty;
  EXPECT_EQ(ictal_cli({"report", "--runs", empty.path().string(), "--out",
                       (out / "agg2").string()})
                .code,
            3);
}

TEST(CliHelpers, SeedRanges) {
  EXPECT_EQ(cli::parse_seed_range("1..10").size(), 10u);
  EXPECT_EQ(cli::parse_seed_range("7"), std::vector<std::uint64_t>{7});
  EXPECT_EQ(cli::parse_seed_range("3..3"), std::vector<std::uint64_t>{3});
  EXPECT_THROW(cli::parse_seed_range("5..1"), Error);
  EXPECT_THROW(cli::parse_seed_range("a..b"), Error);
  EXPECT_THROW(cli::parse_seed_range(""), Error);
}

}  // namespace
}  // namespace ictal
