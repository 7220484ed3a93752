#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include <json.hpp>

#include "test_support.hpp"

namespace brandsim {
namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run_cli(const testing::TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string command = std::string(BRANDSIM_CLI_PATH) + " " + args + " >" + out.string() +
                              " 2>" + err.string();
  const int status = std::system(command.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testing::read_text(out);
  r.err = testing::read_text(err);
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto r = run_cli(dir_, "synth --brands 4 --groups 2 --followers 20 --posts-per-user 3 "
                                 "--tag-vocab 500 --tag-dim 8 --image-dim 6 --seed 3 --out " +
                                     data().string());
    ASSERT_EQ(r.code, 0) << r.err;
  }

  std::filesystem::path data() const { return dir_ / "data"; }

  std::string inputs() const {
    return "--corpus " + (data() / "posts.jsonl").string() + " --tag-vectors " +
           (data() / "tag_vectors.txt").string() + " --image-vectors " +
           (data() / "image_vectors.bin").string() + " --tag-dim 8 --image-dim 6 --k 8 --top-n 100 --l 50";
  }

  testing::TempDir dir_{"cli"};
};

TEST_F(Cli, RunNamesTheMatrixAfterTheMethod) {
  const auto out = dir_ / "run";
  const auto r = run_cli(dir_, "run " + inputs() +
                                   " --mode tag --ranking freq --repr hist --measure hi --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(out / "sim_tag-hist-freq-hi.csv"));
  const auto config = nlohmann::json::parse(testing::read_text(out / "config.json"));
  EXPECT_EQ(config["k"], 8);
  EXPECT_EQ(config["seed"], 0);
}

TEST_F(Cli, SameSeedTwiceIsByteIdentical) {
  for (const char* sub : {"a", "b"}) {
    const auto r = run_cli(dir_, "run " + inputs() + " --mode image --repr avg --measure p --seed 9 --out " +
                                     (dir_ / sub).string());
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto a = testing::read_text(dir_ / "a/sim_image-avg-p.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, testing::read_text(dir_ / "b/sim_image-avg-p.csv"));
}

TEST_F(Cli, RerunFromPersistedConfig) {
  ASSERT_EQ(run_cli(dir_, "run " + inputs() + " --seed 4 --out " + (dir_ / "first").string()).code, 0);
  const auto r = run_cli(dir_, "run --config " + (dir_ / "first/config.json").string() + " --out " +
                                   (dir_ / "second").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(testing::read_text(dir_ / "first/sim_tag-hist-freq-hi.csv"),
            testing::read_text(dir_ / "second/sim_tag-hist-freq-hi.csv"));
  EXPECT_EQ(testing::read_text(dir_ / "first/codebook_tag-hist-freq-hi.bin"),
            testing::read_text(dir_ / "second/codebook_tag-hist-freq-hi.bin"));
}

TEST_F(Cli, MissingVectorFileExitsTwo) {
  const auto missing = (dir_ / "absent_vectors.txt").string();
  const auto r = run_cli(dir_, "run --corpus " + (data() / "posts.jsonl").string() + " --tag-vectors " +
                                   missing + " --tag-dim 8 --out " + (dir_ / "x").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
}

TEST_F(Cli, InvalidCombinationExitsOne) {
  const auto r = run_cli(dir_, "run " + inputs() + " --repr avg --measure hi --out " + (dir_ / "x").string());
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, ValidateReportsCounts) {
  const auto r = run_cli(dir_, "validate " + inputs());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("brands=4"), std::string::npos) << r.out;
}

TEST_F(Cli, StagesChainIntoAMatrix) {
  const auto stages = dir_ / "stages";
  ASSERT_EQ(run_cli(dir_, "rank-tags " + inputs() + " --ranking score --out " + stages.string()).code, 0);
  EXPECT_TRUE(std::filesystem::exists(stages / "tags_score_brand1.csv"));
  ASSERT_EQ(run_cli(dir_, "codebook " + inputs() + " --mode image --out " + stages.string()).code, 0);
  auto r = run_cli(dir_, "represent " + inputs() + " --mode image --codebook " +
                             (stages / "codebook_image").string() + " --out " + stages.string());
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli(dir_, "similarity --measure hi --vectors " + (stages / "vectors_image-hist").string() +
                        " --out " + stages.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(stages / "sim_image-hist-hi.csv"));

  r = run_cli(dir_, "viz --matrix " + (stages / "sim_image-hist-hi.csv").string() + " --threshold 0");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["edges"].size(), 6u);

  r = run_cli(dir_, "evaluate --matrix " + (stages / "sim_image-hist-hi.csv").string() + " --matrix-b " +
                        (stages / "sim_image-hist-hi.csv").string() + " --summary " +
                        (stages / "summary.json").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(testing::read_text(stages / "summary.json"));
  EXPECT_NEAR(summary[0]["rho"].get<double>(), 1.0, 1e-12);
}

TEST_F(Cli, StabilityWritesSeededSummaries) {
  const auto out = dir_ / "stab";
  const auto r = run_cli(dir_, "stability " + inputs() + " --repeats 2 --subsample 5 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto split = nlohmann::json::parse(testing::read_text(out / "stability_tag-hist-freq-hi_split-half.json"));
  EXPECT_EQ(split["per_repeat_rho"].size(), 2u);
  EXPECT_TRUE(std::filesystem::exists(out / "stability_tag-hist-freq-hi_subsample-5.json"));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(run_cli(dir_, "").code, 0);
  EXPECT_NE(run_cli(dir_, "run --mode video").code, 0);
}

}  // namespace
}  // namespace brandsim
