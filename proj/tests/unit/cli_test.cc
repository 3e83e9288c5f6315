/* Copyright 2026 The Hemi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace hemi::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::vector<std::string> kTiny = {"--length", "400", "--participants", "2",
                                        "--intensities", "2"};

std::vector<std::string> with(std::vector<std::string> args,
                              const std::vector<std::string>& extra) {
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hemi_cli_" + std::string(
                              ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(CliTest, SynthIsDeterministic) {
  for (const char* name : {"a", "b"}) {
    const Outcome r = run(with({"synth", "--seed", "3", "--out", (dir_ / name).string()}, kTiny));
    ASSERT_EQ(r.code, 0) << r.err;
  }
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / e.path().filename())) << e.path();
  }
  EXPECT_EQ(files, 8u);
}

TEST_F(CliTest, TrainSmoke) {
  const Outcome r = run(with({"train", "--max-epochs", "2", "--shap-permutations", "0",
                          "--small-hidden", "8"},
                         kTiny));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("rhythm,dataset", 0), 0u);
  EXPECT_NE(r.out.find("\nbeta,necker,small,adam,"), std::string::npos) << r.out;
  EXPECT_NE(r.err.find("epoch 1"), std::string::npos);
}

TEST_F(CliTest, GridTwoOptimizers) {
  const auto report = dir_ / "grid.json";
  const Outcome r = run(with({"grid", "--bands", "beta", "--datasets", "necker", "--models", "cnn",
                          "--optimizers", "adam,ftrl", "--max-epochs", "1", "--cnn-hidden", "4",
                          "--shap-permutations", "0", "--report", report.string()},
                         kTiny));
  ASSERT_EQ(r.code, 0) << r.err;
  const Outcome merged = run({"report", report.string()});
  ASSERT_EQ(merged.code, 0) << merged.err;
  EXPECT_EQ(std::count(merged.out.begin(), merged.out.end(), '\n'), 3);
  EXPECT_NE(merged.out.find("beta,necker,cnn,adam"), std::string::npos);
  EXPECT_NE(merged.out.find("beta,necker,cnn,ftrl"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"train", "--no-such-flag"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run(with({"train", "--band", "kappa"}, kTiny)).code, 1);
  EXPECT_EQ(run({"report", (dir_ / "missing.csv").string()}).code, 2);
}

TEST_F(CliTest, CommandLineOverridesConfigFile) {
  const auto cfg = dir_ / "run.ini";
  std::ofstream(cfg) << "band=alpha\nmax-epochs=1\nshap-permutations=0\nsmall-hidden=8\n";
  const Outcome r = run(with({"train", "--config", cfg.string(), "--band", "gamma"}, kTiny));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\ngamma,necker,small,adam,"), std::string::npos) << r.out;
  EXPECT_EQ(r.err.find("epoch 2"), std::string::npos);
}

}  // namespace
}  // namespace hemi::cli
