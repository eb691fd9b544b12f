// Copyright 2026 The regionopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdlib>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include "temp_dir.hpp"

#ifndef REGIONOPT_CLI_PATH
#define REGIONOPT_CLI_PATH ""
#endif

using regionopt::testing::TempDir;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(REGIONOPT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json load(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    if (std::string(REGIONOPT_CLI_PATH).empty()) GTEST_SKIP() << "CLI not built";
  }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }
  TempDir dir_;
};

}  // namespace

TEST_F(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run(""), 2); }

TEST_F(Cli, UnknownFlagIsUsageError) {
  EXPECT_EQ(run("cr --no-such-flag"), 2);
  EXPECT_EQ(run("bogus"), 2);
}

TEST_F(Cli, RuntimeFailureWritesErrorBlock) {
  const std::string cmd = std::string(REGIONOPT_CLI_PATH) + " valuate --scenario " +
                          at("missing.json") + " --sequence A 2> " + at("err.txt");
  std::ofstream(at("missing.json")) << "{not json";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
  const auto err = slurp(at("err.txt"));
  const auto brace = err.rfind("{\"error\"");
  ASSERT_NE(brace, std::string::npos);
  EXPECT_EQ(json::parse(err.substr(brace)).at("error").at("kind"), "parse");
}

TEST_F(Cli, CrReportListsEverySequence) {
  ASSERT_EQ(run("scenario gen --zones 4 --subzones-per-zone 2 --seed 3 --out " + at("s.json")), 0);
  ASSERT_EQ(run("cr --scenario " + at("s.json") + " --paths 30 --seed 7 --out " + at("r.json")), 0);
  const auto j = load(at("r.json"));
  EXPECT_EQ(j.at("sequences").size(), 24u);
  EXPECT_EQ(j.at("evaluated_count"), 24);
  EXPECT_EQ(count_lines(at("r.csv")), 25u);
  EXPECT_TRUE(j.contains("config"));
}

TEST_F(Cli, CrRnnEvaluatesSampleAndTopK) {
  ASSERT_EQ(run("scenario gen --zones 7 --subzones-per-zone 2 --seed 3 --out " + at("s.json")), 0);
  ASSERT_EQ(run("cr-rnn --scenario " + at("s.json") +
                " --paths 30 --seed 7 --frac-seq 0.06 --pnr-max 0.01 --k 50 --epochs 20 --out " +
                at("r.json")),
            0);
  const auto j = load(at("r.json"));
  EXPECT_EQ(j.at("evaluated_count"), 302 + 50);
  EXPECT_EQ(count_lines(at("r.csv")), 1u + 352u);
}

TEST_F(Cli, ReportsAreReproducible) {
  ASSERT_EQ(run("scenario gen --zones 7 --subzones-per-zone 2 --seed 3 --out " + at("s.json")), 0);
  const std::string base = "cr-rnn --scenario " + at("s.json") + " --paths 30 --seed 11 --epochs 20";
  ASSERT_EQ(run(base + " --workers 1 --out " + at("a.json")), 0);
  ASSERT_EQ(run(base + " --workers 1 --out " + at("b.json")), 0);
  ASSERT_EQ(run(base + " --workers 3 --out " + at("c.json")), 0);
  auto strip = [](json j) {
    j.erase("timing");
    j["config"].erase("workers");
    return j.dump();
  };
  EXPECT_EQ(strip(load(at("a.json"))), strip(load(at("b.json"))));
  EXPECT_EQ(strip(load(at("a.json"))), strip(load(at("c.json"))));
  EXPECT_EQ(slurp(at("a.csv")), slurp(at("c.csv")));
}

TEST_F(Cli, LabelTrainEvaluatePipeline) {
  ASSERT_EQ(run("scenario gen --zones 6 --subzones-per-zone 2 --seed 4 --out " + at("s.json")), 0);
  ASSERT_EQ(run("label --scenario " + at("s.json") +
                " --paths 30 --seed 2 --frac-seq 0.2 --out " + at("d.csv")),
            0);
  ASSERT_EQ(run("train --data " + at("d.csv") + " --epochs 10 --seed 2 --out " + at("m.json")), 0);
  ASSERT_EQ(run("label --scenario " + at("s.json") +
                " --paths 30 --seed 2 --frac-seq 1.0 --out " + at("truth.csv")),
            0);
  ASSERT_EQ(run("evaluate --model " + at("m.json") + " --truth " + at("truth.csv") + " --train " +
                at("d.csv") + " --k 1,10 --out " + at("e.csv")),
            0);
  EXPECT_GE(count_lines(at("e.csv")), 3u);
}

TEST_F(Cli, SimulateAndValuate) {
  ASSERT_EQ(run("scenario gen --zones 3 --subzones-per-zone 2 --seed 4 --out " + at("s.json")), 0);
  ASSERT_EQ(run("simulate --scenario " + at("s.json") + " --paths 20 --seed 1 --out " +
                at("p.bin")),
            0);
  ASSERT_EQ(run("valuate --scenario " + at("s.json") + " --paths-file " + at("p.bin") +
                " --sequence Z02,Z01,Z03 --out " + at("v.json")),
            0);
  const auto j = load(at("v.json"));
  EXPECT_TRUE(j.contains("policy_value"));
}
