/*
 * Copyright (c) 2026, The cross authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>

#include "cross/app/report.hpp"
#include "fixtures.hpp"

namespace cross {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
};

/// Runs the cross binary with stdout and stderr captured.
Run cross_cli(const fs::path& work, const std::string& args) {
  const auto log = work.parent_path() / (work.filename().string() + ".log");
  const std::string cmd = std::string(CROSS_CLI_PATH) + " -w " + work.string() + " " + args +
                          " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, {std::istreambuf_iterator<char>(in), {}}};
}

constexpr const char* kSmall = "--d 8 --m 4 --k 5 --batch-size 50 --epochs 2";

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    work_ = new fs::path(testing::scratch_dir("cli_pipeline"));
    const auto synth = cross_cli(*work_, "synth --nodes 30 --edges 300 --timesteps 30 --topics 4");
    ASSERT_EQ(synth.code, 0) << synth.out;
  }
  static void TearDownTestSuite() { delete work_; }
  static const fs::path& work() { return *work_; }

 private:
  static fs::path* work_;
};

fs::path* CliPipeline::work_ = nullptr;

TEST_F(CliPipeline, ExtractEmbedTrainEval) {
  auto r = cross_cli(work(), std::string(kSmall) + " extract --mock");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(work() / "summaries.jsonl"));
  // Cached summaries are not regenerated.
  r = cross_cli(work(), std::string(kSmall) + " extract --mock");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("llm calls: 0"), std::string::npos) << r.out;

  r = cross_cli(work(), std::string(kSmall) + " embed");
  ASSERT_EQ(r.code, 0) << r.out;
  r = cross_cli(work(), std::string(kSmall) + " train");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(work() / "model.ckpt"));
  EXPECT_TRUE(fs::exists(work() / "train_log.jsonl"));

  r = cross_cli(work(), std::string(kSmall) + " eval --max-queries 40");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("over 40 links"), std::string::npos) << r.out;
  r = cross_cli(work(), std::string(kSmall) + " eval --auc");
  ASSERT_EQ(r.code, 0) << r.out;
  r = cross_cli(work(), std::string(kSmall) + " perturb --rates 0,0.5 --max-queries 20");
  ASSERT_EQ(r.code, 0) << r.out;

  const auto records = app::read_metrics(work() / "metrics.jsonl");
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[0].metric, "mrr");
  EXPECT_EQ(records[1].metric, "auc");
  EXPECT_EQ(records[3].label, "p=0.5");
  for (const auto& rec : records) {
    EXPECT_GE(rec.value, 0.0);
    EXPECT_LE(rec.value, 1.0);
  }
}

TEST_F(CliPipeline, MissingArtifactIsDataError) {
  const auto empty = testing::scratch_dir("cli_empty");
  EXPECT_EQ(cross_cli(empty, "eval").code, 2);
  EXPECT_EQ(cross_cli(empty, "extract --mock").code, 2);
  EXPECT_EQ(cross_cli(empty, "train").code, 2);
}

TEST(Cli, UsageErrors) {
  const auto work = testing::scratch_dir("cli_usage");
  EXPECT_EQ(cross_cli(work, "").code, 1);
  EXPECT_EQ(cross_cli(work, "bogus").code, 1);
  EXPECT_EQ(cross_cli(work, "--lr -1 train").code, 1);
  EXPECT_EQ(cross_cli(work, "--variant nope train").code, 1);
  EXPECT_EQ(cross_cli(work, "--help").code, 0);
}

TEST(Cli, MalformedInputIsDataError) {
  const auto work = testing::scratch_dir("cli_bad_input");
  const auto edges = work.parent_path() / "cli_bad_edges.csv";
  const auto nodes = work.parent_path() / "cli_bad_nodes.csv";
  std::ofstream(edges) << "a,b,x,t\n";
  std::ofstream(nodes) << "a,t\nb,u\n";
  const auto r = cross_cli(work, "ingest --edges " + edges.string() + " --nodes " + nodes.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("line 1"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace cross
