//
// Copyright 2026 The pdmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Drives the installed binary end to end through a shell. The binary path
// arrives in the PDMARKET_BIN environment variable set by the test harness.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtest/gtest.h"
#include "testutil.h"

namespace pdmarket {
namespace {

std::string Binary() {
  const char* env = std::getenv("PDMARKET_BIN");
  EXPECT_NE(env, nullptr) << "PDMARKET_BIN is not set";
  return env == nullptr ? "" : env;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

CommandResult RunCli(const TempDir& dir, const std::string& args) {
  static int counter = 0;
  std::string capture = dir.File("out-" + std::to_string(counter++) + ".txt");
  std::string cmd = Binary() + " " + args + " > " + capture + " 2>&1";
  int status = std::system(cmd.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string IngestSynth(const TempDir& dir) {
  std::string data = dir.File("market.tsv");
  CommandResult r = RunCli(
      dir, "ingest --synth 300 --seed 4 --out " + data);
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(std::filesystem::exists(data));
  EXPECT_TRUE(std::filesystem::exists(data + ".meta.json"));
  return data;
}

TEST(CliTest, IngestTradeAndArbitrage) {
  TempDir dir("cli-trade");
  std::string data = IngestSynth(dir);
  std::string store = dir.File("trades.jsonl");
  std::string trade = "trade --dataset " + data +
                      " --query 'commute = car' --budget 5 --buyer alice"
                      " --seed 7 --store " + store;
  CommandResult first = RunCli(dir, trade);
  ASSERT_EQ(first.exit_code, 0) << first.output;
  nlohmann::json receipt = nlohmann::json::parse(first.output);
  EXPECT_EQ(receipt.at("mechanism"), "balanced");
  EXPECT_EQ(receipt.at("buyer"), "alice");
  EXPECT_DOUBLE_EQ(receipt.at("budget").get<double>(), 5.0);
  EXPECT_TRUE(std::filesystem::exists(store));

  // The same buyer asking the same question again is arbitrage.
  CommandResult repeat = RunCli(dir, trade);
  EXPECT_EQ(repeat.exit_code, 5) << repeat.output;

  // A permuted spelling of the same predicate is still arbitrage.
  std::string permuted = "trade --dataset " + data +
                         " --query 'commute == car' --budget 9"
                         " --buyer alice --seed 8 --store " + store;
  EXPECT_EQ(RunCli(dir, permuted).exit_code, 5);

  // A different buyer is fine.
  std::string other = "trade --dataset " + data +
                      " --query 'commute = car' --budget 5 --buyer bob"
                      " --seed 9 --store " + store;
  EXPECT_EQ(RunCli(dir, other).exit_code, 0);
}

TEST(CliTest, BaselineMechanism) {
  TempDir dir("cli-baseline");
  std::string data = IngestSynth(dir);
  std::string store = dir.File("trades.jsonl");
  CommandResult r = RunCli(
      dir, "trade --dataset " + data +
               " --query 'region = north' --budget 40 --mechanism baseline"
               " --seed 3 --store " + store);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  nlohmann::json receipt = nlohmann::json::parse(r.output);
  EXPECT_EQ(receipt.at("mechanism"), "baseline");
  EXPECT_EQ(receipt.at("sample_size").get<int64_t>(), 300);
}

TEST(CliTest, DryRunWritesNothing) {
  TempDir dir("cli-dry");
  std::string data = IngestSynth(dir);
  std::string store = dir.File("trades.jsonl");
  std::string trade = "trade --dataset " + data +
                      " --query 'commute = bus' --budget 5 --buyer alice"
                      " --seed 7 --store " + store;
  CommandResult dry = RunCli(dir, trade + " --dry-run");
  ASSERT_EQ(dry.exit_code, 0) << dry.output;
  EXPECT_FALSE(std::filesystem::exists(store));
  // The dry run left no ledger entry, so the real purchase still works.
  EXPECT_EQ(RunCli(dir, trade).exit_code, 0);
}

TEST(CliTest, MenuWritesTsv) {
  TempDir dir("cli-menu");
  std::string data = IngestSynth(dir);
  std::string out = dir.File("menu.tsv");
  CommandResult r = RunCli(
      dir, "menu --dataset " + data +
               " --query 'commute = car' --prices 1,5,25 --seed 2 --out " +
               out);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  std::ifstream in(out);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::vector<std::string> lines = Lines(buffer.str());
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "price\teps_mean\tsample_size\trmse");
  EXPECT_EQ(lines[1].substr(0, 2), "1\t");
}

TEST(CliTest, CompareWritesTsv) {
  TempDir dir("cli-compare");
  std::string data = IngestSynth(dir);
  std::string out = dir.File("compare.tsv");
  CommandResult r = RunCli(
      dir, "compare --dataset " + data +
               " --query 'commute = car' --prices 2,10 --reps 2 --seed 6"
               " --out " + out);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  std::ifstream in(out);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::vector<std::string> lines = Lines(buffer.str());
  ASSERT_EQ(lines.size(), 1u + 2u * 2u * 2u);
  EXPECT_EQ(lines[0],
            "mechanism\tprice\tseed\trmse\teps_mean\tpayment_mean"
            "\tsample_size");
}

TEST(CliTest, SurveyIngestWithReplication) {
  TempDir dir("cli-survey");
  std::string survey = dir.File("survey.tsv");
  std::ofstream(survey) << "commute\tprivacy_level\n"
                           "car\tvery_high\n"
                           "bus\tlow\n";
  std::string data = dir.File("survey-market.tsv");
  CommandResult r = RunCli(
      dir, "ingest --survey " + survey + " --replicate 3 --out " + data);
  ASSERT_EQ(r.exit_code, 0) << r.output;
  CommandResult t = RunCli(
      dir, "trade --dataset " + data +
               " --query 'commute = car' --budget 1 --dry-run");
  EXPECT_EQ(t.exit_code, 0) << t.output;
  nlohmann::json receipt = nlohmann::json::parse(t.output);
  EXPECT_EQ(receipt.at("population").get<int64_t>(), 6);
}

TEST(CliTest, ExitCodes) {
  TempDir dir("cli-exit");
  std::string data = IngestSynth(dir);
  // Unknown flag: usage error.
  EXPECT_EQ(RunCli(dir, "trade --no-such-flag").exit_code, 2);
  // Malformed query text: parse error.
  EXPECT_EQ(RunCli(dir, "trade --dataset " + data +
                         " --query 'commute = ' --budget 5 --dry-run")
                .exit_code,
            2);
  // Unknown attribute: schema error.
  EXPECT_EQ(RunCli(dir, "trade --dataset " + data +
                         " --query 'salary = 10' --budget 5 --dry-run")
                .exit_code,
            3);
  // Budget below the transaction charge: budget error.
  EXPECT_EQ(RunCli(dir, "trade --dataset " + data +
                         " --query 'commute = car' --budget 0.5 --chi 1"
                         " --dry-run")
                .exit_code,
            4);
  // Missing dataset: io error.
  EXPECT_EQ(RunCli(dir, "trade --dataset " + dir.File("nope.tsv") +
                         " --query 'commute = car' --budget 5 --dry-run")
                .exit_code,
            7);
  // Ingest requires exactly one source.
  EXPECT_EQ(RunCli(dir, "ingest --out " + dir.File("x.tsv")).exit_code, 2);
}

TEST(CliTest, ConfigFileWithOverride) {
  TempDir dir("cli-config");
  std::string data = IngestSynth(dir);
  std::string config = dir.File("pdmarket.ini");
  std::ofstream(config) << "[trade]\nchi=0.5\nseed=12\n";
  std::string base = "trade --dataset " + data +
                     " --query 'commute = walk' --budget 5 --dry-run"
                     " --config " + config;
  CommandResult from_config = RunCli(dir, base);
  ASSERT_EQ(from_config.exit_code, 0) << from_config.output;
  nlohmann::json receipt = nlohmann::json::parse(from_config.output);
  EXPECT_DOUBLE_EQ(receipt.at("chi").get<double>(), 0.5);
  EXPECT_EQ(receipt.at("seed").get<uint64_t>(), 12u);
  // Command line flags beat the config file.
  CommandResult overridden = RunCli(dir, base + " --chi 0.75");
  ASSERT_EQ(overridden.exit_code, 0) << overridden.output;
  nlohmann::json receipt2 = nlohmann::json::parse(overridden.output);
  EXPECT_DOUBLE_EQ(receipt2.at("chi").get<double>(), 0.75);
}

TEST(CliTest, HelpExitsZero) {
  TempDir dir("cli-help");
  EXPECT_EQ(RunCli(dir, "--help").exit_code, 0);
  EXPECT_EQ(RunCli(dir, "trade --help").exit_code, 0);
}

}  // namespace
}  // namespace pdmarket
