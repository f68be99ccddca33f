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

// Command line for the personal-data market engine.
//
//   pdmarket ingest  --synth 243000 --out population.tsv
//   pdmarket menu    --dataset population.tsv --query "commute=car" \
//                    --prices 5,50,100
//   pdmarket trade   --dataset population.tsv --query "commute=car" \
//                    --budget 100 --buyer alice --store trades.jsonl
//   pdmarket compare --dataset population.tsv --query "commute=car" \
//                    --prices 5,50,100,500,1000 --reps 20 --out sweep.tsv

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdmarket/errors.h"
#include "pdmarket/ingest.h"
#include "pdmarket/trading.h"

namespace {

using pdmarket::CountQuery;
using pdmarket::Dataset;
using pdmarket::FormatDouble;
using pdmarket::Money;
using pdmarket::TradeConfig;

void WriteFileAtomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw pdmarket::IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw pdmarket::IoError("write failure on " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw pdmarket::IoError("cannot move " + tmp + " into place: " +
                            ec.message());
  }
}

void Emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    WriteFileAtomic(out_path, content);
  }
}

// Options shared by the query-running subcommands.
struct EngineOptions {
  std::string dataset_path;
  std::string query_text;
  double chi = 0;
  int subsets_per_trade = 5;
  int64_t perturbation_runs = 1000;
  std::string rmse_mode = "exact";
  std::string baseline_mode = "budget";
  uint64_t seed = 0;

  void Register(CLI::App* cmd, bool with_baseline_mode) {
    // --h (candidate subsets) needs the short help alias out of the way.
    cmd->set_help_flag("--help", "Print help and exit");
    cmd->add_option("--dataset", dataset_path, "Dataset TSV path")
        ->required();
    cmd->add_option("--query", query_text, "Counting query predicate")
        ->required();
    cmd->add_option("--chi", chi, "Per-trade transaction charge")
        ->capture_default_str();
    cmd->add_option("--h", subsets_per_trade,
                    "Candidate subsets drawn per trade")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--phi", perturbation_runs,
                    "Monte Carlo draws for rmse estimates")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--rmse-mode", rmse_mode, "exact or monte-carlo")
        ->capture_default_str();
    if (with_baseline_mode) {
      cmd->add_option("--baseline-mode", baseline_mode,
                      "baseline compensation rule: budget or spec")
          ->capture_default_str();
    }
    cmd->add_option("--seed", seed, "Master random seed")
        ->capture_default_str();
  }

  TradeConfig MakeConfig() const {
    TradeConfig config;
    config.chi = chi;
    config.sampling.subsets_per_trade = subsets_per_trade;
    config.perturbation_runs = perturbation_runs;
    config.rmse_mode = pdmarket::RmseModeFromString(rmse_mode);
    config.baseline_mode = pdmarket::BaselineModeFromString(baseline_mode);
    config.seed = seed;
    return config;
  }
};

int RunIngest(const std::string& survey_path, const std::string& level_column,
              int64_t replicate, double eps_cap, int64_t synth_n,
              const std::vector<double>& mix, uint64_t seed,
              const std::string& out_path) {
  if (survey_path.empty() == (synth_n == 0)) {
    throw pdmarket::ParseError(
        "ingest needs exactly one of --survey or --synth");
  }
  Dataset dataset = [&] {
    if (!survey_path.empty()) {
      Dataset d = pdmarket::LoadSurvey(survey_path, level_column, eps_cap);
      return replicate > 1 ? pdmarket::Replicate(d, replicate) : d;
    }
    pdmarket::MixSpec spec;
    if (!mix.empty()) {
      if (mix.size() != 4) {
        throw pdmarket::ParseError(
            "--mix needs 4 proportions: very_high,high,low,very_low");
      }
      spec = {mix[0], mix[1], mix[2], mix[3]};
    }
    return pdmarket::SynthDataset(synth_n, spec,
                                  pdmarket::DefaultAttributeModel(), seed);
  }();
  pdmarket::SaveDataset(dataset, out_path);
  std::cout << "wrote " << dataset.size() << " owners to " << out_path
            << "\n";
  return 0;
}

int RunMenu(const EngineOptions& opts, const std::vector<double>& prices,
            const std::string& out_path) {
  Dataset dataset = pdmarket::LoadDataset(opts.dataset_path);
  CountQuery query = CountQuery::Parse(opts.query_text);
  std::vector<pdmarket::MenuRow> rows =
      pdmarket::GeneratePriceMenu(dataset, query, prices, opts.MakeConfig());
  std::ostringstream out;
  out << "price\teps_mean\tsample_size\trmse\n";
  for (const pdmarket::MenuRow& row : rows) {
    out << FormatDouble(row.price) << '\t' << FormatDouble(row.eps_mean)
        << '\t' << row.sample_size << '\t' << FormatDouble(row.rmse) << '\n';
  }
  Emit(out_path, out.str());
  return 0;
}

int RunTrade(const EngineOptions& opts, Money budget,
             const std::string& buyer, const std::string& mechanism,
             const std::string& store_path, bool dry_run,
             const std::string& out_path) {
  Dataset dataset = pdmarket::LoadDataset(opts.dataset_path);
  CountQuery query = CountQuery::Parse(opts.query_text);
  TradeConfig config = opts.MakeConfig();

  auto execute = [&](pdmarket::TradeLedger* ledger) {
    if (mechanism == "balanced") {
      return pdmarket::ExecuteBalancedTrade(dataset, query, buyer, budget,
                                            config, ledger);
    }
    if (mechanism == "baseline") {
      return pdmarket::ExecuteBaselineTrade(dataset, query, buyer, budget,
                                            config, ledger);
    }
    throw pdmarket::ParseError("unknown mechanism: \"" + mechanism +
                               "\" (expected balanced or baseline)");
  };

  pdmarket::TradeReceipt receipt;
  if (dry_run) {
    receipt = execute(nullptr);
  } else {
    pdmarket::TradeStore store(store_path);
    receipt = execute(&store.ledger());
    store.Settle(receipt);
  }
  std::string line = pdmarket::SerializeReceipt(receipt) + "\n";
  std::cout << line;
  if (!out_path.empty()) WriteFileAtomic(out_path, line);
  return 0;
}

int RunCompare(const EngineOptions& opts, const std::vector<double>& prices,
               int64_t repetitions, const std::string& out_path) {
  Dataset dataset = pdmarket::LoadDataset(opts.dataset_path);
  CountQuery query = CountQuery::Parse(opts.query_text);
  std::vector<pdmarket::ComparisonRow> rows = pdmarket::RunComparison(
      dataset, query, prices, repetitions, opts.MakeConfig());
  std::ostringstream out;
  out << "mechanism\tprice\tseed\trmse\teps_mean\tpayment_mean\tsample_size"
      << "\n";
  for (const pdmarket::ComparisonRow& row : rows) {
    out << row.mechanism << '\t' << FormatDouble(row.price) << '\t'
        << row.seed << '\t' << FormatDouble(row.rmse) << '\t'
        << FormatDouble(row.eps_mean) << '\t'
        << FormatDouble(row.payment_mean) << '\t' << row.sample_size << '\n';
  }
  Emit(out_path, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pricing engine and simulator for a personal-data market"};
  // The short -h is freed up so subcommands can expose the --h option.
  app.set_help_flag("--help", "Print help and exit");
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build and save a dataset");
  ingest->fallthrough();
  std::string survey_path;
  std::string level_column = "privacy_level";
  int64_t replicate = 1;
  double eps_cap = 1.0;
  int64_t synth_n = 0;
  std::vector<double> mix;
  uint64_t ingest_seed = 0;
  std::string ingest_out;
  ingest->add_option("--survey", survey_path, "Survey TSV to ingest");
  ingest->add_option("--level-col", level_column,
                     "Column holding the privacy concern level")
      ->capture_default_str();
  ingest->add_option("--replicate", replicate,
                     "Concatenate this many shifted copies")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  ingest->add_option("--eps-cap", eps_cap, "Upper bound for eps_max")
      ->capture_default_str();
  ingest->add_option("--synth", synth_n, "Generate a synthetic population");
  ingest->add_option("--mix", mix,
                     "Synthetic concern-level proportions "
                     "(very_high,high,low,very_low)")
      ->delimiter(',');
  ingest->add_option("--seed", ingest_seed, "Synthetic generator seed")
      ->capture_default_str();
  ingest->add_option("--out", ingest_out, "Dataset path to write")
      ->required();
  ingest->callback([&] {
    RunIngest(survey_path, level_column, replicate, eps_cap, synth_n, mix,
              ingest_seed, ingest_out);
  });

  // menu
  auto* menu = app.add_subcommand(
      "menu", "Quote mean eps and sample size over a price list");
  menu->fallthrough();
  EngineOptions menu_opts;
  std::vector<double> menu_prices;
  std::string menu_out;
  menu_opts.Register(menu, /*with_baseline_mode=*/false);
  menu->add_option("--prices", menu_prices, "Budgets to quote")
      ->delimiter(',')
      ->required();
  menu->add_option("--out", menu_out, "Write the menu here (default stdout)");
  menu->callback([&] { RunMenu(menu_opts, menu_prices, menu_out); });

  // trade
  auto* trade = app.add_subcommand("trade", "Execute and settle one purchase");
  trade->fallthrough();
  EngineOptions trade_opts;
  Money budget = 0;
  std::string buyer = "buyer";
  std::string mechanism = "balanced";
  std::string store_path = "trades.jsonl";
  bool dry_run = false;
  std::string trade_out;
  trade_opts.Register(trade, /*with_baseline_mode=*/true);
  trade->add_option("--budget", budget, "Total money offered")->required();
  trade->add_option("--buyer", buyer, "Buyer identity for the ledger")
      ->capture_default_str();
  trade->add_option("--mechanism", mechanism, "balanced or baseline")
      ->capture_default_str();
  trade->add_option("--store", store_path, "Append-only receipt store")
      ->capture_default_str();
  trade->add_flag("--dry-run", dry_run,
                  "Run without settling or recording anything");
  trade->add_option("--out", trade_out, "Also write the receipt here");
  trade->callback([&] {
    RunTrade(trade_opts, budget, buyer, mechanism, store_path, dry_run,
             trade_out);
  });

  // compare
  auto* compare = app.add_subcommand(
      "compare", "Sweep both mechanisms over a price grid");
  compare->fallthrough();
  EngineOptions compare_opts;
  std::vector<double> compare_prices;
  int64_t repetitions = 20;
  std::string compare_out;
  compare_opts.Register(compare, /*with_baseline_mode=*/true);
  compare->add_option("--prices", compare_prices, "Budget grid")
      ->delimiter(',')
      ->required();
  compare->add_option("--reps", repetitions, "Repetitions per grid cell")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  compare->add_option("--out", compare_out,
                      "Write the sweep here (default stdout)");
  compare->callback(
      [&] { RunCompare(compare_opts, compare_prices, repetitions, compare_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(pdmarket::ErrorCode::kParse);
  } catch (const pdmarket::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
