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

#ifndef PDMARKET_TRADING_H_
#define PDMARKET_TRADING_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pdmarket/allocation.h"
#include "pdmarket/query.h"
#include "pdmarket/sampling.h"
#include "pdmarket/types.h"

namespace pdmarket {

enum class RmseMode { kExact, kMonteCarlo };
enum class BaselineMode { kBudget, kSpec };

std::string_view ToString(RmseMode mode);
std::string_view ToString(BaselineMode mode);
RmseMode RmseModeFromString(std::string_view tag);
BaselineMode BaselineModeFromString(std::string_view tag);

struct TradeConfig {
  Money chi = 0;                   // per-trade transaction charge
  SamplingConfig sampling;         // sample sizing + subsets per trade
  int64_t perturbation_runs = 1000;  // Monte Carlo draws for rmse estimates
  RmseMode rmse_mode = RmseMode::kExact;
  BaselineMode baseline_mode = BaselineMode::kBudget;
  uint64_t seed = 0;
};

// Signed outcome of one purchase. The settlement identity
//   budget == paid + chi + refund
// holds to kMoneyTolerance for every receipt the engine produces.
struct TradeReceipt {
  std::string id;  // deterministic in (buyer, query, seed, budget)
  std::string buyer;
  QueryKey query_key;
  std::string mechanism;  // "balanced" or "baseline"
  double answer = 0;
  Money budget = 0;
  Money chi = 0;
  Money paid = 0;
  Money refund = 0;
  int64_t population = 0;
  int64_t sample_size = 0;
  double eps_mean = 0;
  Money payment_mean = 0;
  double rmse = 0;
  uint64_t seed = 0;
  std::vector<OwnerAllocation> compensations;
};

std::string SerializeReceipt(const TradeReceipt& receipt);  // one JSON line
TradeReceipt ParseReceipt(const std::string& line);

// Once-per-(buyer, canonical query) purchase tracking.
class TradeLedger {
 public:
  bool Contains(const std::string& buyer, const QueryKey& key) const;
  void Insert(const std::string& buyer, const QueryKey& key);
  int64_t size() const { return static_cast<int64_t>(entries_.size()); }

 private:
  std::set<std::pair<std::string, QueryKey>> entries_;
};

// Append-only receipt log, one JSON line per settled trade. The ledger is
// rebuilt from disk on open, so arbitrage rejection survives restarts.
class TradeStore {
 public:
  explicit TradeStore(std::string path);  // loads the file when present

  // Appends the receipt unless its id is already settled (idempotent).
  // Returns true when a line was written. Throws IoError on write failure,
  // in which case the receipt is not recorded.
  bool Settle(const TradeReceipt& receipt);

  const std::vector<TradeReceipt>& receipts() const { return receipts_; }
  TradeLedger& ledger() { return ledger_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::vector<TradeReceipt> receipts_;
  std::set<std::string> settled_ids_;
  TradeLedger ledger_;
};

// Per-candidate summary used to pick the released subset: highest mean
// purchased eps wins, ties prefer the smaller rmse, then the lower index.
struct CandidateSummary {
  double eps_mean = 0;
  double rmse = 0;
  double answer = 0;
  Money payment_mean = 0;
};
size_t SelectOptimalSubset(const std::vector<CandidateSummary>& candidates);

// Runs one purchase with the sampling mechanism: budget check, candidate
// subsets, per-subset budget allocation, per-owner-eps count perturbation,
// candidate selection, and a population-scaled answer. When `ledger` is
// non-null the (buyer, query) pair is checked and recorded; passing
// nullptr gives a dry run with no arbitrage side effects.
TradeReceipt ExecuteBalancedTrade(const Dataset& dataset,
                                  const CountQuery& query,
                                  const std::string& buyer, Money budget,
                                  const TradeConfig& config,
                                  TradeLedger* ledger);

// Runs one purchase with the uniform-guarantee mechanism: every owner is
// paid for the same eps, and the exact count over the whole dataset gets
// Laplace noise of scale 1 / eps_min. In kBudget mode the per-owner offer
// is budget-driven (cheap owners capped at their full price); in kSpec
// mode everyone is paid the price of the dataset-minimum tolerance and the
// receipt's budget records that outcome.
TradeReceipt ExecuteBaselineTrade(const Dataset& dataset,
                                  const CountQuery& query,
                                  const std::string& buyer, Money budget,
                                  const TradeConfig& config,
                                  TradeLedger* ledger);

// Price menu: for each offered budget, the mean purchased eps and sample
// size a balanced trade would deliver. Pure; no ledger entries, no payouts.
struct MenuRow {
  Money price = 0;
  double eps_mean = 0;
  int64_t sample_size = 0;
  double rmse = 0;
};
std::vector<MenuRow> GeneratePriceMenu(const Dataset& dataset,
                                       const CountQuery& query,
                                       const std::vector<Money>& prices,
                                       const TradeConfig& config);

// Repeated dry runs of both mechanisms over a price grid, for error and
// payout comparisons. Each (mechanism, price, repetition) cell runs with
// an independent seed derived from config.seed.
struct ComparisonRow {
  std::string mechanism;
  Money price = 0;
  uint64_t seed = 0;
  double rmse = 0;
  double eps_mean = 0;
  Money payment_mean = 0;
  int64_t sample_size = 0;
};
std::vector<ComparisonRow> RunComparison(const Dataset& dataset,
                                         const CountQuery& query,
                                         const std::vector<Money>& prices,
                                         int64_t repetitions,
                                         const TradeConfig& config);

}  // namespace pdmarket

#endif  // PDMARKET_TRADING_H_
