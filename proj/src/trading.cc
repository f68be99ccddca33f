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

#include "pdmarket/trading.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "pdmarket/errors.h"
#include "pdmarket/mechanisms.h"
#include "pdmarket/payment.h"
#include "pdmarket/rng.h"

namespace pdmarket {
namespace {

using nlohmann::json;

constexpr uint64_t kTradeSampleTag = 0x74726473616d7001ULL;
constexpr uint64_t kTradeAllocTag = 0x747264616c6c6f01ULL;
constexpr uint64_t kTradeDrawTag = 0x7472646472617701ULL;
constexpr uint64_t kTradeRmseTag = 0x747264726d736501ULL;
constexpr uint64_t kTradeNoiseTag = 0x7472646e6f697301ULL;
constexpr uint64_t kMenuTag = 0x6d656e7500000001ULL;
constexpr uint64_t kCompareTag = 0x636d707200000001ULL;
constexpr uint64_t kReceiptTag = 0x7263707400000001ULL;

uint64_t HashText(const std::string& text) {
  return HashBytes(text.data(), text.size());
}

std::string ReceiptId(const std::string& buyer, const QueryKey& key,
                      const std::string& mechanism, Money budget,
                      uint64_t seed) {
  uint64_t h = ChainSeed({kReceiptTag, HashText(buyer), HashText(key),
                          HashText(mechanism), std::bit_cast<uint64_t>(budget),
                          seed});
  char buf[17];
  static const char kHex[] = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = kHex[(h >> (60 - 4 * i)) & 0xf];
  buf[16] = '\0';
  return std::string(buf);
}

void CheckCharge(Money chi) {
  if (!(chi >= 0) || !std::isfinite(chi)) {
    throw SchemaError("transaction charge must be non-negative, got " +
                      FormatDouble(chi));
  }
}

void CheckBudgetCoversCharge(Money budget, Money chi) {
  if (!std::isfinite(budget) || !(budget > chi)) {
    throw BudgetError("budget " + FormatDouble(budget) +
                      " does not exceed the transaction charge " +
                      FormatDouble(chi));
  }
}

void CheckLedger(const TradeLedger* ledger, const std::string& buyer,
                 const QueryKey& key) {
  if (ledger != nullptr && ledger->Contains(buyer, key)) {
    throw ArbitrageError("buyer \"" + buyer +
                         "\" already purchased this query: " + key);
  }
}

double RmseOfDistribution(const CountDistribution& dist, int64_t population,
                          int64_t sample_size, double truth,
                          const TradeConfig& config, uint64_t seed) {
  if (config.rmse_mode == RmseMode::kExact) {
    return ExactRmse(dist, population, sample_size, truth);
  }
  return MonteCarloRmse(dist, population, sample_size, truth,
                        config.perturbation_runs, seed);
}

}  // namespace

std::string_view ToString(RmseMode mode) {
  return mode == RmseMode::kExact ? "exact" : "monte-carlo";
}

std::string_view ToString(BaselineMode mode) {
  return mode == BaselineMode::kBudget ? "budget" : "spec";
}

RmseMode RmseModeFromString(std::string_view tag) {
  if (tag == "exact") return RmseMode::kExact;
  if (tag == "monte-carlo") return RmseMode::kMonteCarlo;
  throw ParseError("unknown rmse mode: \"" + std::string(tag) +
                   "\" (expected exact or monte-carlo)");
}

BaselineMode BaselineModeFromString(std::string_view tag) {
  if (tag == "budget") return BaselineMode::kBudget;
  if (tag == "spec") return BaselineMode::kSpec;
  throw ParseError("unknown baseline mode: \"" + std::string(tag) +
                   "\" (expected budget or spec)");
}

std::string SerializeReceipt(const TradeReceipt& r) {
  json j;
  j["id"] = r.id;
  j["buyer"] = r.buyer;
  j["query"] = r.query_key;
  j["mechanism"] = r.mechanism;
  j["answer"] = r.answer;
  j["budget"] = r.budget;
  j["chi"] = r.chi;
  j["paid"] = r.paid;
  j["refund"] = r.refund;
  j["population"] = r.population;
  j["sample_size"] = r.sample_size;
  j["eps_mean"] = r.eps_mean;
  j["payment_mean"] = r.payment_mean;
  j["rmse"] = r.rmse;
  j["seed"] = r.seed;
  json comps = json::array();
  for (const OwnerAllocation& c : r.compensations) {
    comps.push_back(
        {{"owner", c.owner_id}, {"eps", c.eps_bought}, {"payment", c.payment}});
  }
  j["compensations"] = std::move(comps);
  return j.dump();
}

TradeReceipt ParseReceipt(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad receipt line: ") + e.what());
  }
  try {
    TradeReceipt r;
    r.id = j.at("id").get<std::string>();
    r.buyer = j.at("buyer").get<std::string>();
    r.query_key = j.at("query").get<QueryKey>();
    r.mechanism = j.at("mechanism").get<std::string>();
    r.answer = j.at("answer").get<double>();
    r.budget = j.at("budget").get<Money>();
    r.chi = j.at("chi").get<Money>();
    r.paid = j.at("paid").get<Money>();
    r.refund = j.at("refund").get<Money>();
    r.population = j.at("population").get<int64_t>();
    r.sample_size = j.at("sample_size").get<int64_t>();
    r.eps_mean = j.at("eps_mean").get<double>();
    r.payment_mean = j.at("payment_mean").get<Money>();
    r.rmse = j.at("rmse").get<double>();
    r.seed = j.at("seed").get<uint64_t>();
    for (const json& c : j.at("compensations")) {
      r.compensations.push_back({c.at("owner").get<int64_t>(),
                                 c.at("eps").get<double>(),
                                 c.at("payment").get<Money>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("receipt missing fields: ") + e.what());
  }
}

bool TradeLedger::Contains(const std::string& buyer,
                           const QueryKey& key) const {
  return entries_.count({buyer, key}) > 0;
}

void TradeLedger::Insert(const std::string& buyer, const QueryKey& key) {
  entries_.insert({buyer, key});
}

TradeStore::TradeStore(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // a fresh store
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    TradeReceipt r;
    try {
      r = ParseReceipt(line);
    } catch (const Error& e) {
      throw ParseError(path_ + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (!settled_ids_.insert(r.id).second) continue;
    ledger_.Insert(r.buyer, r.query_key);
    receipts_.push_back(std::move(r));
  }
  if (in.bad()) throw IoError("read failure on " + path_);
}

bool TradeStore::Settle(const TradeReceipt& receipt) {
  if (settled_ids_.count(receipt.id)) return false;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot open " + path_ + " for append");
  out << SerializeReceipt(receipt) << '\n';
  out.flush();
  if (!out) throw IoError("write failure on " + path_);
  settled_ids_.insert(receipt.id);
  ledger_.Insert(receipt.buyer, receipt.query_key);
  receipts_.push_back(receipt);
  return true;
}

size_t SelectOptimalSubset(const std::vector<CandidateSummary>& candidates) {
  if (candidates.empty()) {
    throw InfeasibleError("no candidate subsets to select from");
  }
  size_t best = 0;
  for (size_t i = 1; i < candidates.size(); ++i) {
    const CandidateSummary& c = candidates[i];
    const CandidateSummary& b = candidates[best];
    if (c.eps_mean > b.eps_mean ||
        (c.eps_mean == b.eps_mean && c.rmse < b.rmse)) {
      best = i;
    }
  }
  return best;
}

TradeReceipt ExecuteBalancedTrade(const Dataset& dataset,
                                  const CountQuery& query,
                                  const std::string& buyer, Money budget,
                                  const TradeConfig& config,
                                  TradeLedger* ledger) {
  CheckQuerySchema(query, dataset);
  QueryKey key = CanonicalQueryKey(query);
  CheckLedger(ledger, buyer, key);
  CheckCharge(config.chi);
  CheckBudgetCoversCharge(budget, config.chi);
  config.sampling.Validate();

  Money allocatable = budget - config.chi;
  int64_t population = dataset.size();
  int64_t sample_size = RepresentativeSize(population, config.sampling);
  double truth = EvaluateQuery(query, dataset);

  std::vector<Subset> subsets =
      DrawSubsets(dataset, sample_size, config.sampling.subsets_per_trade,
                  ChainSeed({config.seed, kTradeSampleTag}));

  std::vector<SubsetAllocation> allocations;
  std::vector<CandidateSummary> candidates;
  allocations.reserve(subsets.size());
  candidates.reserve(subsets.size());
  for (size_t k = 0; k < subsets.size(); ++k) {
    auto kk = static_cast<uint64_t>(k);
    SubsetAllocation alloc =
        Allocate(subsets[k], dataset, allocatable,
                 ChainSeed({config.seed, kTradeAllocTag, kk}));

    std::vector<uint8_t> flags;
    std::vector<double> eps;
    flags.reserve(alloc.members.size());
    eps.reserve(alloc.members.size());
    for (const OwnerAllocation& m : alloc.members) {
      flags.push_back(Matches(query, dataset.owner(m.owner_id)) ? 1 : 0);
      eps.push_back(m.eps_bought);
    }
    CountDistribution dist = BuildCountDistribution(flags, eps);

    CandidateSummary summary;
    summary.eps_mean = alloc.eps_mean;
    summary.payment_mean = alloc.payment_mean;
    summary.rmse =
        RmseOfDistribution(dist, population, alloc.size(), truth, config,
                           ChainSeed({config.seed, kTradeRmseTag, kk}));
    int64_t draw =
        SampleCount(dist, ChainSeed({config.seed, kTradeDrawTag, kk}));
    summary.answer =
        ScaleAnswer(static_cast<double>(draw), population, alloc.size());
    allocations.push_back(std::move(alloc));
    candidates.push_back(summary);
  }

  size_t pick = SelectOptimalSubset(candidates);
  const SubsetAllocation& winner = allocations[pick];

  TradeReceipt r;
  r.buyer = buyer;
  r.query_key = key;
  r.mechanism = "balanced";
  r.answer = candidates[pick].answer;
  r.budget = budget;
  r.chi = config.chi;
  r.paid = winner.total_paid;
  r.refund = winner.unspent;
  r.population = population;
  r.sample_size = winner.size();
  r.eps_mean = winner.eps_mean;
  r.payment_mean = winner.payment_mean;
  r.rmse = candidates[pick].rmse;
  r.seed = config.seed;
  r.compensations = winner.members;
  r.id = ReceiptId(buyer, key, r.mechanism, budget, config.seed);

  if (ledger != nullptr) ledger->Insert(buyer, key);
  return r;
}

TradeReceipt ExecuteBaselineTrade(const Dataset& dataset,
                                  const CountQuery& query,
                                  const std::string& buyer, Money budget,
                                  const TradeConfig& config,
                                  TradeLedger* ledger) {
  CheckQuerySchema(query, dataset);
  QueryKey key = CanonicalQueryKey(query);
  CheckLedger(ledger, buyer, key);
  CheckCharge(config.chi);

  int64_t population = dataset.size();
  double truth = EvaluateQuery(query, dataset);

  TradeReceipt r;
  r.buyer = buyer;
  r.query_key = key;
  r.mechanism = "baseline";
  r.chi = config.chi;
  r.population = population;
  r.sample_size = population;
  r.seed = config.seed;
  r.compensations.reserve(dataset.owners().size());

  double eps_min = 0;
  if (config.baseline_mode == BaselineMode::kBudget) {
    CheckBudgetCoversCharge(budget, config.chi);
    Money offer = (budget - config.chi) / static_cast<double>(population);
    for (const DataOwner& o : dataset.owners()) {
      Money full = PriceOf(o.scheme, o.eps_max);
      double eps;
      Money payment;
      if (offer >= full) {
        eps = o.eps_max;
        payment = full;
      } else {
        eps = EpsilonOf(o.scheme, offer);
        payment = offer;
      }
      r.compensations.push_back({o.id, eps, payment});
    }
    r.budget = budget;
  } else {
    // Everyone is paid their curve's price for the weakest tolerance in
    // the dataset; the total is the price of the trade, not a cap.
    eps_min = dataset.owners()[0].eps_max;
    for (const DataOwner& o : dataset.owners()) {
      eps_min = std::min(eps_min, o.eps_max);
    }
    for (const DataOwner& o : dataset.owners()) {
      r.compensations.push_back({o.id, eps_min, PriceOf(o.scheme, eps_min)});
    }
  }

  Money paid = 0;
  double eps_sum = 0;
  eps_min = r.compensations[0].eps_bought;
  for (const OwnerAllocation& c : r.compensations) {
    paid += c.payment;
    eps_sum += c.eps_bought;
    eps_min = std::min(eps_min, c.eps_bought);
  }
  r.paid = paid;
  r.eps_mean = eps_sum / static_cast<double>(population);
  r.payment_mean = paid / static_cast<double>(population);
  if (config.baseline_mode == BaselineMode::kBudget) {
    r.refund = (budget - config.chi) - paid;
    if (r.refund < 0 && r.refund > -kMoneyTolerance) r.refund = 0;
  } else {
    r.budget = paid + config.chi;
    r.refund = 0;
  }

  if (!(eps_min > 0)) {
    throw InfeasibleError("baseline trade bought no privacy at all");
  }
  double scale = 1.0 / eps_min;
  r.answer = truth + SampleLaplace(scale, ChainSeed({config.seed,
                                                     kTradeNoiseTag}));
  if (config.rmse_mode == RmseMode::kExact) {
    r.rmse = std::sqrt(2.0) * scale;
  } else {
    Rng rng(ChainSeed({config.seed, kTradeRmseTag}));
    double mse = 0;
    for (int64_t i = 0; i < config.perturbation_runs; ++i) {
      double noise = SampleLaplace(scale, rng);
      mse += noise * noise;
    }
    r.rmse = std::sqrt(mse / static_cast<double>(config.perturbation_runs));
  }
  r.id = ReceiptId(buyer, key, r.mechanism, r.budget, config.seed);

  if (ledger != nullptr) ledger->Insert(buyer, key);
  return r;
}

std::vector<MenuRow> GeneratePriceMenu(const Dataset& dataset,
                                       const CountQuery& query,
                                       const std::vector<Money>& prices,
                                       const TradeConfig& config) {
  if (prices.empty()) throw ParseError("price menu needs at least one price");
  std::vector<MenuRow> rows;
  rows.reserve(prices.size());
  for (Money price : prices) {
    TradeConfig cell = config;
    cell.seed = ChainSeed(
        {config.seed, kMenuTag, std::bit_cast<uint64_t>(price)});
    TradeReceipt r =
        ExecuteBalancedTrade(dataset, query, "menu", price, cell, nullptr);
    rows.push_back({price, r.eps_mean, r.sample_size, r.rmse});
  }
  return rows;
}

std::vector<ComparisonRow> RunComparison(const Dataset& dataset,
                                         const CountQuery& query,
                                         const std::vector<Money>& prices,
                                         int64_t repetitions,
                                         const TradeConfig& config) {
  if (prices.empty()) throw ParseError("comparison needs at least one price");
  if (repetitions < 1) {
    throw ParseError("comparison needs at least one repetition");
  }
  std::vector<ComparisonRow> rows;
  rows.reserve(prices.size() * static_cast<size_t>(repetitions) * 2);
  for (const std::string mechanism : {"balanced", "baseline"}) {
    uint64_t mech_hash = HashBytes(mechanism.data(), mechanism.size());
    for (Money price : prices) {
      for (int64_t rep = 0; rep < repetitions; ++rep) {
        TradeConfig cell = config;
        cell.seed = ChainSeed({config.seed, kCompareTag, mech_hash,
                               std::bit_cast<uint64_t>(price),
                               static_cast<uint64_t>(rep)});
        TradeReceipt r =
            mechanism == "balanced"
                ? ExecuteBalancedTrade(dataset, query, "compare", price, cell,
                                       nullptr)
                : ExecuteBaselineTrade(dataset, query, "compare", price, cell,
                                       nullptr);
        rows.push_back({mechanism, price, cell.seed, r.rmse, r.eps_mean,
                        r.payment_mean, r.sample_size});
      }
    }
  }
  return rows;
}

}  // namespace pdmarket
