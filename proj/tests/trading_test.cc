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

#include <cmath>
#include <fstream>
#include <set>

#include "gtest/gtest.h"
#include "pdmarket/errors.h"
#include "pdmarket/payment.h"
#include "testutil.h"

namespace pdmarket {
namespace {

Dataset SmallMarket() {
  std::vector<std::pair<Scheme, double>> specs;
  for (int i = 0; i < 40; ++i) {
    specs.emplace_back(i % 2 ? Scheme::kTypeB : Scheme::kTypeA,
                       i % 2 ? 0.9 : 0.1);
  }
  return Dataset(MakeOwners(specs), "unit-test");
}

Dataset TwoOwnerMarket() {
  return Dataset(
      MakeOwners({{Scheme::kTypeA, 0.1}, {Scheme::kTypeB, 0.9}}),
      "unit-test");
}

TEST(ModeTagsTest, RoundTrip) {
  EXPECT_EQ(ToString(RmseMode::kExact), "exact");
  EXPECT_EQ(ToString(RmseMode::kMonteCarlo), "monte-carlo");
  EXPECT_EQ(RmseModeFromString("exact"), RmseMode::kExact);
  EXPECT_EQ(RmseModeFromString("monte-carlo"), RmseMode::kMonteCarlo);
  EXPECT_THROW(RmseModeFromString("guess"), ParseError);
  EXPECT_EQ(ToString(BaselineMode::kBudget), "budget");
  EXPECT_EQ(ToString(BaselineMode::kSpec), "spec");
  EXPECT_EQ(BaselineModeFromString("budget"), BaselineMode::kBudget);
  EXPECT_EQ(BaselineModeFromString("spec"), BaselineMode::kSpec);
  EXPECT_THROW(BaselineModeFromString(""), ParseError);
}

TEST(SelectOptimalSubsetTest, HighestMeanEpsWins) {
  std::vector<CandidateSummary> c(3);
  c[0].eps_mean = 0.2;
  c[1].eps_mean = 0.5;
  c[2].eps_mean = 0.3;
  EXPECT_EQ(SelectOptimalSubset(c), 1u);
}

TEST(SelectOptimalSubsetTest, TieBreaksOnRmseThenIndex) {
  std::vector<CandidateSummary> c(3);
  c[0].eps_mean = 0.5;
  c[0].rmse = 4.0;
  c[1].eps_mean = 0.5;
  c[1].rmse = 3.0;
  c[2].eps_mean = 0.5;
  c[2].rmse = 3.0;
  EXPECT_EQ(SelectOptimalSubset(c), 1u);
  c[1].rmse = 4.0;
  c[2].rmse = 4.0;
  EXPECT_EQ(SelectOptimalSubset(c), 0u);
  EXPECT_THROW(SelectOptimalSubset({}), InfeasibleError);
}

TEST(BalancedTradeTest, SettlementIdentity) {
  Dataset dataset = SmallMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  config.chi = 0.25;
  config.seed = 7;
  for (Money budget : {1.0, 2.5, 6.0, 50.0}) {
    TradeReceipt r =
        ExecuteBalancedTrade(dataset, query, "alice", budget, config,
                             nullptr);
    EXPECT_NEAR(r.budget, r.paid + r.chi + r.refund, kMoneyTolerance)
        << "budget " << budget;
    EXPECT_DOUBLE_EQ(r.budget, budget);
    EXPECT_DOUBLE_EQ(r.chi, 0.25);
    EXPECT_GE(r.refund, -kMoneyTolerance);
    Money paid_sum = 0;
    double eps_sum = 0;
    for (const OwnerAllocation& a : r.compensations) {
      EXPECT_GT(a.eps_bought, 0.0);
      EXPECT_GT(a.payment, 0.0);
      paid_sum += a.payment;
      eps_sum += a.eps_bought;
    }
    ASSERT_FALSE(r.compensations.empty());
    EXPECT_NEAR(r.paid, paid_sum, kMoneyTolerance);
    double n = static_cast<double>(r.compensations.size());
    EXPECT_NEAR(r.eps_mean, eps_sum / n, 1e-12);
    EXPECT_NEAR(r.payment_mean, paid_sum / n, 1e-12);
  }
}

TEST(BalancedTradeTest, AnswerIsPopulationScaled) {
  Dataset dataset = SmallMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  config.seed = 11;
  TradeReceipt r =
      ExecuteBalancedTrade(dataset, query, "alice", 3.0, config, nullptr);
  EXPECT_EQ(r.population, 40);
  EXPECT_EQ(r.sample_size, RepresentativeSize(40, config.sampling));
  double raw = r.answer * static_cast<double>(r.sample_size) /
               static_cast<double>(r.population);
  EXPECT_NEAR(raw, std::round(raw), 1e-9);
  EXPECT_GE(raw, 0.0);
  EXPECT_LE(raw, static_cast<double>(r.sample_size));
  EXPECT_EQ(r.mechanism, "balanced");
  EXPECT_EQ(r.query_key, CanonicalQueryKey(query));
}

TEST(BalancedTradeTest, DeterministicInSeed) {
  Dataset dataset = SmallMarket();
  CountQuery query = CountQuery::Parse("group = odd");
  TradeConfig config;
  config.seed = 21;
  TradeReceipt a =
      ExecuteBalancedTrade(dataset, query, "bob", 4.0, config, nullptr);
  TradeReceipt b =
      ExecuteBalancedTrade(dataset, query, "bob", 4.0, config, nullptr);
  EXPECT_EQ(SerializeReceipt(a), SerializeReceipt(b));
  config.seed = 22;
  TradeReceipt c =
      ExecuteBalancedTrade(dataset, query, "bob", 4.0, config, nullptr);
  EXPECT_NE(a.id, c.id);
}

TEST(BalancedTradeTest, ArbitrageChecksCanonicalKey) {
  Dataset dataset = SmallMarket();
  TradeLedger ledger;
  TradeConfig config;
  config.seed = 3;
  CountQuery query =
      CountQuery::Parse("group = even AND group in {even, odd}");
  ExecuteBalancedTrade(dataset, query, "alice", 2.0, config, &ledger);
  EXPECT_EQ(ledger.size(), 1);
  // Same predicate, permuted clauses and spelling: rejected.
  CountQuery same =
      CountQuery::Parse("group in {odd, even} and group == even");
  EXPECT_THROW(
      ExecuteBalancedTrade(dataset, same, "alice", 9.0, config, &ledger),
      ArbitrageError);
  // Another buyer may ask the same question.
  EXPECT_NO_THROW(
      ExecuteBalancedTrade(dataset, same, "carol", 2.0, config, &ledger));
  EXPECT_EQ(ledger.size(), 2);
}

TEST(BalancedTradeTest, DryRunLeavesNoTrace) {
  Dataset dataset = SmallMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  ExecuteBalancedTrade(dataset, query, "alice", 2.0, config, nullptr);
  EXPECT_NO_THROW(
      ExecuteBalancedTrade(dataset, query, "alice", 2.0, config, nullptr));
}

TEST(BalancedTradeTest, InputValidation) {
  Dataset dataset = SmallMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  config.chi = 1.0;
  EXPECT_THROW(
      ExecuteBalancedTrade(dataset, query, "a", 1.0, config, nullptr),
      BudgetError);
  EXPECT_THROW(
      ExecuteBalancedTrade(dataset, query, "a", 0.5, config, nullptr),
      BudgetError);
  config.chi = -0.1;
  EXPECT_THROW(
      ExecuteBalancedTrade(dataset, query, "a", 1.0, config, nullptr),
      SchemaError);
  config.chi = 0;
  CountQuery bad = CountQuery::Parse("nosuch = x");
  EXPECT_THROW(
      ExecuteBalancedTrade(dataset, bad, "a", 1.0, config, nullptr),
      SchemaError);
}

TEST(BaselineTradeTest, BudgetModeFullPayHandCase) {
  Dataset dataset = TwoOwnerMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  config.seed = 5;
  TradeReceipt r =
      ExecuteBaselineTrade(dataset, query, "alice", 1.0, config, nullptr);
  // Offer 0.5 each covers both full prices, so both sell eps_max.
  ASSERT_EQ(r.compensations.size(), 2u);
  EXPECT_NEAR(r.paid, 0.2628987668831450, 1e-12);
  EXPECT_NEAR(r.refund, 1.0 - 0.2628987668831450, 1e-12);
  EXPECT_NEAR(r.budget, r.paid + r.chi + r.refund, kMoneyTolerance);
  EXPECT_DOUBLE_EQ(r.compensations[0].eps_bought, 0.1);
  EXPECT_DOUBLE_EQ(r.compensations[1].eps_bought, 0.9);
  EXPECT_NEAR(r.eps_mean, 0.5, 1e-12);
  // Noise scale follows the weakest tolerance: 1 / 0.1.
  EXPECT_NEAR(r.rmse, std::sqrt(2.0) * 10.0, 1e-12);
  EXPECT_EQ(r.sample_size, 2);
  EXPECT_EQ(r.population, 2);
  EXPECT_EQ(r.mechanism, "baseline");
}

TEST(BaselineTradeTest, BudgetModePartialOfferHandCase) {
  Dataset dataset = TwoOwnerMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  config.seed = 5;
  TradeReceipt r =
      ExecuteBaselineTrade(dataset, query, "alice", 0.2, config, nullptr);
  // Offer 0.1 each: owner 0's full price is below the offer and is capped;
  // owner 1 sells the tolerance 0.1 buys on its curve.
  ASSERT_EQ(r.compensations.size(), 2u);
  EXPECT_NEAR(r.compensations[0].payment, 0.0773046324816173, 1e-12);
  EXPECT_DOUBLE_EQ(r.compensations[0].eps_bought, 0.1);
  EXPECT_NEAR(r.compensations[1].payment, 0.1, 1e-12);
  EXPECT_NEAR(r.compensations[1].eps_bought, 0.4317877695883730, 1e-9);
  EXPECT_NEAR(r.paid, 0.1773046324816173, 1e-12);
  EXPECT_NEAR(r.budget, r.paid + r.chi + r.refund, kMoneyTolerance);
  EXPECT_NEAR(r.rmse, std::sqrt(2.0) * 10.0, 1e-12);
}

TEST(BaselineTradeTest, SpecModePricesTheAnswer) {
  Dataset dataset = TwoOwnerMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  config.baseline_mode = BaselineMode::kSpec;
  config.chi = 0.3;
  config.seed = 9;
  TradeReceipt r =
      ExecuteBaselineTrade(dataset, query, "alice", 123.0, config, nullptr);
  // Everyone sells the dataset-minimum tolerance at their own curve price.
  double eps_min = 0.1;
  Money expected_paid = PriceOf(Scheme::kTypeA, eps_min) +
                        PriceOf(Scheme::kTypeB, eps_min);
  ASSERT_EQ(r.compensations.size(), 2u);
  EXPECT_DOUBLE_EQ(r.compensations[0].eps_bought, eps_min);
  EXPECT_DOUBLE_EQ(r.compensations[1].eps_bought, eps_min);
  EXPECT_NEAR(r.paid, expected_paid, 1e-12);
  // The price is an output: the receipt's budget is the bill.
  EXPECT_NEAR(r.budget, r.paid + r.chi, kMoneyTolerance);
  EXPECT_DOUBLE_EQ(r.refund, 0.0);
  EXPECT_NEAR(r.rmse, std::sqrt(2.0) / eps_min, 1e-12);
}

TEST(BaselineTradeTest, DeterministicInSeed) {
  Dataset dataset = SmallMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  config.seed = 14;
  TradeReceipt a =
      ExecuteBaselineTrade(dataset, query, "bob", 5.0, config, nullptr);
  TradeReceipt b =
      ExecuteBaselineTrade(dataset, query, "bob", 5.0, config, nullptr);
  EXPECT_EQ(SerializeReceipt(a), SerializeReceipt(b));
}

TEST(BaselineTradeTest, ArbitrageAndBudgetChecks) {
  Dataset dataset = TwoOwnerMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeLedger ledger;
  TradeConfig config;
  ExecuteBaselineTrade(dataset, query, "alice", 1.0, config, &ledger);
  EXPECT_THROW(
      ExecuteBaselineTrade(dataset, query, "alice", 1.0, config, &ledger),
      ArbitrageError);
  config.chi = 2.0;
  EXPECT_THROW(
      ExecuteBaselineTrade(dataset, query, "dan", 1.5, config, &ledger),
      BudgetError);
}

TEST(ReceiptJsonTest, RoundTrip) {
  TradeReceipt r;
  r.id = "00ff00ff00ff00ff";
  r.buyer = "alice";
  r.query_key = "group=even";
  r.mechanism = "balanced";
  r.answer = 12.734;
  r.budget = 5.0;
  r.chi = 0.25;
  r.paid = 4.1;
  r.refund = 0.65;
  r.population = 40;
  r.sample_size = 37;
  r.eps_mean = 0.231;
  r.payment_mean = 0.110810810810811;
  r.rmse = 1.75;
  r.seed = 99;
  r.compensations.push_back({3, 0.1, 0.0773046324816173});
  r.compensations.push_back({8, 0.9, 0.185594134401528});
  TradeReceipt p = ParseReceipt(SerializeReceipt(r));
  EXPECT_EQ(p.id, r.id);
  EXPECT_EQ(p.buyer, r.buyer);
  EXPECT_EQ(p.query_key, r.query_key);
  EXPECT_EQ(p.mechanism, r.mechanism);
  EXPECT_EQ(p.answer, r.answer);
  EXPECT_EQ(p.budget, r.budget);
  EXPECT_EQ(p.chi, r.chi);
  EXPECT_EQ(p.paid, r.paid);
  EXPECT_EQ(p.refund, r.refund);
  EXPECT_EQ(p.population, r.population);
  EXPECT_EQ(p.sample_size, r.sample_size);
  EXPECT_EQ(p.eps_mean, r.eps_mean);
  EXPECT_EQ(p.payment_mean, r.payment_mean);
  EXPECT_EQ(p.rmse, r.rmse);
  EXPECT_EQ(p.seed, r.seed);
  ASSERT_EQ(p.compensations.size(), 2u);
  EXPECT_EQ(p.compensations[0].owner_id, 3);
  EXPECT_EQ(p.compensations[0].eps_bought, 0.1);
  EXPECT_EQ(p.compensations[1].payment, 0.185594134401528);
}

TEST(ReceiptJsonTest, ParseErrors) {
  EXPECT_THROW(ParseReceipt("{not json"), ParseError);
  EXPECT_THROW(ParseReceipt("{\"id\": \"x\"}"), SchemaError);
}

TEST(TradeStoreTest, SettleReloadAndIdempotence) {
  TempDir dir("store");
  std::string path = dir.File("trades.jsonl");
  Dataset dataset = SmallMarket();
  CountQuery q1 = CountQuery::Parse("group = even");
  CountQuery q2 = CountQuery::Parse("group = odd");
  TradeConfig config;
  config.seed = 31;
  {
    TradeStore store(path);
    TradeReceipt r1 = ExecuteBalancedTrade(dataset, q1, "alice", 2.0,
                                           config, &store.ledger());
    TradeReceipt r2 = ExecuteBalancedTrade(dataset, q2, "alice", 2.0,
                                           config, &store.ledger());
    EXPECT_TRUE(store.Settle(r1));
    EXPECT_TRUE(store.Settle(r2));
    EXPECT_FALSE(store.Settle(r1));  // same id settles once
    EXPECT_EQ(store.receipts().size(), 2u);
  }
  TradeStore reopened(path);
  ASSERT_EQ(reopened.receipts().size(), 2u);
  EXPECT_EQ(reopened.receipts()[0].buyer, "alice");
  // The rebuilt ledger still rejects the repeated question.
  EXPECT_THROW(ExecuteBalancedTrade(dataset, q1, "alice", 2.0, config,
                                    &reopened.ledger()),
               ArbitrageError);
}

TEST(TradeStoreTest, CorruptLineIsAParseError) {
  TempDir dir("store-bad");
  std::string path = dir.File("trades.jsonl");
  std::ofstream(path) << "this is not a receipt\n";
  EXPECT_THROW(TradeStore{path}, ParseError);
}

TEST(TradeStoreTest, DuplicateIdsOnDiskCollapse) {
  TempDir dir("store-dup");
  std::string path = dir.File("trades.jsonl");
  TradeReceipt r;
  r.id = "aaaaaaaaaaaaaaaa";
  r.buyer = "alice";
  r.query_key = "k=1";
  r.mechanism = "balanced";
  std::string line = SerializeReceipt(r);
  std::ofstream(path) << line << "\n" << line << "\n";
  TradeStore store(path);
  EXPECT_EQ(store.receipts().size(), 1u);
}

TEST(PriceMenuTest, RowsFollowThePriceGrid) {
  Dataset dataset = SmallMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  config.seed = 17;
  std::vector<Money> prices = {1.0, 3.0, 8.0};
  std::vector<MenuRow> menu =
      GeneratePriceMenu(dataset, query, prices, config);
  ASSERT_EQ(menu.size(), 3u);
  for (size_t i = 0; i < menu.size(); ++i) {
    EXPECT_DOUBLE_EQ(menu[i].price, prices[i]);
    EXPECT_GT(menu[i].eps_mean, 0.0);
    EXPECT_GT(menu[i].sample_size, 0);
    EXPECT_GT(menu[i].rmse, 0.0);
  }
  std::vector<MenuRow> again =
      GeneratePriceMenu(dataset, query, prices, config);
  for (size_t i = 0; i < menu.size(); ++i) {
    EXPECT_DOUBLE_EQ(menu[i].eps_mean, again[i].eps_mean);
    EXPECT_DOUBLE_EQ(menu[i].rmse, again[i].rmse);
  }
  EXPECT_THROW(GeneratePriceMenu(dataset, query, {}, config), ParseError);
}

TEST(ComparisonTest, CoversTheGrid) {
  Dataset dataset = SmallMarket();
  CountQuery query = CountQuery::Parse("group = even");
  TradeConfig config;
  config.seed = 23;
  std::vector<Money> prices = {2.0, 6.0};
  std::vector<ComparisonRow> rows =
      RunComparison(dataset, query, prices, 3, config);
  ASSERT_EQ(rows.size(), 2u * 2u * 3u);
  int balanced = 0;
  int baseline = 0;
  std::set<uint64_t> seeds;
  for (const ComparisonRow& row : rows) {
    if (row.mechanism == "balanced") balanced++;
    if (row.mechanism == "baseline") baseline++;
    EXPECT_GT(row.rmse, 0.0);
    EXPECT_GT(row.eps_mean, 0.0);
    seeds.insert(row.seed);
  }
  EXPECT_EQ(balanced, 6);
  EXPECT_EQ(baseline, 6);
  EXPECT_EQ(seeds.size(), rows.size());
  EXPECT_THROW(RunComparison(dataset, query, prices, 0, config), ParseError);
  EXPECT_THROW(RunComparison(dataset, query, {}, 3, config), ParseError);
}

}  // namespace
}  // namespace pdmarket
