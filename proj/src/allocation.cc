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

#include "pdmarket/allocation.h"

#include <algorithm>
#include <numeric>

#include "pdmarket/errors.h"
#include "pdmarket/payment.h"
#include "pdmarket/rng.h"

namespace pdmarket {
namespace {

Money FullPriceOfOwner(const DataOwner& o) {
  return PriceOf(o.scheme, o.eps_max);
}

void FinishStats(SubsetAllocation& alloc) {
  double eps_sum = 0;
  Money pay_sum = 0;
  for (const OwnerAllocation& m : alloc.members) {
    eps_sum += m.eps_bought;
    pay_sum += m.payment;
  }
  alloc.total_paid = pay_sum;
  auto n = static_cast<double>(alloc.members.size());
  alloc.eps_mean = n > 0 ? eps_sum / n : 0;
  alloc.payment_mean = n > 0 ? pay_sum / n : 0;
}

}  // namespace

Money FullPrice(const Subset& subset, const Dataset& dataset) {
  Money total = 0;
  for (int64_t id : subset.member_ids) {
    total += FullPriceOfOwner(dataset.owner(id));
  }
  return total;
}

SubsetAllocation AllocateUnderBudget(const Subset& subset,
                                     const Dataset& dataset, Money budget,
                                     uint64_t seed) {
  SubsetAllocation alloc;
  alloc.members.reserve(subset.member_ids.size());
  Money remainder = budget;
  for (int64_t id : subset.member_ids) {
    const DataOwner& o = dataset.owner(id);
    Money full = FullPriceOfOwner(o);
    remainder -= full;
    alloc.members.push_back({id, o.eps_max, full});
  }
  if (remainder < -kMoneyTolerance) {
    throw BudgetError("budget below the subset's full price");
  }

  // Recruit random non-members while money remains.
  if (remainder > kMoneyTolerance &&
      subset.size() < dataset.size()) {
    std::vector<int64_t> pool;
    pool.reserve(dataset.size() - subset.size());
    for (const DataOwner& o : dataset.owners()) {
      if (!subset.Contains(o.id)) pool.push_back(o.id);
    }
    Rng rng(seed);
    while (remainder > kMoneyTolerance && !pool.empty()) {
      uint64_t pick = rng.Below(pool.size());
      std::swap(pool[pick], pool.back());
      int64_t id = pool.back();
      pool.pop_back();
      const DataOwner& o = dataset.owner(id);
      Money full = FullPriceOfOwner(o);
      if (remainder >= full) {
        alloc.members.push_back({id, o.eps_max, full});
        remainder -= full;
      } else {
        // Partial recruit: hand over the exact remainder.
        alloc.members.push_back(
            {id, EpsilonOf(o.scheme, remainder), remainder});
        remainder = 0;
      }
    }
  }
  alloc.unspent = std::max(remainder, 0.0);
  FinishStats(alloc);
  return alloc;
}

SubsetAllocation AllocateOverBudget(const Subset& subset,
                                    const Dataset& dataset, Money budget) {
  int64_t s = subset.size();
  std::vector<Money> full(s);
  for (int64_t i = 0; i < s; ++i) {
    full[i] = FullPriceOfOwner(dataset.owner(subset.member_ids[i]));
  }
  std::vector<int64_t> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int64_t a, int64_t b) { return full[a] < full[b]; });

  // Waterfilling over ascending full prices. The level only rises as fully
  // paid members leave the pool, so a single sorted pass reaches the fixed
  // point: everyone cheaper than the final level is paid in full, everyone
  // else is paid the level itself.
  Money remaining = budget;
  std::vector<Money> payment(s, 0);
  int64_t paid_in_full = 0;
  while (paid_in_full < s) {
    Money level = remaining / static_cast<double>(s - paid_in_full);
    int64_t i = order[paid_in_full];
    if (full[i] > level) break;
    payment[i] = full[i];
    remaining -= full[i];
    ++paid_in_full;
  }
  Money level = paid_in_full < s
                    ? remaining / static_cast<double>(s - paid_in_full)
                    : 0;
  for (int64_t k = paid_in_full; k < s; ++k) payment[order[k]] = level;

  SubsetAllocation alloc;
  alloc.members.reserve(s);
  for (int64_t i = 0; i < s; ++i) {
    const DataOwner& o = dataset.owner(subset.member_ids[i]);
    double eps = payment[i] == full[i] ? o.eps_max
                                       : EpsilonOf(o.scheme, payment[i]);
    alloc.members.push_back({o.id, eps, payment[i]});
  }
  alloc.unspent = paid_in_full < s ? 0 : std::max(remaining, 0.0);
  FinishStats(alloc);
  return alloc;
}

SubsetAllocation Allocate(const Subset& subset, const Dataset& dataset,
                          Money budget, uint64_t seed) {
  if (!(budget > 0)) {
    throw BudgetError("allocatable budget must be positive, got " +
                      FormatDouble(budget));
  }
  if (subset.size() < 1) {
    throw InfeasibleError("cannot allocate to an empty subset");
  }
  Money full = FullPrice(subset, dataset);
  if (budget >= full) {
    return AllocateUnderBudget(subset, dataset, budget, seed);
  }
  return AllocateOverBudget(subset, dataset, budget);
}

}  // namespace pdmarket
