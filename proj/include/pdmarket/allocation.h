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

#ifndef PDMARKET_ALLOCATION_H_
#define PDMARKET_ALLOCATION_H_

#include <cstdint>
#include <vector>

#include "pdmarket/sampling.h"
#include "pdmarket/types.h"

namespace pdmarket {

struct OwnerAllocation {
  int64_t owner_id = 0;
  double eps_bought = 0;  // privacy loss purchased, <= owner's eps_max
  Money payment = 0;      // PriceOf(scheme, eps_bought)
};

// Outcome of spending a budget on one candidate subset. The members list
// may be longer than the subset that was passed in: when the budget exceeds
// the subset's full price, extra owners are recruited at random until the
// money is used up or the whole dataset participates.
struct SubsetAllocation {
  std::vector<OwnerAllocation> members;
  Money total_paid = 0;    // sum of payments
  Money unspent = 0;       // leftover returned to the buyer
  double eps_mean = 0;     // mean purchased eps across members
  Money payment_mean = 0;  // mean payment across members

  int64_t size() const { return static_cast<int64_t>(members.size()); }
};

// Sum of every member's price at full privacy loss (eps = eps_max).
Money FullPrice(const Subset& subset, const Dataset& dataset);

// Budget >= full price: every member is paid in full; the remainder
// recruits uniformly random non-members one at a time, each at full price,
// until the remainder funds the next recruit only partially (that recruit
// is paid the exact remainder) or everyone in the dataset participates
// (the leftover is returned). Spends the budget exactly in the first case.
SubsetAllocation AllocateUnderBudget(const Subset& subset,
                                     const Dataset& dataset, Money budget,
                                     uint64_t seed);

// Budget < full price: waterfilling. Repeatedly offer every still-active
// member the level budget/|active|; members whose full price is at or
// under the level are paid that full price and leave the pool, and the
// level is recomputed from what remains. At the fixed point everyone still
// active is paid exactly the final level. Spends the budget exactly.
SubsetAllocation AllocateOverBudget(const Subset& subset,
                                    const Dataset& dataset, Money budget);

// Dispatches on budget vs. FullPrice. Throws BudgetError for budget <= 0.
SubsetAllocation Allocate(const Subset& subset, const Dataset& dataset,
                          Money budget, uint64_t seed);

}  // namespace pdmarket

#endif  // PDMARKET_ALLOCATION_H_
