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

#ifndef PDMARKET_SAMPLING_H_
#define PDMARKET_SAMPLING_H_

#include <cstdint>
#include <vector>

#include "pdmarket/types.h"

namespace pdmarket {

// Survey-sampling parameters. Defaults: 25% population proportion
// (variance-maximizing prior scaled by the 0.5 deviation), 95% confidence
// (z = 1.96), 5% margin of error, 5 candidate subsets per trade.
struct SamplingConfig {
  double trait_proportion = 0.25;
  double confidence_level_score = 1.96;
  double margin_of_error = 0.05;
  int subsets_per_trade = 5;

  void Validate() const;  // SchemaError on out-of-range fields
};

// Number of owners a representative sample needs for a population of the
// given size, with finite-population correction:
//
//   ss    = trait_proportion * (z / margin)^2
//   size  = ceil(ss * n / (ss + n - 1))
//
// Monotone in n and bounded by ceil(ss); 243000 owners yield 384 at the
// default parameters. Throws DomainError when population < 1.
int64_t RepresentativeSize(int64_t population, const SamplingConfig& config);

// A subset of a dataset's owners, kept sorted by owner id.
struct Subset {
  std::vector<int64_t> member_ids;

  int64_t size() const { return static_cast<int64_t>(member_ids.size()); }
  bool Contains(int64_t id) const;
};

// Uniform random subset of `size` distinct owners (Floyd's algorithm).
// Throws DomainError when size is not in [1, dataset.size()].
Subset DrawSubset(const Dataset& dataset, int64_t size, uint64_t seed);

// Independent candidate subsets for one trade, one per child seed.
std::vector<Subset> DrawSubsets(const Dataset& dataset, int64_t size,
                                int count, uint64_t seed);

}  // namespace pdmarket

#endif  // PDMARKET_SAMPLING_H_
