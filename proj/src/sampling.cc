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

#include "pdmarket/sampling.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "pdmarket/errors.h"
#include "pdmarket/rng.h"

namespace pdmarket {
namespace {

constexpr uint64_t kSubsetTag = 0x7375627365740001ULL;

}  // namespace

void SamplingConfig::Validate() const {
  if (!(trait_proportion > 0) || !(trait_proportion <= 0.25)) {
    throw SchemaError("trait proportion must lie in (0, 0.25]");
  }
  if (!(confidence_level_score > 0)) {
    throw SchemaError("confidence level score must be positive");
  }
  if (!(margin_of_error > 0) || !(margin_of_error < 1)) {
    throw SchemaError("margin of error must lie in (0, 1)");
  }
  if (subsets_per_trade < 1) {
    throw SchemaError("subsets per trade must be at least 1");
  }
}

int64_t RepresentativeSize(int64_t population, const SamplingConfig& config) {
  config.Validate();
  if (population < 1) {
    throw DomainError("population must be positive, got " +
                      std::to_string(population));
  }
  double z = config.confidence_level_score / config.margin_of_error;
  double ss = config.trait_proportion * z * z;
  double n = static_cast<double>(population);
  double corrected = ss * n / (ss + n - 1.0);
  auto size = static_cast<int64_t>(std::ceil(corrected));
  return std::min(size, population);
}

bool Subset::Contains(int64_t id) const {
  return std::binary_search(member_ids.begin(), member_ids.end(), id);
}

Subset DrawSubset(const Dataset& dataset, int64_t size, uint64_t seed) {
  int64_t n = dataset.size();
  if (size < 1 || size > n) {
    throw DomainError("subset size " + std::to_string(size) +
                      " out of range for dataset of " + std::to_string(n));
  }
  Rng rng(seed);
  // Floyd's sampling: uniform over size-subsets, O(size) draws.
  std::unordered_set<int64_t> picked;
  picked.reserve(static_cast<size_t>(size) * 2);
  for (int64_t j = n - size; j < n; ++j) {
    auto t = static_cast<int64_t>(rng.Below(static_cast<uint64_t>(j) + 1));
    if (!picked.insert(t).second) picked.insert(j);
  }
  Subset subset;
  subset.member_ids.reserve(picked.size());
  for (int64_t index : picked) {
    subset.member_ids.push_back(dataset.owners()[index].id);
  }
  std::sort(subset.member_ids.begin(), subset.member_ids.end());
  return subset;
}

std::vector<Subset> DrawSubsets(const Dataset& dataset, int64_t size,
                                int count, uint64_t seed) {
  std::vector<Subset> out;
  out.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    out.push_back(DrawSubset(
        dataset, size, ChainSeed({seed, kSubsetTag, static_cast<uint64_t>(k)})));
  }
  return out;
}

}  // namespace pdmarket
