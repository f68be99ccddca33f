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

#ifndef PDMARKET_MECHANISMS_H_
#define PDMARKET_MECHANISMS_H_

#include <cstdint>
#include <map>
#include <vector>

#include "pdmarket/rng.h"

namespace pdmarket {

// Per-owner privacy guarantees a released answer must respect.
using PrivacySpec = std::map<int64_t, double>;

// Exponential-mechanism output distribution for a counting query under
// per-owner privacy levels. Outputs are the raw counts 0..n for n
// participants. An output r != c (the true count) is scored by the
// cheapest set of record changes that could have produced it: flipping a
// matching record to non-matching consumes that owner's eps, and vice
// versa. With score d(r) (always <= 0, and 0 at r = c),
//
//   Pr[r] = exp(d(r) / 2) / sum_q exp(d(q) / 2)
//
// so the true count is always the mode.
struct CountDistribution {
  std::vector<double> probabilities;  // index r in [0, n]
  int64_t true_count = 0;

  int64_t support() const {
    return static_cast<int64_t>(probabilities.size());
  }
};

// Builds the distribution from per-participant predicate flags and
// positive privacy levels. flags[i] is 1 when participant i matches the
// query. Throws DomainError on size mismatch or non-positive eps.
CountDistribution BuildCountDistribution(const std::vector<uint8_t>& flags,
                                         const std::vector<double>& eps);

// One draw from the distribution (inverse CDF over the seeded stream).
int64_t SampleCount(const CountDistribution& dist, uint64_t seed);

// Population-scale projection of a subset count.
double ScaleAnswer(double raw_count, int64_t population, int64_t subset_size);

// Expectation of the scaled answer under the distribution.
double DistributionMeanScaled(const CountDistribution& dist,
                              int64_t population, int64_t subset_size);

// Root-mean-square error of the scaled released answer against the true
// population answer: exact expectation over the output distribution, or a
// Monte Carlo estimate over `runs` draws.
double ExactRmse(const CountDistribution& dist, int64_t population,
                 int64_t subset_size, double true_answer);
double MonteCarloRmse(const CountDistribution& dist, int64_t population,
                      int64_t subset_size, double true_answer, int64_t runs,
                      uint64_t seed);

// Laplace(0, scale) via the inverse CDF; u = 0.5 maps to exactly 0.
double LaplaceQuantile(double u, double scale);
double SampleLaplace(double scale, Rng& rng);
double SampleLaplace(double scale, uint64_t seed);

// Checks that flipping any single participant's flag changes output
// probabilities by at most a factor exp(eps[i]), the per-owner guarantee.
// Intended for small n (it rebuilds the distribution n times).
struct PrivacyAudit {
  double worst_ratio = 0;     // max over owners/outputs of the bounded ratio
  double worst_allowed = 0;   // exp(eps) of the owner attaining it
  int64_t worst_owner = -1;
  int64_t worst_output = -1;
  bool pass = false;          // worst_ratio <= worst_allowed (with slack)
};
PrivacyAudit AuditPerOwnerPrivacy(const std::vector<uint8_t>& flags,
                                  const std::vector<double>& eps);

}  // namespace pdmarket

#endif  // PDMARKET_MECHANISMS_H_
