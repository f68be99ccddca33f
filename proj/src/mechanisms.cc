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

#include "pdmarket/mechanisms.h"

#include <algorithm>
#include <cmath>

#include "pdmarket/errors.h"
#include "pdmarket/types.h"

namespace pdmarket {
namespace {

// Cumulative distribution for inverse-CDF sampling.
std::vector<double> Cumulative(const CountDistribution& dist) {
  std::vector<double> cum(dist.probabilities.size());
  double acc = 0;
  for (size_t r = 0; r < dist.probabilities.size(); ++r) {
    acc += dist.probabilities[r];
    cum[r] = acc;
  }
  cum.back() = 1.0;
  return cum;
}

int64_t InvertCdf(const std::vector<double>& cum, double u) {
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) --it;
  return static_cast<int64_t>(it - cum.begin());
}

// Uniform double in (0, 1), both endpoints excluded.
double Uniform01Open(Rng& rng) {
  return (static_cast<double>(rng.Next() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

CountDistribution BuildCountDistribution(const std::vector<uint8_t>& flags,
                                         const std::vector<double>& eps) {
  if (flags.size() != eps.size()) {
    throw DomainError("flags and eps must have equal length");
  }
  if (flags.empty()) {
    throw DomainError("cannot build a distribution over zero participants");
  }
  std::vector<double> eps_match;
  std::vector<double> eps_other;
  for (size_t i = 0; i < flags.size(); ++i) {
    if (flags[i] != 0 && flags[i] != 1) {
      throw DomainError("predicate flags must be 0 or 1");
    }
    if (!(eps[i] > 0) || !std::isfinite(eps[i])) {
      throw DomainError("privacy levels must be positive and finite");
    }
    (flags[i] ? eps_match : eps_other).push_back(eps[i]);
  }
  std::sort(eps_match.begin(), eps_match.end());
  std::sort(eps_other.begin(), eps_other.end());

  auto n = static_cast<int64_t>(flags.size());
  auto c = static_cast<int64_t>(eps_match.size());

  // Score d(r) <= 0: minus the cheapest total privacy loss that moves the
  // count from c to r, i.e. a prefix sum of the sorted levels on the side
  // being flipped. Weights exp(d(r) / 2) never exceed 1, so the plain sum
  // is stable and the true count carries the largest weight.
  std::vector<double> weight(static_cast<size_t>(n) + 1);
  weight[c] = 1.0;
  double prefix = 0;
  for (int64_t k = 1; k <= c; ++k) {
    prefix += eps_match[k - 1];  // smallest first
    weight[c - k] = std::exp(-prefix / 2.0);
  }
  prefix = 0;
  for (int64_t k = 1; k <= n - c; ++k) {
    prefix += eps_other[k - 1];
    weight[c + k] = std::exp(-prefix / 2.0);
  }

  double total = 0;
  for (double w : weight) total += w;
  CountDistribution dist;
  dist.true_count = c;
  dist.probabilities.resize(weight.size());
  for (size_t r = 0; r < weight.size(); ++r) {
    dist.probabilities[r] = weight[r] / total;
  }
  return dist;
}

int64_t SampleCount(const CountDistribution& dist, uint64_t seed) {
  Rng rng(seed);
  return InvertCdf(Cumulative(dist), rng.Uniform01());
}

double ScaleAnswer(double raw_count, int64_t population, int64_t subset_size) {
  if (subset_size < 1 || population < subset_size) {
    throw DomainError("invalid population/subset sizes for scaling");
  }
  return raw_count * static_cast<double>(population) /
         static_cast<double>(subset_size);
}

double DistributionMeanScaled(const CountDistribution& dist,
                              int64_t population, int64_t subset_size) {
  double mean = 0;
  for (size_t r = 0; r < dist.probabilities.size(); ++r) {
    mean += dist.probabilities[r] * static_cast<double>(r);
  }
  return ScaleAnswer(mean, population, subset_size);
}

double ExactRmse(const CountDistribution& dist, int64_t population,
                 int64_t subset_size, double true_answer) {
  double mse = 0;
  for (size_t r = 0; r < dist.probabilities.size(); ++r) {
    double err =
        ScaleAnswer(static_cast<double>(r), population, subset_size) -
        true_answer;
    mse += dist.probabilities[r] * err * err;
  }
  return std::sqrt(mse);
}

double MonteCarloRmse(const CountDistribution& dist, int64_t population,
                      int64_t subset_size, double true_answer, int64_t runs,
                      uint64_t seed) {
  if (runs < 1) throw DomainError("Monte Carlo runs must be positive");
  std::vector<double> cum = Cumulative(dist);
  Rng rng(seed);
  double mse = 0;
  for (int64_t i = 0; i < runs; ++i) {
    auto r = static_cast<double>(InvertCdf(cum, rng.Uniform01()));
    double err = ScaleAnswer(r, population, subset_size) - true_answer;
    mse += err * err;
  }
  return std::sqrt(mse / static_cast<double>(runs));
}

double LaplaceQuantile(double u, double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw DomainError("Laplace scale must be positive and finite");
  }
  if (!(u > 0) || !(u < 1)) {
    throw DomainError("Laplace quantile needs u in (0, 1)");
  }
  double r = u - 0.5;
  if (r == 0) return 0;
  double sign = r > 0 ? 1.0 : -1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(r));
}

double SampleLaplace(double scale, Rng& rng) {
  return LaplaceQuantile(Uniform01Open(rng), scale);
}

double SampleLaplace(double scale, uint64_t seed) {
  Rng rng(seed);
  return SampleLaplace(scale, rng);
}

PrivacyAudit AuditPerOwnerPrivacy(const std::vector<uint8_t>& flags,
                                  const std::vector<double>& eps) {
  CountDistribution base = BuildCountDistribution(flags, eps);
  PrivacyAudit audit;
  audit.pass = true;
  double worst_quotient = 0;
  for (size_t i = 0; i < flags.size(); ++i) {
    std::vector<uint8_t> flipped = flags;
    flipped[i] ^= 1;
    CountDistribution other = BuildCountDistribution(flipped, eps);
    double allowed = std::exp(eps[i]);
    for (size_t r = 0; r < base.probabilities.size(); ++r) {
      double p = base.probabilities[r];
      double q = other.probabilities[r];
      double ratio = std::max(p / q, q / p);
      if (ratio / allowed > worst_quotient) {
        worst_quotient = ratio / allowed;
        audit.worst_ratio = ratio;
        audit.worst_allowed = allowed;
        audit.worst_owner = static_cast<int64_t>(i);
        audit.worst_output = static_cast<int64_t>(r);
      }
    }
  }
  audit.pass = worst_quotient <= 1.0 + 1e-9;
  return audit;
}

}  // namespace pdmarket
