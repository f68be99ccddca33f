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

#include "pdmarket/payment.h"

#include <cmath>

#include "pdmarket/errors.h"

namespace pdmarket {
namespace {

// log10(30), the Type A scale factor.
const double kLog10Of30 = std::log10(30.0);

}  // namespace

Money PriceOf(Scheme scheme, double eps) {
  if (!(eps >= 0) || !std::isfinite(eps)) {
    throw DomainError("eps must be finite and non-negative, got " +
                      FormatDouble(eps));
  }
  if (scheme == Scheme::kTypeA) {
    return kLog10Of30 * std::log(9000.0 * eps + 1.0) / 130.0;
  }
  return 8.0 * eps / std::sqrt(1100.0 + 500.0 * eps * eps);
}

double EpsilonOf(Scheme scheme, Money payment) {
  if (!(payment >= 0) || !std::isfinite(payment)) {
    throw DomainError("payment must be finite and non-negative, got " +
                      FormatDouble(payment));
  }
  if (scheme == Scheme::kTypeA) {
    return std::expm1(130.0 * payment / kLog10Of30) / 9000.0;
  }
  if (payment >= kTypeBSaturation) {
    throw DomainError("payment " + FormatDouble(payment) +
                      " is at or beyond the Type B saturation " +
                      FormatDouble(kTypeBSaturation));
  }
  // Invert w = 8 eps / sqrt(1100 + 500 eps^2):
  //   eps = w * sqrt(1100 / (64 - 500 w^2))
  return payment * std::sqrt(1100.0 / (64.0 - 500.0 * payment * payment));
}

}  // namespace pdmarket
