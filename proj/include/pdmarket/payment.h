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

#ifndef PDMARKET_PAYMENT_H_
#define PDMARKET_PAYMENT_H_

#include "pdmarket/types.h"

namespace pdmarket {

// Compensation curves mapping privacy loss eps >= 0 to a payment, and back.
//
// Type A (concave, risk-conservative owners):
//   w = log10(30) * ln(9000 eps + 1) / 130
// Type B (sigmoid-like, risk-liberal owners):
//   w = 8 eps / sqrt(1100 + 500 eps^2)
//
// Both are strictly increasing with w(0) = 0, so PriceOf and EpsilonOf are
// exact inverses on their domains. Type B payments approach
// kTypeBSaturation from below as eps grows without bound; EpsilonOf for
// Type B is only defined for payments strictly below that bound.
inline constexpr double kTypeBSaturation =
    0.35777087639996635;  // 8 / sqrt(500)

// Payment owed for a privacy loss of eps under the scheme.
// Throws DomainError for negative or non-finite eps.
Money PriceOf(Scheme scheme, double eps);

// Privacy loss purchasable with `payment` under the scheme. Inverse of
// PriceOf. Throws DomainError for negative, non-finite, or (Type B)
// saturated payments.
double EpsilonOf(Scheme scheme, Money payment);

}  // namespace pdmarket

#endif  // PDMARKET_PAYMENT_H_
