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

#include "gtest/gtest.h"
#include "pdmarket/errors.h"

namespace pdmarket {
namespace {

// High-precision reference evaluations of both curves.
TEST(PaymentTest, TypeAReferenceValues) {
  EXPECT_NEAR(PriceOf(Scheme::kTypeA, 0.1), 0.0773046324816173, 1e-12);
  EXPECT_NEAR(PriceOf(Scheme::kTypeA, 0.3), 0.0897791725449821, 1e-12);
  EXPECT_NEAR(PriceOf(Scheme::kTypeA, 1.0), 0.1034563337309900, 1e-12);
  EXPECT_EQ(PriceOf(Scheme::kTypeA, 0.0), 0.0);
}

TEST(PaymentTest, TypeBReferenceValues) {
  EXPECT_NEAR(PriceOf(Scheme::kTypeB, 0.7), 0.1526957272817790, 1e-12);
  EXPECT_NEAR(PriceOf(Scheme::kTypeB, 0.9), 0.1855941344015280, 1e-12);
  EXPECT_NEAR(PriceOf(Scheme::kTypeB, 1.0), 0.2, 1e-15);
  EXPECT_EQ(PriceOf(Scheme::kTypeB, 0.0), 0.0);
}

TEST(PaymentTest, SaturationConstant) {
  EXPECT_NEAR(kTypeBSaturation, 8.0 / std::sqrt(500.0), 1e-16);
  // The curve approaches but never reaches the bound.
  EXPECT_LT(PriceOf(Scheme::kTypeB, 1e6), kTypeBSaturation);
  EXPECT_GT(PriceOf(Scheme::kTypeB, 1e6), 0.9999 * kTypeBSaturation);
}

TEST(PaymentTest, InverseReferenceValues) {
  EXPECT_NEAR(EpsilonOf(Scheme::kTypeA, 0.0773046324816173), 0.1, 1e-12);
  EXPECT_NEAR(EpsilonOf(Scheme::kTypeB, 0.2), 1.0, 1e-12);
  EXPECT_NEAR(EpsilonOf(Scheme::kTypeB, 0.1), 0.4317877695883730, 1e-12);
  EXPECT_EQ(EpsilonOf(Scheme::kTypeA, 0.0), 0.0);
  EXPECT_EQ(EpsilonOf(Scheme::kTypeB, 0.0), 0.0);
}

TEST(PaymentTest, RoundTripsOnEpsGrid) {
  for (Scheme scheme : {Scheme::kTypeA, Scheme::kTypeB}) {
    for (int i = 0; i <= 200; ++i) {
      double eps = std::pow(10.0, -6.0 + 7.0 * i / 200.0);  // 1e-6 .. 10
      double eps_back = EpsilonOf(scheme, PriceOf(scheme, eps));
      EXPECT_NEAR(eps_back, eps, 1e-9 * std::max(1.0, eps))
          << "scheme " << ToString(scheme) << " eps " << eps;
    }
  }
}

TEST(PaymentTest, RoundTripsNearTypeBSaturation) {
  for (int k = 1; k <= 10; ++k) {
    double payment = kTypeBSaturation * (1.0 - std::pow(10.0, -k));
    double back = PriceOf(Scheme::kTypeB, EpsilonOf(Scheme::kTypeB, payment));
    EXPECT_NEAR(back, payment, 1e-9) << "k=" << k;
  }
}

TEST(PaymentTest, StrictlyIncreasing) {
  for (Scheme scheme : {Scheme::kTypeA, Scheme::kTypeB}) {
    double prev = PriceOf(scheme, 0.0);
    for (int i = 1; i <= 100; ++i) {
      double w = PriceOf(scheme, i * 0.01);
      EXPECT_GT(w, prev);
      prev = w;
    }
  }
}

TEST(PaymentTest, CurvesCrossBetweenLowAndHighEps) {
  // Type A pays more for small losses, Type B more for large ones.
  EXPECT_GT(PriceOf(Scheme::kTypeA, 0.1), PriceOf(Scheme::kTypeB, 0.1));
  EXPECT_LT(PriceOf(Scheme::kTypeA, 0.9), PriceOf(Scheme::kTypeB, 0.9));
}

TEST(PaymentTest, DomainErrors) {
  EXPECT_THROW(PriceOf(Scheme::kTypeA, -0.1), DomainError);
  EXPECT_THROW(PriceOf(Scheme::kTypeB, -1e-12), DomainError);
  EXPECT_THROW(PriceOf(Scheme::kTypeA, std::nan("")), DomainError);
  EXPECT_THROW(EpsilonOf(Scheme::kTypeA, -0.1), DomainError);
  EXPECT_THROW(EpsilonOf(Scheme::kTypeB, kTypeBSaturation), DomainError);
  EXPECT_THROW(EpsilonOf(Scheme::kTypeB, 0.5), DomainError);
  EXPECT_NO_THROW(EpsilonOf(Scheme::kTypeA, 0.5));
}

TEST(SchemeTest, WireTags) {
  EXPECT_EQ(ToString(Scheme::kTypeA), "A");
  EXPECT_EQ(ToString(Scheme::kTypeB), "B");
  EXPECT_EQ(SchemeFromString("A"), Scheme::kTypeA);
  EXPECT_EQ(SchemeFromString("B"), Scheme::kTypeB);
  EXPECT_THROW(SchemeFromString("C"), ParseError);
  EXPECT_THROW(SchemeFromString("a"), ParseError);
  EXPECT_THROW(SchemeFromString(""), ParseError);
}

}  // namespace
}  // namespace pdmarket
