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

#ifndef PDMARKET_RNG_H_
#define PDMARKET_RNG_H_

#include <cstdint>
#include <initializer_list>

namespace pdmarket {

// Deterministic splitmix64 stream. All randomness in the library flows
// through this type so that runs are reproducible bit-for-bit across
// platforms and compilers; std::random distributions are never used.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  // Next raw 64-bit word.
  uint64_t Next();

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double Uniform01();

  // Uniform integer in [0, n), unbiased (multiply-shift with rejection).
  // n must be positive.
  uint64_t Below(uint64_t n);

 private:
  uint64_t state_;
};

// Order-sensitive combination of seed material. Children of one master seed
// get independent streams per (role tag, index) regardless of the order the
// streams are later consumed in.
uint64_t MixSeed(uint64_t a, uint64_t b);
uint64_t ChainSeed(std::initializer_list<uint64_t> parts);

// Stable 64-bit hash of a byte string, for seed material derived from text.
uint64_t HashBytes(const void* data, uint64_t size);

}  // namespace pdmarket

#endif  // PDMARKET_RNG_H_
