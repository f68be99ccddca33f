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

#include "pdmarket/rng.h"

namespace pdmarket {
namespace {

uint64_t SplitMix64Step(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t Rng::Next() { return SplitMix64Step(state_); }

double Rng::Uniform01() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

uint64_t Rng::Below(uint64_t n) {
  // Lemire's multiply-shift, with rejection to remove modulo bias.
  unsigned __int128 m = static_cast<unsigned __int128>(Next()) * n;
  auto lo = static_cast<uint64_t>(m);
  if (lo < n) {
    uint64_t threshold = -n % n;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(Next()) * n;
      lo = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

uint64_t MixSeed(uint64_t a, uint64_t b) {
  // Feed both words through the splitmix64 permutation; asymmetric in
  // (a, b) so role tags and indices do not collide under swap.
  uint64_t state = a;
  uint64_t x = SplitMix64Step(state);
  state = x ^ (b + 0x632be59bd9b4e019ULL);
  return SplitMix64Step(state);
}

uint64_t ChainSeed(std::initializer_list<uint64_t> parts) {
  uint64_t acc = 0x8f14e8e4d2a7f3b1ULL;
  for (uint64_t p : parts) acc = MixSeed(acc, p);
  return acc;
}

uint64_t HashBytes(const void* data, uint64_t size) {
  // FNV-1a, then a splitmix64 finalizer for avalanche.
  const auto* bytes = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (uint64_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return MixSeed(h, size);
}

}  // namespace pdmarket
