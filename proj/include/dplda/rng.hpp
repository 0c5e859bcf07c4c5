// Copyright 2026 The dplda Authors
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

#ifndef DPLDA_RNG_HPP_
#define DPLDA_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace dplda {

// Every random stream in the library is a 64-bit Mersenne twister. Streams
// are never shared between components: each one is seeded from the run seed
// and a fixed label via derive_seed().
using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Expands a run seed into an independent stream seed.
///
/// The lineage is splitmix64(splitmix64(seed ^ fnv1a(label)) ^ index), so a
/// port to another language can reproduce the seed tree without sharing code.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                    std::uint64_t index = 0) {
  return detail::splitmix64(detail::splitmix64(seed ^ detail::fnv1a(label)) ^
                            index);
}

/// Hash of a token sequence, used to seed per-document streams independently
/// of document order.
inline std::uint64_t hash_tokens(std::span<const std::uint32_t> tokens) {
  std::uint64_t h = 0x84222325cbf29ce4ULL ^ tokens.size();
  for (std::uint32_t t : tokens) h = detail::splitmix64(h ^ t);
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dplda

#endif  // DPLDA_RNG_HPP_
