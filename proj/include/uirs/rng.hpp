// Copyright 2026 The uirs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace uirs {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a, used to turn purpose tags into stream keys.
inline constexpr std::uint64_t tag_hash(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/**
 * Counter-based SplitMix64 stream: output k is mix(key + (k+1) * golden).
 *
 * Streams are addressed by (master seed, purpose tag, index), so any draw
 * can be regenerated independently of worker count or scheduling. Satisfies
 * UniformRandomBitGenerator, but the library only uses its own `uniform` and
 * `below` so results do not depend on the standard library's distributions.
 */
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key = 0) : key_(splitmix64_mix(key)) {}

  static RandomStream derive(std::uint64_t master_seed, std::string_view tag,
                             std::uint64_t index = 0) {
    std::uint64_t k = splitmix64_mix(master_seed ^ 0x6a09e667f3bcc909ULL);
    k = splitmix64_mix(k ^ tag_hash(tag));
    k = splitmix64_mix(k ^ (index * 0x9e3779b97f4a7c15ULL + 0x3c6ef372fe94f82bULL));
    return RandomStream(k);
  }

  /// Child stream keyed by this stream's key and `index`; does not advance.
  RandomStream substream(std::uint64_t index) const {
    return RandomStream(key_ ^ splitmix64_mix(index + 0xa54ff53a5f1d36f1ULL));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound), unbiased (rejection on the top range).
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = max() - (max() % bound);
    std::uint64_t v = 0;
    do {
      v = (*this)();
    } while (v >= limit);
    return v % bound;
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace uirs
