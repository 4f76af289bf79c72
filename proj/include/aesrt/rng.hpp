// Copyright 2026 The aesrt Authors
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

#pragma once

// Seeded randomness with a bit-exact stream on every platform.
//
// std::mt19937_64 is fully specified by the standard, but the standard
// distributions are not, so bounded draws and shuffles are implemented here.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace aesrt {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Incremental 64-bit digest used for seeds and cache keys. Each field is
/// length-prefixed so ("ab","c") and ("a","bc") hash differently.
class Digest {
 public:
  Digest& add(std::string_view s) noexcept {
    add_raw(s.size());
    h_ = fnv1a64(s, h_);
    return *this;
  }
  Digest& add(std::uint64_t v) noexcept {
    add_raw(v);
    return *this;
  }
  Digest& add(std::int64_t v) noexcept { return add(static_cast<std::uint64_t>(v)); }
  Digest& add(int v) noexcept { return add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
  Digest& add(bool v) noexcept { return add(static_cast<std::uint64_t>(v ? 1 : 0)); }

  std::uint64_t value() const noexcept { return splitmix64(h_); }

  std::string hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::uint64_t v = value();
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
      v >>= 4;
    }
    return out;
  }

 private:
  void add_raw(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xff;
      h_ *= kFnvPrime;
    }
  }

  std::uint64_t h_ = kFnvOffset;
};

/// Per-response seed: responses are perturbed independently but reproducibly.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view original_id,
                                 std::string_view test_name) {
  return Digest{}.add(base_seed).add(original_id).add(test_name).value();
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = index(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  template <typename T>
  const T& pick(std::span<const T> items) {
    return items[index(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aesrt
