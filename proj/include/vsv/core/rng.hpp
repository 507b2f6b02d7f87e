// vsv/core/rng.hpp

// Copyright 2026  The vsv authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef VSV_CORE_RNG_HPP_
#define VSV_CORE_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace vsv {

// Deterministic random source.  mt19937_64 output is fixed by the standard,
// and the uniform/normal transforms below are spelled out explicitly, so a
// given seed produces the same stream on every platform.  The distribution
// classes in <random> are implementation defined and must not be used where
// byte reproducibility matters.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t NextU64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer on [0, n).  Plain modulo; the bias is irrelevant for the
  // n used here and the rule is trivially portable.
  std::int64_t UniformInt(std::int64_t n) {
    return static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(n));
  }

  // Standard normal via Box-Muller.  Pairs are generated together and the
  // second value cached, so draws come in a fixed order.
  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = Uniform();
    double u2 = Uniform();
    // Guard against log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  template <typename T>
  void Shuffle(std::vector<T> *v) {
    // Fisher-Yates with our own index draws; std::shuffle's use of the
    // engine is unspecified.
    for (std::int64_t i = static_cast<std::int64_t>(v->size()) - 1; i > 0;
         --i) {
      std::int64_t j = UniformInt(i + 1);
      std::swap((*v)[static_cast<std::size_t>(i)],
                (*v)[static_cast<std::size_t>(j)]);
    }
  }

  // splitmix64 finalizer, used to derive well-separated child seeds from a
  // parent seed plus stream indices.
  static std::uint64_t Mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t Mix(std::uint64_t a, std::uint64_t b) {
    return Mix(Mix(a) ^ b);
  }

  // FNV-1a, for deriving seeds from string keys (speaker/phrase/session
  // names).  Stability of this hash across builds is part of the
  // reproducibility contract, which rules out std::hash.
  static std::uint64_t HashBytes(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vsv

#endif  // VSV_CORE_RNG_HPP_
