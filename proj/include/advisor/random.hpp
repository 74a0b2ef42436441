// Copyright 2026 The Advisor Authors
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

#ifndef ADVISOR_RANDOM_HPP_
#define ADVISOR_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace advisor {

// Portable random stream: std::mt19937_64 is fully specified by the
// standard, the distributions below are written out so that the same seed
// yields the same numbers with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, bound) without modulo bias.
  std::uint64_t Below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

  // Standard normal by Box-Muller.
  double Normal();

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from (master, index) with splitmix64.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

}  // namespace advisor

#endif  // ADVISOR_RANDOM_HPP_
