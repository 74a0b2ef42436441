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

#ifndef ADVISOR_TESTS_UNIT_TEST_UTIL_HPP_
#define ADVISOR_TESTS_UNIT_TEST_UTIL_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "advisor/lottery.hpp"
#include "advisor/random.hpp"

namespace advisor::testing {

inline BreakpointGrid RandomGrid(Rng& rng, std::size_t n, double bbar) {
  std::vector<double> pts{0.0, bbar};
  while (pts.size() < n) {
    const double y = rng.Uniform(0.0, bbar);
    if (std::none_of(pts.begin(), pts.end(),
                     [&](double p) { return std::abs(p - y) < 1e-3 * bbar; })) {
      pts.push_back(y);
    }
  }
  std::sort(pts.begin(), pts.end());
  return BreakpointGrid(pts);
}

// Normalized concave utility with random nonincreasing slopes.
inline PwlUtility RandomUtility(Rng& rng, const BreakpointGrid& g) {
  const std::size_t n = g.size();
  std::vector<double> s(n - 1);
  for (double& x : s) x = rng.Uniform() < 0.2 ? 0.0 : rng.Uniform();
  std::sort(s.rbegin(), s.rend());
  if (s[0] == 0.0) s[0] = 1.0;
  double mass = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) mass += s[j] * g.width(j);
  std::vector<double> alpha(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    alpha[j + 1] = alpha[j] + s[j] * g.width(j) / mass;
  }
  alpha.back() = 1.0;
  return PwlUtility::FromAlpha(g, alpha);
}

inline std::string DataPath(const std::string& name) {
  return std::string(ADVISOR_DATA_DIR) + "/" + name;
}

}  // namespace advisor::testing

#endif  // ADVISOR_TESTS_UNIT_TEST_UTIL_HPP_
