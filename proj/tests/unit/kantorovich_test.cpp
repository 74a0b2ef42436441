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

#include "advisor/kantorovich.hpp"

#include <cmath>
#include <vector>

#include "advisor/error.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace advisor {
namespace {

using testing::RandomGrid;
using testing::RandomUtility;

PwlUtility HalfGrid(double b1) {
  return PwlUtility::FromAlpha(BreakpointGrid({0.0, 0.5, 1.0}),
                               {0.0, 0.5 * b1, 1.0});
}

// Midpoint rule on a fine mesh as an independent oracle.
double NumericL1(const PwlUtility& u, const PwlUtility& v) {
  const int steps = 200000;
  const double b = u.bbar();
  double total = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double y = (k + 0.5) / steps * b;
    total += std::abs(EvalUtility(u, y) - EvalUtility(v, y));
  }
  return total / steps;
}

// Distance from the dual program with the slopes of u held fixed.
double DualDistance(const PwlUtility& u, const PwlUtility& v) {
  ConicProgram p;
  std::vector<LinExpr> slopes;
  for (double s : u.NormalizedSlopes()) slopes.emplace_back(s);
  const std::vector<double> target = v.NormalizedSlopes();
  LinExpr value = AddKantorovichDual(p, u.grid(), slopes, target, "k");
  p.SetObjective(Sense::kMinimize, value);
  SolveResult r = Solve(p);
  EXPECT_TRUE(r.optimal()) << r.message;
  return r.objective;
}

TEST(KantorovichTest, SteepVersusLinear) {
  PwlUtility lin = HalfGrid(1.0);
  PwlUtility steep = HalfGrid(2.0);
  EXPECT_NEAR(KantorovichClosedForm(lin, steep).value, 0.25, 1e-15);
  EXPECT_NEAR(KantorovichSocp(lin, steep).value, 0.25, 1e-7);
  EXPECT_NEAR(DualDistance(lin, steep), 0.25, 1e-7);
}

TEST(KantorovichTest, IdenticalUtilitiesAreAtZero) {
  PwlUtility u = HalfGrid(1.4);
  EXPECT_EQ(KantorovichClosedForm(u, u).value, 0.0);
  EXPECT_NEAR(KantorovichSocp(u, u).value, 0.0, 1e-8);
}

TEST(KantorovichTest, SingleSlopeChangeEnclosesTriangle) {
  // Linear vs a utility with slopes 1.5 then 0.5 (kink at 0.5): the gap
  // grows to 0.25 at the kink and closes linearly, enclosing area 0.125.
  PwlUtility lin = HalfGrid(1.0);
  PwlUtility kinked = HalfGrid(1.5);
  EXPECT_NEAR(KantorovichClosedForm(lin, kinked).value, 0.125, 1e-15);
  EXPECT_NEAR(NumericL1(lin, kinked), 0.125, 1e-9);
}

TEST(KantorovichTest, CrossingSegmentsMatchNumericIntegral) {
  BreakpointGrid g({0.0, 0.2, 0.7, 1.0});
  PwlUtility u = PwlUtility::FromAlpha(g, {0.0, 0.5, 0.9, 1.0});
  PwlUtility v = PwlUtility::FromAlpha(g, {0.0, 0.3, 0.95, 1.0});
  EXPECT_NEAR(KantorovichClosedForm(u, v).value, NumericL1(u, v), 1e-9);
}

TEST(KantorovichTest, MismatchedGridsAreRejected) {
  PwlUtility a = HalfGrid(1.0);
  PwlUtility b = PwlUtility::Linear(BreakpointGrid({0.0, 0.4, 1.0}));
  EXPECT_THROW(KantorovichClosedForm(a, b), Error);
  EXPECT_THROW(KantorovichSocp(a, b), Error);
}

TEST(KantorovichTest, SocpMatchesClosedFormOnRandomPairs) {
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    BreakpointGrid g = RandomGrid(rng, 3 + rng.Below(8), 500000.0);
    PwlUtility u = RandomUtility(rng, g);
    PwlUtility v = RandomUtility(rng, g);
    const double exact = KantorovichClosedForm(u, v).value;
    EXPECT_NEAR(KantorovichSocp(u, v).value, exact, 1e-6);
    EXPECT_NEAR(KantorovichSocp(v, u).value, exact, 1e-6);
    EXPECT_NEAR(DualDistance(u, v), exact, 1e-6);
    if (t < 10) EXPECT_NEAR(NumericL1(u, v), exact, 1e-8);
  }
}

TEST(KantorovichTest, PseudoMetricProperties) {
  Rng rng(77);
  for (int t = 0; t < 500; ++t) {
    BreakpointGrid g = RandomGrid(rng, 3 + rng.Below(8), 1.0);
    PwlUtility a = RandomUtility(rng, g);
    PwlUtility b = RandomUtility(rng, g);
    PwlUtility c = RandomUtility(rng, g);
    const double ab = KantorovichClosedForm(a, b).value;
    const double bc = KantorovichClosedForm(b, c).value;
    const double ac = KantorovichClosedForm(a, c).value;
    EXPECT_LE(ac, ab + bc + 1e-12);
    EXPECT_LE(ab, 1.0);
    EXPECT_GE(ab, 0.0);
    EXPECT_DOUBLE_EQ(ab, KantorovichClosedForm(b, a).value);
  }
}

}  // namespace
}  // namespace advisor
