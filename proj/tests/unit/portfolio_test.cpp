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

#include "advisor/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "advisor/error.hpp"
#include "advisor/random.hpp"
#include "test_util.hpp"

namespace advisor {
namespace {

constexpr double kBbar = 500000.0;

std::vector<std::string> Dates(std::size_t n) {
  std::vector<std::string> d;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "D%06zu", i);
    d.push_back(buf);
  }
  return d;
}

ReturnsPanel RandomPanel(Rng& rng, std::size_t rows, std::size_t risky, double spread) {
  Eigen::MatrixXd net(rows, risky);
  for (Eigen::Index i = 0; i < net.size(); ++i) net.data()[i] = rng.Uniform(-spread, spread) + 0.2 * spread;
  std::vector<std::string> names;
  for (std::size_t s = 0; s < risky; ++s) names.push_back("A" + std::to_string(s));
  return ReturnsPanel::FromNetReturns(names, Dates(rows), net);
}

TEST(PortfolioTest, LinearUtilityFillsCapsByMeanFactor) {
  Rng rng(8);
  const BreakpointGrid g({0.0, 100000.0, kBbar});
  const PwlUtility u = PwlUtility::Linear(g);
  for (int trial = 0; trial < 20; ++trial) {
    const ReturnsPanel panel = RandomPanel(rng, 30, 4, 0.05);
    const PortfolioSpec spec = PortfolioSpec::WithCapFraction(100000.0, panel.columns(), 0.3);
    const Portfolio p = OptimizePortfolio(u, panel, spec);
    const Eigen::VectorXd mean = panel.factors.colwise().mean();
    std::vector<std::size_t> order(panel.columns());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return mean[a] > mean[b]; });
    std::vector<double> greedy(panel.columns(), 0.0);
    double left = spec.budget;
    for (std::size_t s : order) {
      greedy[s] = std::min(left, spec.caps[s]);
      left -= greedy[s];
    }
    for (std::size_t s = 0; s < greedy.size(); ++s) EXPECT_NEAR(p.x[s], greedy[s], 1e-3);
    EXPECT_NEAR(p.objective, EvaluatePortfolio(u, panel, greedy), 1e-8);
  }
}

TEST(PortfolioTest, FlatReturnsGiveUtilityOfBudget) {
  const BreakpointGrid g({0.0, 5000.0, 20000.0, kBbar});
  const PwlUtility u = PwlUtility::FromAlpha(g, {0.0, 0.3, 0.6, 1.0});
  const ReturnsPanel panel = ReturnsPanel::FromNetReturns({"A"}, Dates(5), Eigen::MatrixXd::Zero(5, 1));
  const Portfolio p = OptimizePortfolio(u, panel, PortfolioSpec::WithCapFraction(10000.0, 2, 1.0));
  EXPECT_NEAR(p.objective, EvalUtility(u, 10000.0), 1e-8);
  EXPECT_NEAR(p.x[0] + p.x[1], 10000.0, 1e-6);
}

TEST(PortfolioTest, TwoAssetGridOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const double budget = 100000.0;
    const BreakpointGrid g({0.0, rng.Uniform(80000.0, 120000.0), kBbar});
    const PwlUtility u = testing::RandomUtility(rng, g);
    const ReturnsPanel panel = RandomPanel(rng, 2, 1, 0.3);
    const PortfolioSpec spec = PortfolioSpec::WithCapFraction(budget, 2, 1.0);
    const Portfolio p = OptimizePortfolio(u, panel, spec);
    double best = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double risky = budget * i / 1000.0;
      const std::vector<double> x{budget - risky, risky};
      best = std::max(best, EvaluatePortfolio(u, panel, x));
    }
    EXPECT_NEAR(p.objective, best, 1e-4);
    EXPECT_GE(p.objective, best - 1e-9);
  }
}

TEST(PortfolioTest, ObjectiveMatchesDirectEvaluation) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const BreakpointGrid g = testing::RandomGrid(rng, 3 + rng.Below(8), kBbar);
    const PwlUtility u = testing::RandomUtility(rng, g);
    const ReturnsPanel panel = RandomPanel(rng, 5 + rng.Below(20), 1 + rng.Below(4), 0.2);
    const double budget = rng.Uniform(1000.0, 300000.0);
    const PortfolioSpec spec = PortfolioSpec::WithCapFraction(budget, panel.columns(), 0.5);
    const Portfolio p = OptimizePortfolio(u, panel, spec);
    EXPECT_NEAR(p.objective, EvaluatePortfolio(u, panel, p.x), 1e-8);
    EXPECT_NEAR(std::accumulate(p.x.begin(), p.x.end(), 0.0), budget, 1e-6);
    for (std::size_t s = 0; s < p.x.size(); ++s) {
      EXPECT_GE(p.x[s], 0.0);
      EXPECT_LE(p.x[s], spec.caps[s] + 1e-6);
    }
  }
}

TEST(PortfolioTest, RejectsBadSpecs) {
  const BreakpointGrid g({0.0, kBbar});
  const PwlUtility u = PwlUtility::Linear(g);
  const ReturnsPanel panel = ReturnsPanel::FromNetReturns({"A"}, Dates(3), Eigen::MatrixXd::Constant(3, 1, 0.5));
  PortfolioSpec spec{1000.0, {100.0, 100.0}};
  try {
    OptimizePortfolio(u, panel, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
  }
  try {
    OptimizePortfolio(u, panel, PortfolioSpec::WithCapFraction(400000.0, 2, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDomain);
  }
  PortfolioOptions clip;
  clip.clip_above_bound = true;
  const Portfolio p = OptimizePortfolio(u, panel, PortfolioSpec::WithCapFraction(400000.0, 2, 1.0), clip);
  EXPECT_NEAR(p.objective, 1.0, 1e-7);
  EXPECT_THROW(OptimizePortfolio(u, panel, PortfolioSpec::WithCapFraction(0.0, 2, 1.0)), Error);
}

TEST(PanelTest, Validation) {
  EXPECT_THROW(ReturnsPanel::FromNetReturns({"A"}, {"2020-01-02", "2020-01-01"},
                                            Eigen::MatrixXd::Zero(2, 1)),
               Error);
  EXPECT_THROW(ReturnsPanel::FromNetReturns({"A"}, Dates(2), Eigen::MatrixXd::Constant(2, 1, -1.0)),
               Error);
  const ReturnsPanel p = ReturnsPanel::FromNetReturns({"A"}, {"2020-01-02", "2020-01-06"},
                                                      Eigen::MatrixXd::Constant(2, 1, 0.01));
  EXPECT_EQ(p.assets[0], "cash");
  EXPECT_DOUBLE_EQ(p.factors(1, 1), 1.01);
}

TEST(BacktestTest, FlatFactorsKeepWealth) {
  const BreakpointGrid g({0.0, 5000.0, 20000.0, kBbar});
  const PwlUtility u = PwlUtility::FromAlpha(g, {0.0, 0.3, 0.6, 1.0});
  const ReturnsPanel panel =
      ReturnsPanel::FromNetReturns({"A", "B"}, Dates(40), Eigen::MatrixXd::Zero(40, 2));
  BacktestConfig cfg;
  cfg.window = 10;
  cfg.hold = 7;
  const auto curves = RunBacktest(panel, cfg, {{"u", u}});
  ASSERT_EQ(curves.size(), 1u);
  EXPECT_EQ(curves[0].wealth.size(), 31u);
  for (double w : curves[0].wealth) EXPECT_NEAR(w, 10000.0, 1e-6);
}

TEST(BacktestTest, SingleWindowCompounds) {
  Rng rng(12);
  const BreakpointGrid g({0.0, 8000.0, 12000.0, kBbar});
  const PwlUtility u = PwlUtility::FromAlpha(g, {0.0, 0.5, 0.6, 1.0});
  const ReturnsPanel panel = RandomPanel(rng, 30, 3, 0.02);
  BacktestConfig cfg;
  cfg.window = 20;
  cfg.hold = 10;
  const auto curves = RunBacktest(panel, cfg, {{"u", u}});
  const WealthCurve& c = curves[0];
  ASSERT_EQ(c.rebalances.size(), 1u);
  const std::vector<double>& x = c.rebalances[0].x;
  double expected = cfg.initial_wealth;
  for (std::size_t t = 20; t < 30; ++t) {
    double f = 0.0;
    for (std::size_t s = 0; s < x.size(); ++s) f += panel.factors(t, s) * x[s] / cfg.initial_wealth;
    expected *= f;
  }
  EXPECT_NEAR(c.wealth.back(), expected, 1e-9 * expected);
  EXPECT_EQ(c.dates.front(), panel.dates[19]);
  EXPECT_EQ(c.dates.back(), panel.dates[29]);
}

TEST(BacktestTest, RespectsCapsAndStaysPositive) {
  Rng rng(4);
  const BreakpointGrid g = testing::RandomGrid(rng, 8, kBbar);
  const PwlUtility u = testing::RandomUtility(rng, g);
  const ReturnsPanel panel = RandomPanel(rng, 200, 5, 0.03);
  BacktestConfig cfg;
  const auto curves = RunBacktest(panel, cfg, {{"a", u}, {"b", PwlUtility::Linear(g)}});
  ASSERT_EQ(curves.size(), 2u);
  for (const WealthCurve& c : curves) {
    for (const Rebalance& r : c.rebalances) {
      double total = 0.0;
      for (std::size_t s = 0; s < r.x.size(); ++s) {
        EXPECT_GE(r.x[s], 0.0);
        EXPECT_LE(r.x[s], (s == 0 ? 1.0 : cfg.cap_fraction) * r.wealth * (1.0 + 1e-9) + 1e-6);
        total += r.x[s];
      }
      EXPECT_NEAR(total, r.wealth, 1e-6);
    }
    for (double w : c.wealth) EXPECT_GT(w, 0.0);
  }
  EXPECT_THROW(RunBacktest(panel.Slice(0, 60), cfg, {{"a", u}}), Error);
}

}  // namespace
}  // namespace advisor
