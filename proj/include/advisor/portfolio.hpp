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

// Expected-utility portfolio selection over historical return scenarios and
// the rolling-window backtest.

#ifndef ADVISOR_PORTFOLIO_HPP_
#define ADVISOR_PORTFOLIO_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "advisor/conic.hpp"
#include "advisor/lottery.hpp"

namespace advisor {

// Gross return factors; column 0 is the risk-free asset with factor 1.
struct ReturnsPanel {
  std::vector<std::string> assets;  // assets[0] is the risk-free asset
  std::vector<std::string> dates;
  Eigen::MatrixXd factors;          // rows = dates, cols = assets

  std::size_t rows() const { return dates.size(); }
  std::size_t columns() const { return assets.size(); }
  // Throws unless dates increase strictly, factors are positive and finite
  // and the risk-free column is exactly 1.
  void Validate() const;
  ReturnsPanel Slice(std::size_t begin, std::size_t count) const;
  // Builds a panel from net returns of risky assets, adding the risk-free
  // column named `cash`.
  static ReturnsPanel FromNetReturns(std::vector<std::string> risky,
                                     std::vector<std::string> dates,
                                     const Eigen::MatrixXd& net);
};

struct PortfolioSpec {
  double budget = 0.0;
  std::vector<double> caps;  // one per panel column, risk-free first

  // Risky caps at `fraction` of the budget, risk-free cap at the budget.
  static PortfolioSpec WithCapFraction(double budget, std::size_t columns,
                                       double fraction);
  void Validate(std::size_t columns) const;
};

// Tolerances tight enough for the objective to match direct evaluation to
// 1e-8.
inline SolverSettings PortfolioSolverSettings() {
  SolverSettings s;
  s.feastol = s.abstol = s.reltol = 1e-10;
  return s;
}

struct PortfolioOptions {
  SolverSettings solver = PortfolioSolverSettings();
  // Extend the utility flat at 1 beyond its bound instead of rejecting
  // wealth above it.
  bool clip_above_bound = false;
};

struct Portfolio {
  std::vector<double> x;  // currency per panel column
  double objective = 0.0;
  int iterations = 0;
};

// Average utility of the wealth factors . x over the panel rows.
double EvaluatePortfolio(const PwlUtility& u, const ReturnsPanel& window,
                         std::span<const double> x, bool clip_above_bound = false);

ConicProgram PortfolioProgram(const PwlUtility& u, const ReturnsPanel& window,
                              const PortfolioSpec& spec, bool clip_above_bound);

Portfolio OptimizePortfolio(const PwlUtility& u, const ReturnsPanel& window,
                            const PortfolioSpec& spec,
                            const PortfolioOptions& options = {});

struct BacktestConfig {
  std::size_t window = 60;
  std::size_t hold = 7;
  double initial_wealth = 10000.0;
  double cap_fraction = 0.4;
  SolverSettings solver = PortfolioSolverSettings();

  void Validate() const;
};

struct Rebalance {
  std::size_t row = 0;  // first held row
  double wealth = 0.0;
  std::vector<double> x;
};

struct WealthCurve {
  std::string estimator;
  std::vector<std::string> dates;
  std::vector<double> wealth;
  std::vector<Rebalance> rebalances;
  std::size_t clipped_solves = 0;  // solves whose wealth reached the bound
};

// Rebalances every `hold` rows using the trailing `window` rows with budget
// equal to current wealth; holds constant weights in between. Curves start
// at the last date of the first window with the initial wealth.
std::vector<WealthCurve> RunBacktest(
    const ReturnsPanel& panel, const BacktestConfig& config,
    const std::vector<std::pair<std::string, PwlUtility>>& utilities);

}  // namespace advisor

#endif  // ADVISOR_PORTFOLIO_HPP_
