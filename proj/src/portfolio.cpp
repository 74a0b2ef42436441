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

#include "advisor/error.hpp"

namespace advisor {
namespace {

// Largest value of f . x over 0 <= x <= caps, sum x = budget.
double MaxWealth(const Eigen::RowVectorXd& f, const PortfolioSpec& spec) {
  std::vector<std::size_t> order(spec.caps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
  double left = spec.budget;
  double w = 0.0;
  for (std::size_t s : order) {
    const double take = std::min(left, spec.caps[s]);
    w += take * f[s];
    left -= take;
  }
  return w;
}

}  // namespace

void ReturnsPanel::Validate() const {
  Require(assets.size() >= 2, "returns panel needs the risk-free asset and at least one risky asset");
  Require(static_cast<std::size_t>(factors.rows()) == dates.size() &&
              static_cast<std::size_t>(factors.cols()) == assets.size(),
          "returns panel dimensions do not match its labels");
  for (std::size_t t = 1; t < dates.size(); ++t) {
    Require(dates[t - 1] < dates[t], "dates must increase strictly; '" + dates[t] +
                                         "' follows '" + dates[t - 1] + "'");
  }
  for (Eigen::Index t = 0; t < factors.rows(); ++t) {
    Require(factors(t, 0) == 1.0, "risk-free factor must be 1 on " + dates[t]);
    for (Eigen::Index s = 0; s < factors.cols(); ++s) {
      Require(std::isfinite(factors(t, s)) && factors(t, s) > 0.0,
              "gross factor must be positive on " + dates[t] + " for " + assets[s]);
    }
  }
}

ReturnsPanel ReturnsPanel::Slice(std::size_t begin, std::size_t count) const {
  Require(begin + count <= rows(), "panel slice out of range");
  ReturnsPanel p;
  p.assets = assets;
  p.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(begin),
                 dates.begin() + static_cast<std::ptrdiff_t>(begin + count));
  p.factors = factors.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
  return p;
}

ReturnsPanel ReturnsPanel::FromNetReturns(std::vector<std::string> risky,
                                          std::vector<std::string> dates,
                                          const Eigen::MatrixXd& net) {
  ReturnsPanel p;
  p.assets.push_back("cash");
  p.assets.insert(p.assets.end(), risky.begin(), risky.end());
  p.dates = std::move(dates);
  p.factors.resize(net.rows(), net.cols() + 1);
  p.factors.col(0).setOnes();
  p.factors.rightCols(net.cols()) = net.array() + 1.0;
  p.Validate();
  return p;
}

PortfolioSpec PortfolioSpec::WithCapFraction(double budget, std::size_t columns,
                                             double fraction) {
  PortfolioSpec s;
  s.budget = budget;
  s.caps.assign(columns, fraction * budget);
  if (!s.caps.empty()) s.caps[0] = budget;
  return s;
}

void PortfolioSpec::Validate(std::size_t columns) const {
  Require(std::isfinite(budget) && budget > 0.0, "budget must be positive");
  Require(caps.size() == columns, "portfolio needs one cap per asset");
  double total = 0.0;
  for (double c : caps) {
    Require(std::isfinite(c) && c > 0.0, "caps must be positive");
    Require(c <= budget * (1.0 + 1e-12), "caps may not exceed the budget");
    total += c;
  }
  if (total < budget * (1.0 - 1e-12)) {
    Fail(ErrorCode::kInfeasible, "caps sum to " + std::to_string(total) +
                                     ", below the budget " + std::to_string(budget));
  }
}

double EvaluatePortfolio(const PwlUtility& u, const ReturnsPanel& window,
                         std::span<const double> x, bool clip_above_bound) {
  Require(x.size() == window.columns(), "allocation size does not match the panel");
  Require(window.rows() > 0, "panel window is empty");
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  double total = 0.0;
  for (Eigen::Index t = 0; t < window.factors.rows(); ++t) {
    double w = window.factors.row(t).dot(xv);
    if (clip_above_bound) w = std::clamp(w, 0.0, u.bbar());
    total += EvalUtility(u, w);
  }
  return total / static_cast<double>(window.rows());
}

ConicProgram PortfolioProgram(const PwlUtility& u, const ReturnsPanel& window,
                              const PortfolioSpec& spec, bool clip_above_bound) {
  window.Validate();
  spec.Validate(window.columns());
  const double bbar = u.bbar();
  if (!clip_above_bound) {
    for (Eigen::Index t = 0; t < window.factors.rows(); ++t) {
      const double w = MaxWealth(window.factors.row(t), spec);
      if (w > bbar * (1.0 + 1e-9)) {
        Fail(ErrorCode::kDomain, "wealth can reach " + std::to_string(w) + " on " +
                                     window.dates[t] + ", above the utility bound b = " +
                                     std::to_string(bbar));
      }
    }
  }
  const BreakpointGrid& g = u.grid();
  const std::vector<double> slopes = u.NormalizedSlopes();
  const std::size_t cols = window.columns();
  const std::size_t rows = window.rows();

  ConicProgram p;
  const auto x = p.AddVariables("x", cols, Bound::kNonneg);
  const auto z = p.AddVariables("z", rows, Bound::kFree);
  LinExpr sum;
  for (std::size_t s = 0; s < cols; ++s) {
    sum += LinExpr(x[s]);
    p.AddLinear(x[s], Relation::kLe, spec.caps[s] / bbar, "cap" + std::to_string(s));
  }
  p.AddLinear(sum, Relation::kEq, spec.budget / bbar, "budget");
  LinExpr objective;
  for (std::size_t t = 0; t < rows; ++t) {
    LinExpr wealth;
    for (std::size_t s = 0; s < cols; ++s) {
      wealth.Add(x[s], window.factors(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)));
    }
    for (std::size_t j = 0; j + 1 < g.size(); ++j) {
      const double y = g[j] / bbar;
      LinExpr tangent = slopes[j] * wealth;
      tangent.AddConstant(u.alpha()[j] - slopes[j] * y);
      p.AddLinear(LinExpr(z[t]) - tangent, Relation::kLe, 0.0,
                  "tangent" + std::to_string(t) + "_" + std::to_string(j));
    }
    if (clip_above_bound) p.AddLinear(z[t], Relation::kLe, 1.0, "flat" + std::to_string(t));
    objective.Add(z[t], 1.0 / static_cast<double>(rows));
  }
  p.SetObjective(Sense::kMaximize, objective);
  return p;
}

Portfolio OptimizePortfolio(const PwlUtility& u, const ReturnsPanel& window,
                            const PortfolioSpec& spec, const PortfolioOptions& options) {
  const ConicProgram p = PortfolioProgram(u, window, spec, options.clip_above_bound);
  const SolveResult r = Solve(p, options.solver);
  if (r.status == SolveStatus::kInfeasible) {
    Fail(ErrorCode::kInfeasible, "portfolio constraints are infeasible");
  }
  if (!r.optimal()) {
    Fail(ErrorCode::kNumeric, std::string("portfolio program ended with status ") +
                                  SolveStatusName(r.status) + ": " + r.message);
  }
  const std::size_t cols = window.columns();
  Portfolio out;
  out.x.resize(cols);
  for (std::size_t s = 0; s < cols; ++s) {
    out.x[s] = std::clamp(r.primal[s] * u.bbar(), 0.0, spec.caps[s]);
  }
  // Restore the budget exactly after clamping.
  const double total = std::accumulate(out.x.begin(), out.x.end(), 0.0);
  double gap = spec.budget - total;
  for (std::size_t s = 0; s < cols && gap != 0.0; ++s) {
    const double room = gap > 0.0 ? spec.caps[s] - out.x[s] : -out.x[s];
    const double step = gap > 0.0 ? std::min(gap, room) : std::max(gap, room);
    out.x[s] += step;
    gap -= step;
  }
  out.objective = r.objective;
  out.iterations = r.iterations;
  return out;
}

void BacktestConfig::Validate() const {
  Require(window >= 2, "backtest window must be at least 2 rows");
  Require(hold >= 1, "holding period must be at least 1 row");
  Require(std::isfinite(initial_wealth) && initial_wealth > 0.0,
          "initial wealth must be positive");
  Require(cap_fraction > 0.0 && cap_fraction <= 1.0, "cap fraction must lie in (0, 1]");
}

std::vector<WealthCurve> RunBacktest(
    const ReturnsPanel& panel, const BacktestConfig& config,
    const std::vector<std::pair<std::string, PwlUtility>>& utilities) {
  config.Validate();
  panel.Validate();
  if (panel.rows() < config.window + config.hold) {
    Fail(ErrorCode::kInvalidArgument,
         "panel has " + std::to_string(panel.rows()) + " rows; the backtest needs at least " +
             std::to_string(config.window + config.hold));
  }
  PortfolioOptions opts;
  opts.solver = config.solver;
  opts.clip_above_bound = true;
  std::vector<WealthCurve> curves;
  for (const auto& [name, u] : utilities) {
    WealthCurve c;
    c.estimator = name;
    double wealth = config.initial_wealth;
    c.dates.push_back(panel.dates[config.window - 1]);
    c.wealth.push_back(wealth);
    for (std::size_t r = config.window; r < panel.rows(); r += config.hold) {
      const ReturnsPanel window = panel.Slice(r - config.window, config.window);
      const PortfolioSpec spec =
          PortfolioSpec::WithCapFraction(wealth, panel.columns(), config.cap_fraction);
      const Portfolio p = OptimizePortfolio(u, window, spec, opts);
      for (Eigen::Index t = 0; t < window.factors.rows(); ++t) {
        if (MaxWealth(window.factors.row(t), spec) > u.bbar()) {
          ++c.clipped_solves;
          break;
        }
      }
      c.rebalances.push_back({r, wealth, p.x});
      Eigen::VectorXd weights(static_cast<Eigen::Index>(p.x.size()));
      for (std::size_t s = 0; s < p.x.size(); ++s) weights[static_cast<Eigen::Index>(s)] = p.x[s] / wealth;
      const std::size_t end = std::min(panel.rows(), r + config.hold);
      for (std::size_t t = r; t < end; ++t) {
        wealth *= panel.factors.row(static_cast<Eigen::Index>(t)).dot(weights);
        c.dates.push_back(panel.dates[t]);
        c.wealth.push_back(wealth);
      }
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

}  // namespace advisor
