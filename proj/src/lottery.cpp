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

#include "advisor/lottery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "advisor/error.hpp"

namespace advisor {
namespace {

constexpr double kProbTol = 1e-9;
constexpr double kMergeTol = 1e-9;

std::string Fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

Lottery::Lottery(std::string id, std::string label,
                 std::vector<Outcome> outcomes)
    : id_(std::move(id)), label_(std::move(label)),
      outcomes_(std::move(outcomes)) {
  Require(!outcomes_.empty(), "lottery '" + id_ + "' has no outcomes");
  double total = 0.0;
  for (const Outcome& o : outcomes_) {
    Require(std::isfinite(o.value) && std::isfinite(o.prob),
            "lottery '" + id_ + "' has a non-finite outcome");
    Require(o.value >= 0.0, "lottery '" + id_ + "' has negative value " +
                                Fmt(o.value));
    Require(o.prob > 0.0, "lottery '" + id_ + "' has non-positive probability");
    total += o.prob;
  }
  Require(std::abs(total - 1.0) <= kProbTol,
          "lottery '" + id_ + "' probabilities sum to " + Fmt(total));
  std::sort(outcomes_.begin(), outcomes_.end(),
            [](const Outcome& a, const Outcome& b) { return a.value < b.value; });
  for (std::size_t i = 1; i < outcomes_.size(); ++i) {
    Require(outcomes_[i].value > outcomes_[i - 1].value,
            "lottery '" + id_ + "' repeats value " + Fmt(outcomes_[i].value));
  }
}

Lottery Lottery::Sure(std::string id, double value) {
  std::string label = "sure " + Fmt(value);
  return Lottery(std::move(id), std::move(label), {{value, 1.0}});
}

double Lottery::Mean() const {
  double m = 0.0;
  for (const Outcome& o : outcomes_) m += o.prob * o.value;
  return m;
}

double Lottery::SecondMoment() const {
  double m = 0.0;
  for (const Outcome& o : outcomes_) m += o.prob * o.value * o.value;
  return m;
}

double Lottery::MaxValue() const { return outcomes_.back().value; }

bool Lottery::SameDistribution(const Lottery& other, double tol) const {
  if (outcomes_.size() != other.outcomes_.size()) return false;
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    const Outcome& a = outcomes_[i];
    const Outcome& b = other.outcomes_[i];
    if (std::abs(a.value - b.value) > tol * std::max(1.0, a.value) ||
        std::abs(a.prob - b.prob) > tol) {
      return false;
    }
  }
  return true;
}

ItemSet::ItemSet(std::string name, std::vector<Lottery> items)
    : name_(std::move(name)), items_(std::move(items)) {
  Require(!items_.empty(), "item set '" + name_ + "' is empty");
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    Require(ids.insert(items_[i].id()).second,
            "duplicate item id '" + items_[i].id() + "'");
    for (std::size_t j = 0; j < i; ++j) {
      Require(!items_[i].SameDistribution(items_[j]),
              "items '" + items_[j].id() + "' and '" + items_[i].id() +
                  "' have the same distribution");
    }
  }
}

std::size_t ItemSet::IndexOf(const std::string& id) const {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].id() == id) return i;
  }
  Fail(ErrorCode::kNotFound, "unknown item id '" + id + "'");
}

double ItemSet::MaxOutcome() const {
  double m = 0.0;
  for (const Lottery& l : items_) m = std::max(m, l.MaxValue());
  return m;
}

BreakpointGrid::BreakpointGrid(std::vector<double> points)
    : points_(std::move(points)) {
  Require(points_.size() >= 2, "breakpoint grid needs at least two points");
  Require(points_.front() == 0.0, "breakpoint grid must start at 0");
  for (std::size_t j = 1; j < points_.size(); ++j) {
    Require(std::isfinite(points_[j]) && points_[j] > points_[j - 1],
            "breakpoints must be strictly increasing");
  }
}

BreakpointGrid BreakpointGrid::FromValues(std::span<const double> values,
                                          double bbar) {
  Require(std::isfinite(bbar) && bbar > 0.0, "bbar must be positive");
  std::vector<double> v(values.begin(), values.end());
  for (double x : v) {
    Require(std::isfinite(x) && x >= 0.0, "outcome values must be >= 0");
    if (x > bbar + kMergeTol) {
      Fail(ErrorCode::kDomain, "bbar " + Fmt(bbar) +
                                   " is below the largest outcome " + Fmt(x));
    }
  }
  v.push_back(0.0);
  v.push_back(bbar);
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || x - out.back() > kMergeTol) out.push_back(x);
  }
  out.front() = 0.0;
  out.back() = bbar;
  return BreakpointGrid(std::move(out));
}

BreakpointGrid BreakpointGrid::FromLotteries(std::span<const Lottery> lotteries,
                                             double bbar) {
  std::vector<double> v;
  for (const Lottery& l : lotteries) {
    for (const Outcome& o : l.outcomes()) v.push_back(o.value);
  }
  return FromValues(v, bbar);
}

std::size_t BreakpointGrid::Segment(double y) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), y);
  std::size_t j = it == points_.begin() ? 0 : (it - points_.begin()) - 1;
  return std::min(j, points_.size() - 2);
}

BreakpointGrid::Interp BreakpointGrid::Interpolate(double y) const {
  const double snap = kMergeTol * std::max(1.0, bbar());
  std::size_t j = Segment(y);
  const double lo = points_[j];
  const double hi = points_[j + 1];
  if (std::abs(y - lo) <= snap) return {j, 1.0, 0.0};
  if (std::abs(y - hi) <= snap) return {j, 0.0, 1.0};
  const double t = std::clamp((y - lo) / (hi - lo), 0.0, 1.0);
  return {j, 1.0 - t, t};
}

PwlUtility PwlUtility::FromAlpha(BreakpointGrid grid,
                                 std::vector<double> alpha) {
  const std::size_t n = grid.size();
  Require(alpha.size() == n, "alpha length must equal the grid size");
  Require(std::abs(alpha.front()) <= 1e-9, "utility must vanish at 0");
  Require(std::abs(alpha.back() - 1.0) <= 1e-9, "utility must equal 1 at bbar");
  const double bbar = grid.bbar();
  std::vector<double> beta(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    Require(std::isfinite(alpha[j]), "alpha must be finite");
    beta[j] = (alpha[j + 1] - alpha[j]) / grid.width(j);
    Require(beta[j] * bbar >= -1e-12, "utility must be nondecreasing");
    if (j > 0) {
      Require(beta[j] * bbar <= beta[j - 1] * bbar + 1e-12,
              "utility must be concave");
    }
  }
  PwlUtility u;
  u.grid_ = std::move(grid);
  u.alpha_ = std::move(alpha);
  u.beta_ = std::move(beta);
  return u;
}

PwlUtility PwlUtility::FromAlphaBeta(BreakpointGrid grid, std::vector<double> alpha,
                                     std::vector<double> beta) {
  PwlUtility u = FromAlpha(std::move(grid), std::move(alpha));
  Require(beta.size() == u.beta_.size(), "beta length must be one less than the grid size");
  const double bbar = u.bbar();
  for (std::size_t j = 0; j < beta.size(); ++j) {
    Require(std::isfinite(beta[j]) && std::abs(beta[j] - u.beta_[j]) * bbar <= 1e-9,
            "beta disagrees with alpha on segment " + std::to_string(j));
  }
  u.beta_ = std::move(beta);
  return u;
}

PwlUtility PwlUtility::Repair(BreakpointGrid grid, std::span<const double> alpha,
                              double tolerance) {
  const std::size_t n = grid.size();
  Require(alpha.size() == n, "alpha length must equal the grid size");
  const double bbar = grid.bbar();
  std::vector<double> len(n - 1), slope(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    len[j] = grid.width(j) / bbar;
    slope[j] = std::max(0.0, (alpha[j + 1] - alpha[j]) / len[j]);
  }

  // Pool adjacent violators for a nonincreasing fit.
  struct Block {
    double value;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    blocks.push_back({slope[j], len[j], 1});
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].value < blocks.back().value) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      a.value = (a.value * a.weight + b.value * b.weight) / (a.weight + b.weight);
      a.weight += b.weight;
      a.count += b.count;
    }
  }
  std::size_t j = 0;
  for (const Block& b : blocks) {
    for (std::size_t c = 0; c < b.count; ++c) slope[j++] = b.value;
  }

  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) mass += slope[k] * len[k];
  if (!(mass > 0.0)) Fail(ErrorCode::kNumeric, "utility has no increase");
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    slope[k] /= mass;
    out[k + 1] = out[k] + slope[k] * len[k];
  }
  out.back() = 1.0;

  double dev = 0.0;
  for (std::size_t k = 0; k < n; ++k) dev = std::max(dev, std::abs(out[k] - alpha[k]));
  if (dev > tolerance) {
    Fail(ErrorCode::kNumeric,
         "solver utility deviates from a valid utility by " + Fmt(dev));
  }

  PwlUtility u;
  u.alpha_ = std::move(out);
  u.beta_.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) u.beta_[k] = slope[k] / bbar;
  u.grid_ = std::move(grid);
  return u;
}

PwlUtility PwlUtility::Linear(BreakpointGrid grid) {
  const std::size_t n = grid.size();
  const double bbar = grid.bbar();
  PwlUtility u;
  u.alpha_.resize(n);
  for (std::size_t j = 0; j < n; ++j) u.alpha_[j] = grid[j] / bbar;
  u.alpha_.back() = 1.0;
  u.beta_.assign(n - 1, 1.0 / bbar);
  u.grid_ = std::move(grid);
  return u;
}

std::vector<double> PwlUtility::NormalizedSlopes() const {
  std::vector<double> s(beta_.size());
  for (std::size_t j = 0; j < beta_.size(); ++j) s[j] = beta_[j] * bbar();
  return s;
}

ClosedFormUtility ClosedFormUtility::Exponential(double rate, double bbar) {
  Require(rate > 0.0 && std::isfinite(rate), "rate must be positive");
  Require(bbar > 0.0 && std::isfinite(bbar), "bbar must be positive");
  ClosedFormUtility u;
  u.kind_ = Kind::kExponential;
  u.rate_ = rate;
  u.bbar_ = bbar;
  return u;
}

ClosedFormUtility ClosedFormUtility::Linear(double bbar) {
  Require(bbar > 0.0 && std::isfinite(bbar), "bbar must be positive");
  ClosedFormUtility u;
  u.bbar_ = bbar;
  return u;
}

ClosedFormUtility ClosedFormUtility::Default() {
  return Exponential(1e-5, 500000.0);
}

std::string ClosedFormUtility::Tag() const {
  return kind_ == Kind::kExponential ? "exponential" : "linear";
}

double ClosedFormUtility::operator()(double y) const {
  const double slack = 1e-9 * bbar_;
  if (!(y >= -slack && y <= bbar_ + slack)) {
    Fail(ErrorCode::kDomain, "value " + Fmt(y) + " outside [0, " +
                                 Fmt(bbar_) + "]");
  }
  y = std::clamp(y, 0.0, bbar_);
  if (kind_ == Kind::kLinear) return y / bbar_;
  return -std::expm1(-rate_ * y) / -std::expm1(-rate_ * bbar_);
}

double ClosedFormUtility::Expected(const Lottery& lottery) const {
  double e = 0.0;
  for (const Outcome& o : lottery.outcomes()) e += o.prob * (*this)(o.value);
  return e;
}

PwlUtility ClosedFormUtility::RestrictTo(const BreakpointGrid& grid) const {
  Require(std::abs(grid.bbar() - bbar_) <= 1e-9 * bbar_,
          "grid and utility domains differ");
  std::vector<double> alpha(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) alpha[j] = (*this)(grid[j]);
  alpha.front() = 0.0;
  alpha.back() = 1.0;
  return PwlUtility::FromAlpha(grid, std::move(alpha));
}

double EvalUtility(const PwlUtility& u, double y) {
  const double bbar = u.bbar();
  const double slack = 1e-9 * bbar;
  if (!(y >= -slack && y <= bbar + slack)) {
    Fail(ErrorCode::kDomain,
         "value " + Fmt(y) + " outside [0, " + Fmt(bbar) + "]");
  }
  if (y >= bbar) return 1.0;
  if (y <= 0.0) return u.alpha().front();
  const BreakpointGrid& g = u.grid();
  const std::size_t j = g.Segment(y);
  return u.beta()[j] * (y - g[j]) + u.alpha()[j];
}

double ExpectedUtility(const PwlUtility& u, const Lottery& lottery) {
  double e = 0.0;
  for (const Outcome& o : lottery.outcomes()) e += o.prob * EvalUtility(u, o.value);
  return e;
}

GiniResult GiniCoefficient(const BreakpointGrid& grid,
                           std::span<const double> alpha) {
  Require(alpha.size() == grid.size(), "alpha length must equal the grid size");
  const double bbar = grid.bbar();
  // Trapezoids of the deviation from the chord y / bbar.
  double excess = 0.0;
  GiniResult r;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double len = grid.width(j) / bbar;
    excess += len * ((alpha[j] - grid[j] / bbar) + (alpha[j + 1] - grid[j + 1] / bbar));
    if (j > 0) {
      const double left = (alpha[j] - alpha[j - 1]) / (grid.width(j - 1) / bbar);
      const double right = (alpha[j + 1] - alpha[j]) / len;
      if (right > left + 1e-9) r.concave = false;
    }
  }
  r.value = excess;
  return r;
}

GiniResult GiniCoefficient(const PwlUtility& u) {
  return GiniCoefficient(u.grid(), u.alpha());
}

RiskAnalytics RiskAversion(const PwlUtility& u) {
  RiskAnalytics r;
  r.gini = GiniCoefficient(u).value;
  const auto beta = u.beta();
  for (std::size_t j = 1; j + 1 < u.grid().size(); ++j) {
    const double y = u.grid()[j];
    KinkMeasure ara{y, std::nullopt};
    KinkMeasure rra{y, std::nullopt};
    if (beta[j - 1] > 0.0) {
      const double a = std::max(0.0, (beta[j - 1] - beta[j]) / (2.0 * beta[j - 1]));
      ara.value = a;
      rra.value = y * a;
    }
    r.ara.push_back(ara);
    r.rra.push_back(rra);
  }
  return r;
}

}  // namespace advisor
