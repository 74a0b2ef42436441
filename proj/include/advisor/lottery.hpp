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

// Domain types for discrete lotteries and piecewise-linear utilities.

#ifndef ADVISOR_LOTTERY_HPP_
#define ADVISOR_LOTTERY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace advisor {

struct Outcome {
  double value = 0.0;  // currency, >= 0
  double prob = 0.0;   // > 0
};

// A discrete non-negative random payoff. Outcomes are kept sorted by value.
class Lottery {
 public:
  Lottery() = default;
  // Throws kInvalidArgument unless probabilities are positive and sum to 1
  // within 1e-9, values are non-negative and pairwise distinct.
  Lottery(std::string id, std::string label, std::vector<Outcome> outcomes);

  static Lottery Sure(std::string id, double value);

  const std::string& id() const { return id_; }
  const std::string& label() const { return label_; }
  std::span<const Outcome> outcomes() const { return outcomes_; }

  double Mean() const;
  double SecondMoment() const;
  double MaxValue() const;
  // Same support and probabilities, up to tol.
  bool SameDistribution(const Lottery& other, double tol = 1e-12) const;

 private:
  std::string id_;
  std::string label_;
  std::vector<Outcome> outcomes_;
};

class ItemSet {
 public:
  ItemSet() = default;
  // Throws unless ids are unique and items are pairwise distinct.
  ItemSet(std::string name, std::vector<Lottery> items);

  const std::string& name() const { return name_; }
  std::span<const Lottery> items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  const Lottery& operator[](std::size_t i) const { return items_[i]; }
  // Index of the item with the given id; throws kNotFound.
  std::size_t IndexOf(const std::string& id) const;
  double MaxOutcome() const;

 private:
  std::string name_;
  std::vector<Lottery> items_;
};

// Strictly increasing breakpoints 0 = y_1 < ... < y_N = bbar, N >= 2.
class BreakpointGrid {
 public:
  BreakpointGrid() = default;
  explicit BreakpointGrid(std::vector<double> points);

  // Sorted union of {0}, every value in `values` and {bbar}; values closer
  // than 1e-9 are merged. Throws if bbar is below the largest value.
  static BreakpointGrid FromValues(std::span<const double> values, double bbar);
  static BreakpointGrid FromLotteries(std::span<const Lottery> lotteries,
                                      double bbar);

  std::span<const double> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t j) const { return points_[j]; }
  double bbar() const { return points_.back(); }
  double width(std::size_t j) const { return points_[j + 1] - points_[j]; }

  // Segment j with y_j <= y < y_{j+1}; the last segment for y == bbar.
  std::size_t Segment(double y) const;

  // Barycentric weights of y on its segment: u(y) = w0*alpha_j + w1*alpha_{j+1}.
  struct Interp {
    std::size_t segment;
    double left;
    double right;
  };
  Interp Interpolate(double y) const;

  bool operator==(const BreakpointGrid& other) const = default;

 private:
  std::vector<double> points_;
};

// Normalized, monotone, concave piecewise-linear utility on a grid.
// alpha holds utility values at the breakpoints, beta the slopes in utility
// per currency unit.
class PwlUtility {
 public:
  PwlUtility() = default;

  // Validates alpha_1 = 0, alpha_N = 1 (1e-9), beta >= 0 and
  // beta_{j+1} <= beta_j + 1e-12. beta is derived from alpha.
  static PwlUtility FromAlpha(BreakpointGrid grid, std::vector<double> alpha);

  // As FromAlpha, keeping stored slopes that agree with alpha to 1e-9 in
  // normalized units.
  static PwlUtility FromAlphaBeta(BreakpointGrid grid, std::vector<double> alpha,
                                  std::vector<double> beta);

  // Builds the closest valid utility to a solver output: clamps slopes at
  // zero, restores concavity by length-weighted pooling of adjacent
  // violators and renormalizes. Deviations up to `tolerance` in normalized
  // slope units are repaired; larger ones are rejected.
  static PwlUtility Repair(BreakpointGrid grid, std::span<const double> alpha,
                           double tolerance = 1e-5);

  // The linear chord u(y) = y / bbar.
  static PwlUtility Linear(BreakpointGrid grid);

  const BreakpointGrid& grid() const { return grid_; }
  std::span<const double> alpha() const { return alpha_; }
  std::span<const double> beta() const { return beta_; }
  double bbar() const { return grid_.bbar(); }

  // Slopes on the normalized domain y / bbar; they sum to 1 when weighted by
  // normalized segment widths.
  std::vector<double> NormalizedSlopes() const;

  bool operator==(const PwlUtility& other) const = default;

 private:
  BreakpointGrid grid_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
};

// Closed-form reference utility used by the virtual user.
class ClosedFormUtility {
 public:
  enum class Kind { kExponential, kLinear };

  // u(y) = (1 - exp(-rate*y)) / (1 - exp(-rate*bbar)).
  static ClosedFormUtility Exponential(double rate, double bbar);
  static ClosedFormUtility Linear(double bbar);
  // The simulated user: rate 1e-5 on [0, 500000].
  static ClosedFormUtility Default();

  Kind kind() const { return kind_; }
  double rate() const { return rate_; }
  double bbar() const { return bbar_; }
  std::string Tag() const;

  double operator()(double y) const;
  double Expected(const Lottery& lottery) const;
  // Chord interpolation through the grid points.
  PwlUtility RestrictTo(const BreakpointGrid& grid) const;

 private:
  Kind kind_ = Kind::kLinear;
  double rate_ = 0.0;
  double bbar_ = 1.0;
};

// Throws kDomain outside [0, bbar] (1e-9 relative slack, clamped).
double EvalUtility(const PwlUtility& u, double y);
double ExpectedUtility(const PwlUtility& u, const Lottery& lottery);

struct GiniResult {
  double value = 0.0;
  bool concave = true;  // false flags an input outside the intended domain
};

// 2/bbar * integral of (u(y) - y/bbar) over [0, bbar], exact for PWL u.
GiniResult GiniCoefficient(const BreakpointGrid& grid,
                           std::span<const double> alpha);
GiniResult GiniCoefficient(const PwlUtility& u);

struct KinkMeasure {
  double breakpoint = 0.0;
  std::optional<double> value;  // empty when the left slope is zero
};

struct RiskAnalytics {
  double gini = 0.0;
  std::vector<KinkMeasure> ara;
  std::vector<KinkMeasure> rra;
};

// ARA and RRA at interior breakpoints from the left/right slope drop.
RiskAnalytics RiskAversion(const PwlUtility& u);

}  // namespace advisor

#endif  // ADVISOR_LOTTERY_HPP_
