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

#include "advisor/error.hpp"

namespace advisor {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void RequireSameGrid(const PwlUtility& u, const PwlUtility& v) {
  if (!(u.grid() == v.grid())) {
    Fail(ErrorCode::kInvalidArgument, "utilities are defined on different grids");
  }
}

}  // namespace

DistanceResult KantorovichClosedForm(const PwlUtility& u, const PwlUtility& v) {
  RequireSameGrid(u, v);
  const BreakpointGrid& g = u.grid();
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    const double len = g.width(j) / g.bbar();
    const double d0 = u.alpha()[j] - v.alpha()[j];
    const double d1 = u.alpha()[j + 1] - v.alpha()[j + 1];
    const double a0 = std::abs(d0);
    const double a1 = std::abs(d1);
    if (d0 * d1 >= 0.0) {
      total += 0.5 * len * (a0 + a1);
    } else {
      total += 0.5 * len * (d0 * d0 + d1 * d1) / (a0 + a1);
    }
  }
  return {total, DistanceMethod::kClosedForm};
}

DistanceResult KantorovichSocp(const PwlUtility& u, const PwlUtility& v,
                               const SolverSettings& settings) {
  RequireSameGrid(u, v);
  const BreakpointGrid& g = u.grid();
  const std::size_t segs = g.size() - 1;
  const std::vector<double> su = u.NormalizedSlopes();
  const std::vector<double> sv = v.NormalizedSlopes();

  ConicProgram p;
  const std::vector<Var> w = p.AddVariables("w", segs);
  const std::vector<Var> x = p.AddVariables("x", segs);
  LinExpr objective;
  LinExpr prefix;  // sum of x_i for i < j
  for (std::size_t j = 0; j < segs; ++j) {
    const double d = g.width(j) / g.bbar();
    objective.Add(w[j], su[j] - sv[j]);
    // a = -2 w + d (2 prefix + x) + d^2 / 2, b = d^2 - a.
    LinExpr a = -2.0 * LinExpr(w[j]) + d * (2.0 * prefix + x[j]);
    a.AddConstant(0.5 * d * d);
    LinExpr b = -a;
    b.AddConstant(d * d);
    // x^2 <= 2 a written as a cone scaled by the segment width.
    p.AddSoc(x[j], kInvSqrt2 * (a * (1.0 / d) - d), kInvSqrt2 * (a * (1.0 / d) + d), "upper" + std::to_string(j));
    p.AddSoc(x[j], kInvSqrt2 * (b * (1.0 / d) - d), kInvSqrt2 * (b * (1.0 / d) + d), "lower" + std::to_string(j));
    prefix.Add(x[j], 1.0);
  }
  p.SetObjective(Sense::kMaximize, objective);
  const SolveResult r = Solve(p, settings);
  if (!r.optimal()) {
    Fail(ErrorCode::kNumeric, std::string("distance program ended with status ") +
                                  SolveStatusName(r.status));
  }
  return {std::max(0.0, r.objective), DistanceMethod::kSocp};
}

LinExpr AddKantorovichDual(ConicProgram& program, const BreakpointGrid& grid,
                           std::span<const LinExpr> slopes,
                           std::span<const double> target_slopes,
                           const std::string& tag) {
  const std::size_t segs = grid.size() - 1;
  Require(slopes.size() == segs && target_slopes.size() == segs,
          "slope count must match the grid");
  const auto t = program.AddVariables(tag + ".t", segs);
  const auto s = program.AddVariables(tag + ".s", segs);
  const auto lam = program.AddVariables(tag + ".lambda", segs);
  const auto mu = program.AddVariables(tag + ".mu", segs);
  const auto rho = program.AddVariables(tag + ".rho", segs);
  const auto phi = program.AddVariables(tag + ".phi", segs);

  std::vector<double> d(segs);
  for (std::size_t j = 0; j < segs; ++j) d[j] = grid.width(j) / grid.bbar();

  // net_j = lambda_j + mu_j - rho_j - phi_j
  auto net = [&](std::size_t j) {
    return LinExpr().Add(lam[j], 1.0).Add(mu[j], 1.0).Add(rho[j], -1.0).Add(phi[j], -1.0);
  };

  LinExpr value;
  for (std::size_t j = 0; j < segs; ++j) {
    value += kInvSqrt2 * d[j] *
             LinExpr().Add(lam[j], -0.5).Add(mu[j], 1.5).Add(rho[j], -0.5).Add(phi[j], 1.5);

    LinExpr link = kInvSqrt2 * d[j] * slopes[j];
    link.AddConstant(-kInvSqrt2 * d[j] * target_slopes[j]);
    link -= net(j);
    program.AddLinear(link, Relation::kEq, 0.0, tag + ".slope" + std::to_string(j));

    LinExpr balance = LinExpr().Add(t[j], 1.0).Add(s[j], 1.0);
    LinExpr tail = net(j);
    for (std::size_t i = j + 1; i < segs; ++i) tail += 2.0 * net(i);
    balance += kInvSqrt2 * tail;
    program.AddLinear(balance, Relation::kEq, 0.0, tag + ".balance" + std::to_string(j));

    program.AddSoc(t[j], lam[j], mu[j], tag + ".cone_a" + std::to_string(j));
    program.AddSoc(s[j], rho[j], phi[j], tag + ".cone_b" + std::to_string(j));
  }
  return value;
}

}  // namespace advisor
