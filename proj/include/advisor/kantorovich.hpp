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

// Kantorovich distance between normalized piecewise-linear utilities.

#ifndef ADVISOR_KANTOROVICH_HPP_
#define ADVISOR_KANTOROVICH_HPP_

#include <span>
#include <vector>

#include "advisor/conic.hpp"
#include "advisor/lottery.hpp"

namespace advisor {

enum class DistanceMethod { kSocp, kClosedForm };

struct DistanceResult {
  double value = 0.0;  // on the normalized domain [0, 1]
  DistanceMethod method = DistanceMethod::kClosedForm;
};

// Exact integral of |u - v| over [0, 1] after rescaling y to y / bbar.
DistanceResult KantorovichClosedForm(const PwlUtility& u, const PwlUtility& v);

// Maximizes sum (beta_j - beta~_j) w_j over the cone-constrained test
// function increments on the normalized grid.
DistanceResult KantorovichSocp(const PwlUtility& u, const PwlUtility& v,
                               const SolverSettings& settings = {});

// Appends the minimization form of the distance to `program`: the returned
// expression is an upper bound on d(u, target) whenever the added
// constraints hold, and its minimum over the added variables equals the
// distance. `slopes` are the normalized slopes of u as expressions.
LinExpr AddKantorovichDual(ConicProgram& program, const BreakpointGrid& grid,
                           std::span<const LinExpr> slopes,
                           std::span<const double> target_slopes,
                           const std::string& tag);

}  // namespace advisor

#endif  // ADVISOR_KANTOROVICH_HPP_
