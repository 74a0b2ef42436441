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

// Modeling layer for linear and second-order-cone programs, and the solver
// boundary used by every optimization module.

#ifndef ADVISOR_CONIC_HPP_
#define ADVISOR_CONIC_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace advisor {

enum class Bound { kFree, kNonneg };
enum class Relation { kLe, kEq, kGe };
enum class Sense { kMinimize, kMaximize };

struct Var {
  int index = -1;
};

// Affine expression sum(coef * var) + constant.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT
  LinExpr(Var v) { terms_.push_back({v.index, 1.0}); }  // NOLINT

  LinExpr& Add(Var v, double coef) {
    if (coef != 0.0) terms_.push_back({v.index, coef});
    return *this;
  }
  LinExpr& AddConstant(double c) {
    constant_ += c;
    return *this;
  }
  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double k);

  const std::vector<std::pair<int, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }

  // Merges repeated variables and drops zeros.
  LinExpr Canonical() const;
  double Evaluate(std::span<const double> x) const;

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double k, LinExpr a);
LinExpr operator*(LinExpr a, double k);
LinExpr operator-(LinExpr a);

struct LinearConstraint {
  LinExpr expr;
  Relation relation = Relation::kLe;
  double rhs = 0.0;
  std::string label;
};

// ||(u1, u2)|| <= t.
struct SocConstraint {
  LinExpr u1;
  LinExpr u2;
  LinExpr t;
  std::string label;
};

class ConicProgram {
 public:
  Var AddVariable(std::string name, Bound bound = Bound::kFree);
  std::vector<Var> AddVariables(const std::string& name, std::size_t count,
                                Bound bound = Bound::kFree);

  void AddLinear(LinExpr expr, Relation relation, double rhs,
                 std::string label = {});
  void AddSoc(LinExpr u1, LinExpr u2, LinExpr t, std::string label = {});
  void SetObjective(Sense sense, LinExpr expr);

  std::size_t num_variables() const { return names_.size(); }
  const std::string& name(Var v) const { return names_.at(v.index); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Bound>& bounds() const { return bounds_; }
  const std::vector<LinearConstraint>& linear() const { return linear_; }
  const std::vector<SocConstraint>& soc() const { return soc_; }
  Sense sense() const { return sense_; }
  const LinExpr& objective() const { return objective_; }

  // Throws kModel when an expression references an undeclared variable.
  void Validate() const;

 private:
  std::vector<std::string> names_;
  std::vector<Bound> bounds_;
  std::vector<LinearConstraint> linear_;
  std::vector<SocConstraint> soc_;
  Sense sense_ = Sense::kMinimize;
  LinExpr objective_;
};

struct SolverSettings {
  double feastol = 1e-8;
  double abstol = 1e-8;
  double reltol = 1e-8;
  int max_iters = 200;
  bool verbose = false;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericFailure };

const char* SolveStatusName(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::kNumericFailure;
  double objective = 0.0;
  // One value per declared variable; empty unless optimal.
  std::vector<double> primal;
  // Multipliers >= 0 for inequalities (in the direction that makes the
  // Lagrangian a bound on the objective), free for equalities. Empty unless
  // optimal.
  std::vector<double> linear_duals;
  double solve_time = 0.0;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == SolveStatus::kOptimal; }
  double value(Var v) const { return primal.at(v.index); }
  std::map<std::string, double> NamedPrimal(const ConicProgram& p) const;
};

SolveResult Solve(const ConicProgram& program,
                  const SolverSettings& settings = {});

// Largest absolute violation of bounds, linear rows and cones.
double CheckFeasible(const ConicProgram& program, std::span<const double> x);
double CheckFeasible(const ConicProgram& program,
                     const std::map<std::string, double>& point);

// Plain-text listing, one record per line:
//   objective min|max <constant>
//   var <index> <name> free|nonneg
//   obj <name> <coef>
//   lin <label> <= | = | >= <rhs> : <coef> <name> ...
//   soc <label> : u1 <expr> ; u2 <expr> ; t <expr>
std::string DumpProgram(const ConicProgram& program);

}  // namespace advisor

#endif  // ADVISOR_CONIC_HPP_
