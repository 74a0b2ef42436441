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

#include "advisor/conic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "advisor/error.hpp"
#include "ipm.hpp"

namespace advisor {

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  for (const auto& [v, c] : other.terms_) terms_.push_back({v, -c});
  constant_ -= other.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double k) {
  for (auto& t : terms_) t.second *= k;
  constant_ *= k;
  return *this;
}

LinExpr LinExpr::Canonical() const {
  std::vector<std::pair<int, double>> sorted = terms_;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  LinExpr out(constant_);
  for (const auto& [v, c] : sorted) {
    if (!out.terms_.empty() && out.terms_.back().first == v) {
      out.terms_.back().second += c;
    } else {
      out.terms_.push_back({v, c});
    }
  }
  std::erase_if(out.terms_, [](const auto& t) { return t.second == 0.0; });
  return out;
}

double LinExpr::Evaluate(std::span<const double> x) const {
  double r = constant_;
  for (const auto& [v, c] : terms_) r += c * x[v];
  return r;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double k, LinExpr a) { return a *= k; }
LinExpr operator*(LinExpr a, double k) { return a *= k; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }

Var ConicProgram::AddVariable(std::string name, Bound bound) {
  names_.push_back(std::move(name));
  bounds_.push_back(bound);
  return Var{static_cast<int>(names_.size()) - 1};
}

std::vector<Var> ConicProgram::AddVariables(const std::string& name,
                                            std::size_t count, Bound bound) {
  std::vector<Var> vars;
  vars.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    vars.push_back(AddVariable(name + "[" + std::to_string(i) + "]", bound));
  }
  return vars;
}

void ConicProgram::AddLinear(LinExpr expr, Relation relation, double rhs,
                             std::string label) {
  if (label.empty()) label = "c" + std::to_string(linear_.size());
  linear_.push_back({std::move(expr), relation, rhs, std::move(label)});
}

void ConicProgram::AddSoc(LinExpr u1, LinExpr u2, LinExpr t, std::string label) {
  if (label.empty()) label = "k" + std::to_string(soc_.size());
  soc_.push_back({std::move(u1), std::move(u2), std::move(t), std::move(label)});
}

void ConicProgram::SetObjective(Sense sense, LinExpr expr) {
  sense_ = sense;
  objective_ = std::move(expr);
}

void ConicProgram::Validate() const {
  const int n = static_cast<int>(names_.size());
  auto check = [n](const LinExpr& e, const std::string& where) {
    for (const auto& [v, c] : e.terms()) {
      if (v < 0 || v >= n) {
        Fail(ErrorCode::kModel,
             where + " references undeclared variable " + std::to_string(v));
      }
      if (!std::isfinite(c)) Fail(ErrorCode::kModel, where + " has a non-finite coefficient");
    }
    if (!std::isfinite(e.constant())) {
      Fail(ErrorCode::kModel, where + " has a non-finite constant");
    }
  };
  check(objective_, "objective");
  for (const auto& c : linear_) {
    check(c.expr, c.label);
    if (!std::isfinite(c.rhs)) Fail(ErrorCode::kModel, c.label + " has a non-finite rhs");
  }
  for (const auto& k : soc_) {
    check(k.u1, k.label);
    check(k.u2, k.label);
    check(k.t, k.label);
  }
}

const char* SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericFailure: return "numeric-failure";
  }
  return "unknown";
}

std::map<std::string, double> SolveResult::NamedPrimal(
    const ConicProgram& p) const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < primal.size(); ++i) out[p.names()[i]] = primal[i];
  return out;
}

namespace {

struct RowRef {
  bool equality = false;
  int row = -1;       // -1 for a dropped constant row
  double sign = 1.0;  // +1 when the row is stored as written
};

struct Compiled {
  ipm::StandardForm form;
  std::vector<RowRef> linear_rows;
  std::vector<double> a_scale;
  std::vector<double> g_scale;
  bool constant_infeasible = false;
};

Compiled Compile(const ConicProgram& p) {
  using Triplet = Eigen::Triplet<double>;
  const int n = static_cast<int>(p.num_variables());
  Compiled out;
  std::vector<Triplet> at, gt;
  std::vector<double> b, h;
  int arow = 0;
  int grow = 0;

  auto add_row = [](std::vector<Triplet>& t, int row, const LinExpr& e,
                    double sign) {
    for (const auto& [v, c] : e.terms()) t.emplace_back(row, v, sign * c);
  };

  for (const LinearConstraint& c : p.linear()) {
    const LinExpr e = c.expr.Canonical();
    const double rhs = c.rhs - e.constant();
    RowRef ref;
    ref.equality = c.relation == Relation::kEq;
    if (e.terms().empty()) {
      const double tol = 1e-12 * std::max(1.0, std::abs(rhs));
      const bool ok = c.relation == Relation::kEq ? std::abs(rhs) <= tol
                      : c.relation == Relation::kLe ? 0.0 <= rhs + tol
                                                    : 0.0 >= rhs - tol;
      if (!ok) out.constant_infeasible = true;
      out.linear_rows.push_back(ref);
      continue;
    }
    if (ref.equality) {
      ref.row = arow;
      add_row(at, arow++, e, 1.0);
      b.push_back(rhs);
    } else {
      ref.sign = c.relation == Relation::kLe ? 1.0 : -1.0;
      ref.row = grow;
      add_row(gt, grow++, e, ref.sign);
      h.push_back(ref.sign * rhs);
    }
    out.linear_rows.push_back(ref);
  }
  for (int i = 0; i < n; ++i) {
    if (p.bounds()[i] == Bound::kNonneg) {
      gt.emplace_back(grow++, i, -1.0);
      h.push_back(0.0);
    }
  }
  const int l = grow;
  for (const SocConstraint& k : p.soc()) {
    for (const LinExpr* e : {&k.t, &k.u1, &k.u2}) {
      const LinExpr ce = e->Canonical();
      add_row(gt, grow++, ce, -1.0);
      h.push_back(ce.constant());
    }
  }

  ipm::StandardForm& f = out.form;
  f.n = n;
  f.l = l;
  f.q = static_cast<int>(p.soc().size());
  f.A.resize(arow, n);
  f.A.setFromTriplets(at.begin(), at.end());
  f.G.resize(grow, n);
  f.G.setFromTriplets(gt.begin(), gt.end());
  f.b = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<int>(b.size()));
  f.h = Eigen::Map<Eigen::VectorXd>(h.data(), static_cast<int>(h.size()));
  f.c = Eigen::VectorXd::Zero(n);
  const double sign = p.sense() == Sense::kMaximize ? -1.0 : 1.0;
  for (const auto& [v, c] : p.objective().terms()) f.c[v] += sign * c;

  // Row equilibration; the three rows of a cone share one factor.
  auto row_max = [](const ipm::SpMat& M) {
    std::vector<double> r(M.rows(), 0.0);
    for (int col = 0; col < M.outerSize(); ++col) {
      for (ipm::SpMat::InnerIterator it(M, col); it; ++it) {
        r[it.row()] = std::max(r[it.row()], std::abs(it.value()));
      }
    }
    return r;
  };
  std::vector<double> amax = row_max(f.A);
  std::vector<double> gmax = row_max(f.G);
  out.a_scale.resize(arow);
  for (int i = 0; i < arow; ++i) out.a_scale[i] = amax[i] > 0.0 ? 1.0 / amax[i] : 1.0;
  out.g_scale.resize(grow);
  for (int i = 0; i < l; ++i) out.g_scale[i] = gmax[i] > 0.0 ? 1.0 / gmax[i] : 1.0;
  for (int k = 0; k < f.q; ++k) {
    const int o = l + 3 * k;
    const double mx = std::max({gmax[o], gmax[o + 1], gmax[o + 2]});
    const double sc = mx > 0.0 ? 1.0 / mx : 1.0;
    out.g_scale[o] = out.g_scale[o + 1] = out.g_scale[o + 2] = sc;
  }
  const Eigen::VectorXd da =
      Eigen::Map<Eigen::VectorXd>(out.a_scale.data(), arow);
  const Eigen::VectorXd dg =
      Eigen::Map<Eigen::VectorXd>(out.g_scale.data(), grow);
  f.A = da.asDiagonal() * f.A;
  f.b = f.b.cwiseProduct(da);
  f.G = dg.asDiagonal() * f.G;
  f.h = f.h.cwiseProduct(dg);
  f.A.makeCompressed();
  f.G.makeCompressed();
  return out;
}

}  // namespace

SolveResult Solve(const ConicProgram& program, const SolverSettings& settings) {
  program.Validate();
  const auto start = std::chrono::steady_clock::now();
  SolveResult result;
  Compiled compiled = Compile(program);
  if (compiled.constant_infeasible) {
    result.status = SolveStatus::kInfeasible;
    result.message = "a constraint without variables is violated";
  } else {
    const ipm::Solution sol = ipm::SolveStandard(compiled.form, settings);
    result.status = sol.status;
    result.iterations = sol.iterations;
    result.message = sol.message;
    if (sol.status == SolveStatus::kOptimal) {
      result.primal.assign(sol.x.data(), sol.x.data() + sol.x.size());
      result.objective = program.objective().Evaluate(result.primal);
      result.linear_duals.reserve(compiled.linear_rows.size());
      for (const RowRef& r : compiled.linear_rows) {
        double d = 0.0;
        if (r.row >= 0) {
          d = r.equality ? sol.y[r.row] * compiled.a_scale[r.row]
                         : sol.z[r.row] * compiled.g_scale[r.row];
        }
        result.linear_duals.push_back(d);
      }
    }
  }
  result.solve_time = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return result;
}

double CheckFeasible(const ConicProgram& program, std::span<const double> x) {
  program.Validate();
  if (x.size() != program.num_variables()) {
    Fail(ErrorCode::kModel, "point has " + std::to_string(x.size()) +
                                " values for " +
                                std::to_string(program.num_variables()) +
                                " variables");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (program.bounds()[i] == Bound::kNonneg) worst = std::max(worst, -x[i]);
  }
  for (const LinearConstraint& c : program.linear()) {
    const double lhs = c.expr.Evaluate(x);
    switch (c.relation) {
      case Relation::kLe: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::kGe: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::kEq: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  for (const SocConstraint& k : program.soc()) {
    const double v = std::hypot(k.u1.Evaluate(x), k.u2.Evaluate(x)) - k.t.Evaluate(x);
    worst = std::max(worst, v);
  }
  return worst;
}

double CheckFeasible(const ConicProgram& program,
                     const std::map<std::string, double>& point) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < program.num_variables(); ++i) {
    index[program.names()[i]] = i;
  }
  std::vector<double> x(program.num_variables(), 0.0);
  for (const auto& [name, value] : point) {
    auto it = index.find(name);
    if (it == index.end()) Fail(ErrorCode::kModel, "unknown variable '" + name + "'");
    x[it->second] = value;
  }
  return CheckFeasible(program, x);
}

std::string DumpProgram(const ConicProgram& program) {
  std::ostringstream os;
  os.precision(17);
  const auto& names = program.names();
  auto expr = [&](const LinExpr& e) {
    std::ostringstream es;
    es.precision(17);
    const LinExpr c = e.Canonical();
    for (const auto& [v, k] : c.terms()) es << ' ' << k << ' ' << names.at(v);
    if (c.constant() != 0.0 || c.terms().empty()) es << " + " << c.constant();
    return es.str();
  };
  os << "objective "
     << (program.sense() == Sense::kMinimize ? "min" : "max") << ' '
     << program.objective().constant() << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) {
    os << "var " << i << ' ' << names[i] << ' '
       << (program.bounds()[i] == Bound::kFree ? "free" : "nonneg") << '\n';
  }
  const LinExpr objective = program.objective().Canonical();
  for (const auto& [v, c] : objective.terms()) {
    os << "obj " << names.at(v) << ' ' << c << '\n';
  }
  for (const LinearConstraint& c : program.linear()) {
    const char* rel = c.relation == Relation::kLe   ? "<="
                      : c.relation == Relation::kEq ? "="
                                                    : ">=";
    os << "lin " << c.label << ' ' << rel << ' ' << c.rhs << " :" << expr(c.expr)
       << '\n';
  }
  for (const SocConstraint& k : program.soc()) {
    os << "soc " << k.label << " : u1" << expr(k.u1) << " ; u2" << expr(k.u2)
       << " ; t" << expr(k.t) << '\n';
  }
  return os.str();
}

}  // namespace advisor
