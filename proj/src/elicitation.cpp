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

#include "advisor/elicitation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "advisor/kantorovich.hpp"
#include "advisor/random.hpp"

namespace advisor {
namespace {

constexpr double kProbTolerance = 1e-9;

struct UtilityBlock {
  std::vector<Var> alpha;
  std::vector<Var> beta;  // normalized slopes
};

// alpha on the grid, normalized slopes beta >= 0, nonincreasing.
UtilityBlock AddUtilityBlock(ConicProgram& p, const BreakpointGrid& g) {
  const std::size_t n = g.size();
  UtilityBlock b;
  b.alpha = p.AddVariables("alpha", n, Bound::kFree);
  b.beta = p.AddVariables("beta", n - 1, Bound::kNonneg);
  p.AddLinear(b.alpha.front(), Relation::kEq, 0.0, "alpha_first");
  p.AddLinear(b.alpha.back(), Relation::kEq, 1.0, "alpha_last");
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double d = g.width(j) / g.bbar();
    p.AddLinear(LinExpr(b.alpha[j + 1]) - LinExpr(b.alpha[j]) - d * LinExpr(b.beta[j]),
                Relation::kEq, 0.0, "slope" + std::to_string(j));
  }
  for (std::size_t j = 0; j + 2 < n; ++j) {
    p.AddLinear(LinExpr(b.beta[j + 1]) - LinExpr(b.beta[j]), Relation::kLe, 0.0,
                "concave" + std::to_string(j));
  }
  return b;
}

LinExpr RowExpr(const AnswerRow& row, const UtilityBlock& b) {
  LinExpr e;
  for (std::size_t j = 0; j < row.coef.size(); ++j) e.Add(b.alpha[j], row.coef[j]);
  return e;
}

void AddAnswerRows(ConicProgram& p, const UtilityBlock& b,
                   std::span<const AnswerRow> rows,
                   std::span<const double> relaxation) {
  for (const AnswerRow& row : rows) {
    p.AddLinear(RowExpr(row, b), Relation::kGe, -relaxation[row.pair_index],
                "answer" + std::to_string(row.pair_index));
  }
}

std::vector<double> Expectation(const Lottery& l, const BreakpointGrid& g) {
  std::vector<double> w(g.size(), 0.0);
  for (const Outcome& o : l.outcomes()) {
    const auto ip = g.Interpolate(o.value);
    w[ip.segment] += o.prob * ip.left;
    w[ip.segment + 1] += o.prob * ip.right;
  }
  return w;
}

std::vector<Outcome> Merge(std::vector<Outcome> v) {
  std::sort(v.begin(), v.end(),
            [](const Outcome& a, const Outcome& b) { return a.value < b.value; });
  std::vector<Outcome> out;
  for (const Outcome& o : v) {
    if (!out.empty() &&
        o.value - out.back().value <= 1e-9 * std::max(1.0, std::abs(o.value))) {
      out.back().prob += o.prob;
    } else {
      out.push_back(o);
    }
  }
  return out;
}

double Sample(const Lottery& l, Rng& rng) {
  const double u = rng.Uniform();
  double acc = 0.0;
  for (const Outcome& o : l.outcomes()) {
    acc += o.prob;
    if (u < acc) return o.value;
  }
  return l.outcomes().back().value;
}

}  // namespace

const char* ChoiceName(Choice c) {
  switch (c) {
    case Choice::kFirst: return "first";
    case Choice::kSecond: return "second";
    case Choice::kNone: return "none";
  }
  return "none";
}

Choice ParseChoice(const std::string& s) {
  if (s == "first") return Choice::kFirst;
  if (s == "second") return Choice::kSecond;
  if (s == "none") return Choice::kNone;
  Fail(ErrorCode::kInvalidArgument, "unknown choice '" + s + "'");
}

void AnswerSheet::Validate(const Questionnaire& q) const {
  Require(answers.size() == q.size(),
          "answer sheet has " + std::to_string(answers.size()) +
              " answers for " + std::to_string(q.size()) + " pairs");
  Require(questionnaire_id.empty() || q.id.empty() || questionnaire_id == q.id,
          "answer sheet refers to questionnaire '" + questionnaire_id + "', not '" + q.id + "'");
}

BenchmarkSpec BenchmarkSpec::Uniform(std::size_t n) {
  BenchmarkSpec s;
  s.weights.assign(n, 1.0 / static_cast<double>(n));
  return s;
}

void BenchmarkSpec::Validate(std::size_t n) const {
  Require(weights.size() == n, "benchmark needs one weight per item");
  for (double w : weights) {
    Require(std::isfinite(w) && w >= 0.0, "benchmark weights must be finite and non-negative");
  }
  if (policy == ScenarioPolicy::kMonteCarlo) {
    Require(samples >= 1, "monte-carlo benchmark needs at least one sample");
  }
}

double ScenarioSet::Mean() const {
  double m = 0.0;
  for (const Outcome& o : scenarios) m += o.value * o.prob;
  return m;
}

void ScenarioSet::Validate(double bbar) const {
  Require(!scenarios.empty(), "scenario set is empty");
  double total = 0.0;
  for (const Outcome& o : scenarios) {
    Require(std::isfinite(o.value) && o.value >= 0.0, "scenario values must be non-negative");
    Require(std::isfinite(o.prob) && o.prob > 0.0, "scenario probabilities must be positive");
    if (o.value > bbar * (1.0 + 1e-9)) {
      Fail(ErrorCode::kDomain, "scenario value " + std::to_string(o.value) +
                                   " exceeds the grid bound " + std::to_string(bbar));
    }
    total += o.prob;
  }
  Require(std::abs(total - 1.0) <= kProbTolerance, "scenario probabilities must sum to 1");
}

ScenarioSet BuildScenarios(const ItemSet& items, const BenchmarkSpec& spec) {
  spec.Validate(items.size());
  ScenarioSet out;
  if (spec.policy == ScenarioPolicy::kMonteCarlo) {
    Rng rng(spec.seed);
    const double p = 1.0 / static_cast<double>(spec.samples);
    out.scenarios.reserve(spec.samples);
    for (std::size_t s = 0; s < spec.samples; ++s) {
      double h = 0.0;
      for (std::size_t i = 0; i < items.size(); ++i) {
        const double draw = Sample(items[i], rng);
        h += spec.weights[i] * draw;
      }
      out.scenarios.push_back({h, p});
    }
    return out;
  }
  double support = 1.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (spec.weights[i] > 0.0) support *= static_cast<double>(items[i].outcomes().size());
  }
  if (support > static_cast<double>(kMaxExactSupport)) {
    Fail(ErrorCode::kInvalidArgument,
         "exact benchmark support of " + std::to_string(static_cast<long long>(support)) +
             " scenarios exceeds " + std::to_string(kMaxExactSupport) +
             "; use the monte-carlo policy");
  }
  std::vector<Outcome> dist{{0.0, 1.0}};
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double w = spec.weights[i];
    if (w == 0.0) continue;
    std::vector<Outcome> next;
    next.reserve(dist.size() * items[i].outcomes().size());
    for (const Outcome& a : dist) {
      for (const Outcome& o : items[i].outcomes()) {
        next.push_back({a.value + w * o.value, a.prob * o.prob});
      }
    }
    dist = Merge(std::move(next));
  }
  out.scenarios = std::move(dist);
  return out;
}

ScenarioSet CompressScenarios(const ScenarioSet& s, const BreakpointGrid& grid) {
  s.Validate(grid.bbar());
  std::vector<double> mass(grid.size() - 1, 0.0);
  std::vector<double> moment(grid.size() - 1, 0.0);
  for (const Outcome& o : s.scenarios) {
    const std::size_t j = grid.Segment(std::min(o.value, grid.bbar()));
    mass[j] += o.prob;
    moment[j] += o.prob * o.value;
  }
  ScenarioSet out;
  for (std::size_t j = 0; j < mass.size(); ++j) {
    if (mass[j] <= 0.0) continue;
    const double mean = std::clamp(moment[j] / mass[j], grid[j], grid[j + 1]);
    out.scenarios.push_back({mean, mass[j]});
  }
  return out;
}

const char* EstimatorName(Estimator e) {
  switch (e) {
    case Estimator::kPessimistic: return "pessimistic";
    case Estimator::kOptimistic: return "optimistic";
    case Estimator::kNeutral: return "neutral";
  }
  return "neutral";
}

Estimator ParseEstimator(const std::string& s) {
  if (s == "pessimistic") return Estimator::kPessimistic;
  if (s == "optimistic") return Estimator::kOptimistic;
  if (s == "neutral") return Estimator::kNeutral;
  Fail(ErrorCode::kInvalidArgument, "unknown estimator '" + s + "'");
}

ElicitationProblem::ElicitationProblem(const ItemSet& items,
                                       const Questionnaire& questionnaire,
                                       const AnswerSheet& answers,
                                       BreakpointGrid grid, ScenarioSet scenarios,
                                       ElicitationOptions options)
    : grid_(std::move(grid)), options_(std::move(options)) {
  questionnaire.Validate(items.size());
  answers.Validate(questionnaire);
  scenarios.Validate(grid_.bbar());
  scenarios_ = options_.compress_scenarios ? CompressScenarios(scenarios, grid_)
                                           : std::move(scenarios);
  for (std::size_t k = 0; k < questionnaire.size(); ++k) {
    const int z = static_cast<int>(answers.answers[k]);
    if (z == 0) continue;
    const ItemPair& pair = questionnaire.pairs[k];
    const std::vector<double> first = Expectation(items[pair.first], grid_);
    const std::vector<double> second = Expectation(items[pair.second], grid_);
    AnswerRow row{k, std::vector<double>(grid_.size())};
    for (std::size_t j = 0; j < grid_.size(); ++j) row.coef[j] = z * (first[j] - second[j]);
    rows_.push_back(std::move(row));
  }
  relaxation_.assign(questionnaire.size(), 0.0);
  if (!options_.slack_mode || rows_.empty()) return;

  ConicProgram p;
  const UtilityBlock b = AddUtilityBlock(p, grid_);
  LinExpr total;
  std::vector<Var> excess;
  for (const AnswerRow& row : rows_) {
    const Var e = p.AddVariable("excess" + std::to_string(row.pair_index), Bound::kNonneg);
    excess.push_back(e);
    p.AddLinear(RowExpr(row, b) + LinExpr(e), Relation::kGe, 0.0,
                "answer" + std::to_string(row.pair_index));
    total += LinExpr(e);
  }
  p.SetObjective(Sense::kMinimize, total);
  const SolveResult r = Solve(p, options_.solver);
  if (!r.optimal()) {
    Fail(ErrorCode::kNumeric, std::string("relaxation program ended with status ") +
                                  SolveStatusName(r.status));
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double e = r.value(excess[i]);
    if (e > options_.solver.feastol) relaxation_[rows_[i].pair_index] = e + options_.solver.feastol;
  }
}

double ElicitationProblem::MaxViolation(std::span<const double> alpha) const {
  double worst = 0.0;
  for (const AnswerRow& row : rows_) {
    double v = 0.0;
    for (std::size_t j = 0; j < row.coef.size(); ++j) v += row.coef[j] * alpha[j];
    worst = std::max(worst, -v);
  }
  return worst;
}

double ElicitationProblem::MaxViolation(const PwlUtility& u) const {
  Require(u.grid() == grid_, "utility is defined on a different grid");
  return MaxViolation(u.alpha());
}

double ElicitationProblem::BenchmarkValue(const PwlUtility& u) const {
  double v = 0.0;
  for (const Outcome& o : scenarios_.scenarios) v += o.prob * EvalUtility(u, o.value);
  return v;
}

ConicProgram ElicitationProblem::PessimisticProgram() const {
  ConicProgram p;
  const UtilityBlock b = AddUtilityBlock(p, grid_);
  AddAnswerRows(p, b, rows_, relaxation_);
  const std::size_t m = scenarios_.size();
  const auto v = p.AddVariables("v", m, Bound::kNonneg);
  const auto w = p.AddVariables("w", m, Bound::kFree);
  LinExpr objective;
  for (std::size_t i = 0; i < m; ++i) {
    const Outcome& s = scenarios_.scenarios[i];
    const double h = s.value / grid_.bbar();
    objective.Add(v[i], s.prob * h).Add(w[i], s.prob);
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      const double y = grid_[j] / grid_.bbar();
      p.AddLinear(y * LinExpr(v[i]) + LinExpr(w[i]) - LinExpr(b.alpha[j]), Relation::kGe,
                  0.0, "envelope" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  p.SetObjective(Sense::kMinimize, objective);
  return p;
}

ConicProgram ElicitationProblem::OptimisticProgram() const {
  ConicProgram p;
  const UtilityBlock b = AddUtilityBlock(p, grid_);
  AddAnswerRows(p, b, rows_, relaxation_);
  const std::size_t m = scenarios_.size();
  const auto z = p.AddVariables("z", m, Bound::kFree);
  LinExpr objective;
  for (std::size_t i = 0; i < m; ++i) {
    const Outcome& s = scenarios_.scenarios[i];
    const double h = s.value / grid_.bbar();
    objective.Add(z[i], s.prob);
    for (std::size_t j = 0; j + 1 < grid_.size(); ++j) {
      const double y = grid_[j] / grid_.bbar();
      p.AddLinear(LinExpr(z[i]) - (h - y) * LinExpr(b.beta[j]) - LinExpr(b.alpha[j]),
                  Relation::kLe, 0.0,
                  "tangent" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  p.SetObjective(Sense::kMaximize, objective);
  return p;
}

ConicProgram ElicitationProblem::NeutralProgram(const PwlUtility& pessimistic,
                                                const PwlUtility& optimistic) const {
  Require(pessimistic.grid() == grid_ && optimistic.grid() == grid_,
          "bound utilities must share the elicitation grid");
  ConicProgram p;
  const UtilityBlock b = AddUtilityBlock(p, grid_);
  AddAnswerRows(p, b, rows_, relaxation_);
  const Var zeta = p.AddVariable("zeta", Bound::kNonneg);
  std::vector<LinExpr> slopes(b.beta.begin(), b.beta.end());
  const std::vector<double> sp = pessimistic.NormalizedSlopes();
  const std::vector<double> so = optimistic.NormalizedSlopes();
  const LinExpr dp = AddKantorovichDual(p, grid_, slopes, sp, "to_pessimistic");
  const LinExpr dop = AddKantorovichDual(p, grid_, slopes, so, "to_optimistic");
  p.AddLinear(LinExpr(zeta) - dp, Relation::kGe, 0.0, "bound_pessimistic");
  p.AddLinear(LinExpr(zeta) - dop, Relation::kGe, 0.0, "bound_optimistic");
  p.SetObjective(Sense::kMinimize, LinExpr(zeta));
  return p;
}

void ElicitationProblem::Diagnose() const {
  auto feasible = [&](const std::vector<AnswerRow>& rows) {
    ConicProgram p;
    const UtilityBlock b = AddUtilityBlock(p, grid_);
    AddAnswerRows(p, b, rows, relaxation_);
    p.SetObjective(Sense::kMinimize, LinExpr());
    const SolveResult r = Solve(p, options_.solver);
    if (r.status == SolveStatus::kNumericFailure) {
      Fail(ErrorCode::kNumeric, "consistency check did not converge: " + r.message);
    }
    return r.status != SolveStatus::kInfeasible;
  };
  std::vector<AnswerRow> active = rows_;
  if (feasible(active)) {
    Fail(ErrorCode::kNumeric, "elicitation program failed although the answers are consistent");
  }
  for (std::size_t i = 0; i < active.size();) {
    std::vector<AnswerRow> trial = active;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (!feasible(trial)) {
      active = std::move(trial);
    } else {
      ++i;
    }
  }
  std::vector<std::size_t> conflict;
  std::string list;
  for (const AnswerRow& row : active) {
    conflict.push_back(row.pair_index);
    list += (list.empty() ? "" : ", ") + std::to_string(row.pair_index);
  }
  throw InconsistentAnswers(
      "answers admit no concave utility; conflicting pairs: " + list, std::move(conflict));
}

ElicitationResult ElicitationProblem::Finish(Estimator e, const SolveResult& r) const {
  if (r.status == SolveStatus::kInfeasible) Diagnose();
  if (!r.optimal()) {
    Fail(ErrorCode::kNumeric, std::string(EstimatorName(e)) + " program ended with status " +
                                  SolveStatusName(r.status) + ": " + r.message);
  }
  std::vector<double> alpha(grid_.size());
  for (std::size_t j = 0; j < alpha.size(); ++j) alpha[j] = r.primal[j];
  ElicitationResult out;
  out.estimator = e;
  out.utility = PwlUtility::Repair(grid_, alpha, options_.repair_tolerance);
  out.objective = r.objective;
  out.iterations = r.iterations;
  out.solve_time = r.solve_time;
  return out;
}

ElicitationResult ElicitationProblem::Pessimistic() const {
  const ConicProgram p = PessimisticProgram();
  return Finish(Estimator::kPessimistic, Solve(p, options_.solver));
}

ElicitationResult ElicitationProblem::Optimistic() const {
  const ConicProgram p = OptimisticProgram();
  return Finish(Estimator::kOptimistic, Solve(p, options_.solver));
}

ElicitationResult ElicitationProblem::Neutral(const PwlUtility& pessimistic,
                                              const PwlUtility& optimistic) const {
  const ConicProgram p = NeutralProgram(pessimistic, optimistic);
  return Finish(Estimator::kNeutral, Solve(p, options_.solver));
}

ElicitationSet ElicitationProblem::All() const {
  ElicitationSet s;
  s.pessimistic = Pessimistic();
  s.optimistic = Optimistic();
  s.neutral = Neutral(s.pessimistic.utility, s.optimistic.utility);
  s.relaxation = relaxation_;
  return s;
}

}  // namespace advisor
