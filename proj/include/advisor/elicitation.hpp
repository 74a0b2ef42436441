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

// Nominal utility estimation from pairwise answers: pessimistic and
// optimistic linear programs and the neutral min-max distance program.

#ifndef ADVISOR_ELICITATION_HPP_
#define ADVISOR_ELICITATION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "advisor/conic.hpp"
#include "advisor/error.hpp"
#include "advisor/lottery.hpp"
#include "advisor/spq.hpp"

namespace advisor {

// Z = +1 when the first item is chosen, -1 for the second, 0 for no choice.
enum class Choice { kSecond = -1, kNone = 0, kFirst = 1 };

const char* ChoiceName(Choice c);
Choice ParseChoice(const std::string& s);

struct AnswerSheet {
  std::string questionnaire_id;
  std::vector<Choice> answers;  // one per questionnaire pair

  void Validate(const Questionnaire& q) const;
};

enum class ScenarioPolicy { kExact, kMonteCarlo };

inline constexpr std::size_t kMaxExactSupport = 100000;

struct BenchmarkSpec {
  std::vector<double> weights;  // one per item, >= 0
  ScenarioPolicy policy = ScenarioPolicy::kExact;
  std::size_t samples = 10000;  // monte-carlo only
  std::uint64_t seed = 1;       // monte-carlo only

  static BenchmarkSpec Uniform(std::size_t n);
  void Validate(std::size_t n) const;
};

// Benchmark payoff values h_i with probabilities p_i.
struct ScenarioSet {
  std::vector<Outcome> scenarios;

  std::size_t size() const { return scenarios.size(); }
  double Mean() const;
  void Validate(double bbar) const;
};

// Exact policy enumerates the product distribution and merges equal
// values; monte-carlo draws `samples` joint realizations of weight 1/M.
ScenarioSet BuildScenarios(const ItemSet& items, const BenchmarkSpec& spec);

// One scenario per grid segment carrying the segment mass and conditional
// mean. Expected utility of any piecewise-linear utility on `grid` is
// unchanged.
ScenarioSet CompressScenarios(const ScenarioSet& s, const BreakpointGrid& grid);

enum class Estimator { kPessimistic, kOptimistic, kNeutral };

const char* EstimatorName(Estimator e);
Estimator ParseEstimator(const std::string& s);

struct ElicitationOptions {
  SolverSettings solver;
  bool compress_scenarios = true;
  // Relax inconsistent answers by the least total violation instead of
  // failing.
  bool slack_mode = false;
  double repair_tolerance = 1e-5;
};

struct ElicitationResult {
  Estimator estimator = Estimator::kPessimistic;
  PwlUtility utility;
  double objective = 0.0;
  int iterations = 0;
  double solve_time = 0.0;
};

struct ElicitationSet {
  ElicitationResult pessimistic;
  ElicitationResult optimistic;
  ElicitationResult neutral;
  // Per-answer relaxation applied in slack mode; all zero otherwise.
  std::vector<double> relaxation;
};

// Raised when the answers admit no concave normalized utility. `conflict`
// lists questionnaire pair indices forming an irreducible inconsistent
// subset.
class InconsistentAnswers : public Error {
 public:
  InconsistentAnswers(const std::string& message, std::vector<std::size_t> conflict)
      : Error(ErrorCode::kInfeasible, message), conflict_(std::move(conflict)) {}
  const std::vector<std::size_t>& conflict() const { return conflict_; }

 private:
  std::vector<std::size_t> conflict_;
};

// A linear answer constraint sum_j coef_j alpha_j >= 0 on grid values.
struct AnswerRow {
  std::size_t pair_index = 0;
  std::vector<double> coef;
};

class ElicitationProblem {
 public:
  ElicitationProblem(const ItemSet& items, const Questionnaire& questionnaire,
                     const AnswerSheet& answers, BreakpointGrid grid,
                     ScenarioSet scenarios, ElicitationOptions options = {});

  const BreakpointGrid& grid() const { return grid_; }
  const ScenarioSet& scenarios() const { return scenarios_; }
  std::span<const AnswerRow> rows() const { return rows_; }
  const std::vector<double>& relaxation() const { return relaxation_; }

  // Largest violation max(0, -row . alpha) over all answer rows.
  double MaxViolation(const PwlUtility& u) const;
  double MaxViolation(std::span<const double> alpha) const;
  // Expected utility of the benchmark under u.
  double BenchmarkValue(const PwlUtility& u) const;

  ElicitationResult Pessimistic() const;
  ElicitationResult Optimistic() const;
  ElicitationResult Neutral(const PwlUtility& pessimistic,
                            const PwlUtility& optimistic) const;
  ElicitationSet All() const;

  // Programs exposed for inspection and export.
  ConicProgram PessimisticProgram() const;
  ConicProgram OptimisticProgram() const;
  ConicProgram NeutralProgram(const PwlUtility& pessimistic,
                              const PwlUtility& optimistic) const;

 private:
  void Diagnose() const;
  ElicitationResult Finish(Estimator e, const SolveResult& r) const;

  BreakpointGrid grid_;
  ScenarioSet scenarios_;
  ElicitationOptions options_;
  std::vector<AnswerRow> rows_;
  std::vector<double> relaxation_;
};

}  // namespace advisor

#endif  // ADVISOR_ELICITATION_HPP_
