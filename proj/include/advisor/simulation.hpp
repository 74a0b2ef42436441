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

// Virtual-user experiments: questionnaire comparison, convergence in the
// number of questions and population risk analytics.

#ifndef ADVISOR_SIMULATION_HPP_
#define ADVISOR_SIMULATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "advisor/elicitation.hpp"
#include "advisor/lottery.hpp"
#include "advisor/portfolio.hpp"
#include "advisor/spq.hpp"

namespace advisor {

// Z_k = sign(E u(W_k) - E u(Y_k)), with differences within 1e-12 mapped
// to no choice.
AnswerSheet AnswerQuestionnaire(const ClosedFormUtility& u, const ItemSet& items,
                                const Questionnaire& q);

// Expected value of a x^2 + b x + c with x = outcome / bbar for each item,
// min-max scaled to [0, 10]. Empty when all items score the same.
std::optional<std::vector<double>> QuadraticRatings(const ItemSet& items, double a,
                                                    double b, double c, double bbar);

struct RatingSimulation {
  RatingsMatrix ratings;
  std::size_t redraws = 0;  // degenerate draws replaced
};

// One rater per user with a, b, c ~ U[-50, 50]; bbar is the largest
// outcome of the item set.
RatingSimulation SimulateRatings(const ItemSet& items, std::size_t users,
                                 std::uint64_t seed);

// Edge (from, to) means item `to` was preferred over item `from`.
struct PreferenceGraph {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

PreferenceGraph BuildPreferenceGraph(const ItemSet& items, const Questionnaire& q,
                                     const AnswerSheet& answers);

// Benchmark used for elicitation experiments: uniform weights, exact when
// the product support fits, otherwise 10000 monte-carlo samples.
BenchmarkSpec DefaultBenchmark(const ItemSet& items);

struct ExperimentConfig {
  std::vector<std::size_t> ks;
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;
  std::size_t raters = 200;
  LfmConfig lfm;
  ClosedFormUtility truth = ClosedFormUtility::Default();
  // Grid from every item outcome; when false only questioned items count.
  bool item_set_grid = true;
  ElicitationOptions elicitation;
  unsigned threads = 1;
};

struct DistanceRecord {
  std::string method;  // "spq" or "random"
  Estimator estimator = Estimator::kPessimistic;
  std::size_t k = 0;
  std::size_t repetition = 0;
  double distance = 0.0;
};

struct SummaryCell {
  std::string method;
  Estimator estimator = Estimator::kPessimistic;
  std::size_t k = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  ExperimentConfig config;
  std::vector<DistanceRecord> records;
  std::size_t rating_redraws = 0;

  std::vector<SummaryCell> Summary() const;
  // Throws kNotFound for an empty cell.
  double Mean(const std::string& method, Estimator e, std::size_t k) const;
};

// Per repetition: fresh ratings, LFM fit, SPQ and random questionnaires at
// each K, virtual-user answers, three estimators, distance to the true
// utility restricted to the grid.
ExperimentReport RunSpqVsRandom(const ItemSet& items, const ExperimentConfig& config);

// Random questionnaires at each K; no ratings involved.
ExperimentReport RunConvergence(const ItemSet& items, const ExperimentConfig& config);

struct GiniRow {
  std::size_t index = 0;
  std::string group;
  double pessimistic = 0.0;
  double optimistic = 0.0;
  double neutral = 0.0;
};

struct GroupStats {
  std::string group;
  std::size_t count = 0;
  double mean[3] = {0.0, 0.0, 0.0};      // pessimistic, optimistic, neutral
  double variance[3] = {0.0, 0.0, 0.0};  // sample variance, 0 for one user
};

struct PopulationReport {
  std::vector<GiniRow> rows;
  std::vector<GroupStats> groups;
  std::vector<std::size_t> infeasible;  // sheet indices skipped
};

PopulationReport PopulationGini(const ItemSet& items, const Questionnaire& q,
                                std::span<const AnswerSheet> sheets,
                                std::span<const std::string> groups,
                                const BreakpointGrid& grid, const ScenarioSet& scenarios,
                                const ElicitationOptions& options = {});

// Gaussian daily net returns for `assets` risky assets on weekdays from
// 2015-01-02, each asset with its own drift in [0, 6e-4] and volatility in
// [0.005, 0.02]; returns are floored at -0.5.
ReturnsPanel SyntheticReturns(std::size_t assets, std::size_t days, std::uint64_t seed);

}  // namespace advisor

#endif  // ADVISOR_SIMULATION_HPP_
