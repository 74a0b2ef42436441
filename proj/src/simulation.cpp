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

#include "advisor/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include "advisor/error.hpp"
#include "advisor/kantorovich.hpp"
#include "advisor/random.hpp"

namespace advisor {
namespace {

constexpr Estimator kEstimators[] = {Estimator::kPessimistic, Estimator::kOptimistic,
                                     Estimator::kNeutral};

// Runs body(r) for r in [0, count) on up to `threads` workers.
template <typename Body>
void ParallelFor(std::size_t count, unsigned threads, Body body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t r = w; r < count; r += workers) {
        try {
          body(r);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

BreakpointGrid ExperimentGrid(const ItemSet& items, const Questionnaire& q, bool full) {
  const double bbar = items.MaxOutcome();
  if (full) return BreakpointGrid::FromLotteries(items.items(), bbar);
  std::vector<double> values;
  for (const ItemPair& p : q.pairs) {
    for (std::size_t i : {p.first, p.second}) {
      for (const Outcome& o : items[i].outcomes()) values.push_back(o.value);
    }
  }
  return BreakpointGrid::FromValues(values, bbar);
}

void Elicit(const ItemSet& items, const Questionnaire& q, const ExperimentConfig& cfg,
            const ScenarioSet& scenarios, const std::string& method, std::size_t rep,
            std::vector<DistanceRecord>& out) {
  const AnswerSheet answers = AnswerQuestionnaire(cfg.truth, items, q);
  const BreakpointGrid grid = ExperimentGrid(items, q, cfg.item_set_grid);
  const ElicitationProblem problem(items, q, answers, grid, scenarios, cfg.elicitation);
  const ElicitationSet set = problem.All();
  const PwlUtility truth = cfg.truth.RestrictTo(grid);
  for (const ElicitationResult* r : {&set.pessimistic, &set.optimistic, &set.neutral}) {
    out.push_back({method, r->estimator, q.size(), rep,
                   KantorovichClosedForm(r->utility, truth).value});
  }
}

void ValidateConfig(const ItemSet& items, const ExperimentConfig& cfg) {
  Require(!cfg.ks.empty(), "experiment needs at least one K");
  Require(cfg.repetitions >= 1, "experiment needs at least one repetition");
  for (std::size_t k : cfg.ks) {
    Require(k >= 1 && k <= PairCount(items.size()),
            "K = " + std::to_string(k) + " outside 1.." + std::to_string(PairCount(items.size())));
  }
  Require(cfg.truth.bbar() == items.MaxOutcome(),
          "true utility bound must equal the largest item outcome");
}

double Variance(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

// Proleptic Gregorian date for a day count from 1970-01-01.
std::string CivilDate(long z) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const long doe = z - era * 146097;
  const long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const long mp = (5 * doy + 2) / 153;
  const long d = doy - (153 * mp + 2) / 5 + 1;
  const long m = mp < 10 ? mp + 3 : mp - 9;
  const long y = yoe + era * 400 + (m <= 2);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04ld-%02ld-%02ld", y, m, d);
  return buf;
}

}  // namespace

AnswerSheet AnswerQuestionnaire(const ClosedFormUtility& u, const ItemSet& items,
                                const Questionnaire& q) {
  q.Validate(items.size());
  AnswerSheet sheet;
  sheet.questionnaire_id = q.id;
  for (const ItemPair& p : q.pairs) {
    const double diff = u.Expected(items[p.first]) - u.Expected(items[p.second]);
    sheet.answers.push_back(std::abs(diff) <= 1e-12 ? Choice::kNone
                                                    : (diff > 0.0 ? Choice::kFirst : Choice::kSecond));
  }
  return sheet;
}

std::optional<std::vector<double>> QuadraticRatings(const ItemSet& items, double a,
                                                    double b, double c, double bbar) {
  Require(bbar > 0.0, "rating scale bound must be positive");
  std::vector<double> score(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    double s = 0.0;
    for (const Outcome& o : items[i].outcomes()) {
      const double x = o.value / bbar;
      s += o.prob * (a * x * x + b * x + c);
    }
    score[i] = s;
  }
  const auto [lo, hi] = std::minmax_element(score.begin(), score.end());
  const double range = *hi - *lo;
  if (!(range > 1e-12 * std::max(1.0, std::abs(*hi)))) return std::nullopt;
  const double base = *lo;
  for (double& s : score) s = std::clamp(10.0 * (s - base) / range, 0.0, 10.0);
  return score;
}

RatingSimulation SimulateRatings(const ItemSet& items, std::size_t users, std::uint64_t seed) {
  Require(users >= 1, "at least one rater is required");
  Require(items.size() >= 2, "at least two items are required");
  const double bbar = items.MaxOutcome();
  Rng rng(seed);
  RatingSimulation out;
  std::vector<Rating> entries;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  for (const Lottery& l : items.items()) item_ids.push_back(l.id());
  for (std::size_t u = 0; u < users; ++u) {
    user_ids.push_back("sim" + std::to_string(u + 1));
    std::optional<std::vector<double>> r;
    while (true) {
      const double a = rng.Uniform(-50.0, 50.0);
      const double b = rng.Uniform(-50.0, 50.0);
      const double c = rng.Uniform(-50.0, 50.0);
      r = QuadraticRatings(items, a, b, c, bbar);
      if (r) break;
      ++out.redraws;
    }
    for (std::size_t i = 0; i < items.size(); ++i) entries.push_back({u, i, (*r)[i]});
  }
  out.ratings = RatingsMatrix(std::move(user_ids), std::move(item_ids), std::move(entries));
  return out;
}

PreferenceGraph BuildPreferenceGraph(const ItemSet& items, const Questionnaire& q,
                                     const AnswerSheet& answers) {
  q.Validate(items.size());
  answers.Validate(q);
  PreferenceGraph g;
  for (const Lottery& l : items.items()) g.vertices.push_back(l.id());
  for (std::size_t k = 0; k < q.size(); ++k) {
    const ItemPair& p = q.pairs[k];
    switch (answers.answers[k]) {
      case Choice::kFirst: g.edges.push_back({p.second, p.first}); break;
      case Choice::kSecond: g.edges.push_back({p.first, p.second}); break;
      case Choice::kNone: break;
    }
  }
  return g;
}

BenchmarkSpec DefaultBenchmark(const ItemSet& items) {
  BenchmarkSpec spec = BenchmarkSpec::Uniform(items.size());
  double support = 1.0;
  for (const Lottery& l : items.items()) support *= static_cast<double>(l.outcomes().size());
  if (support > static_cast<double>(kMaxExactSupport)) {
    spec.policy = ScenarioPolicy::kMonteCarlo;
    spec.samples = 10000;
    spec.seed = 1;
  }
  return spec;
}

std::vector<SummaryCell> ExperimentReport::Summary() const {
  std::map<std::tuple<std::string, int, std::size_t>, std::vector<double>> cells;
  for (const DistanceRecord& r : records) {
    cells[{r.method, static_cast<int>(r.estimator), r.k}].push_back(r.distance);
  }
  std::vector<SummaryCell> out;
  for (const auto& [key, values] : cells) {
    SummaryCell c;
    c.method = std::get<0>(key);
    c.estimator = static_cast<Estimator>(std::get<1>(key));
    c.k = std::get<2>(key);
    c.count = values.size();
    for (double v : values) c.mean += v;
    c.mean /= static_cast<double>(values.size());
    c.stddev = std::sqrt(Variance(values, c.mean));
    out.push_back(c);
  }
  return out;
}

double ExperimentReport::Mean(const std::string& method, Estimator e, std::size_t k) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const DistanceRecord& r : records) {
    if (r.method == method && r.estimator == e && r.k == k) {
      sum += r.distance;
      ++n;
    }
  }
  if (n == 0) {
    Fail(ErrorCode::kNotFound, "no records for " + method + " " + EstimatorName(e) +
                                   " K=" + std::to_string(k));
  }
  return sum / static_cast<double>(n);
}

ExperimentReport RunSpqVsRandom(const ItemSet& items, const ExperimentConfig& config) {
  ValidateConfig(items, config);
  const ScenarioSet scenarios = BuildScenarios(items, DefaultBenchmark(items));
  const std::size_t kmax = *std::max_element(config.ks.begin(), config.ks.end());
  std::vector<std::vector<DistanceRecord>> per_rep(config.repetitions);
  std::vector<std::size_t> redraws(config.repetitions, 0);
  ParallelFor(config.repetitions, config.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = DeriveSeed(config.seed, rep);
    const RatingSimulation sim = SimulateRatings(items, config.raters, DeriveSeed(rep_seed, 1));
    redraws[rep] = sim.redraws;
    LfmConfig lfm = config.lfm;
    lfm.seed = DeriveSeed(rep_seed, 2);
    const LfmModel model = FitLfm(sim.ratings, lfm);
    const Questionnaire greedy = SelectPairsSpq(model, items, kmax);
    for (std::size_t k : config.ks) {
      Questionnaire spq = greedy;
      spq.pairs.resize(k);
      spq.objective.reset();
      const Questionnaire rnd = SelectPairsRandom(items, k, DeriveSeed(rep_seed, 1000 + k));
      Elicit(items, spq, config, scenarios, "spq", rep, per_rep[rep]);
      Elicit(items, rnd, config, scenarios, "random", rep, per_rep[rep]);
    }
  });
  ExperimentReport report;
  report.experiment = "spq-vs-random";
  report.config = config;
  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    report.records.insert(report.records.end(), per_rep[rep].begin(), per_rep[rep].end());
    report.rating_redraws += redraws[rep];
  }
  return report;
}

ExperimentReport RunConvergence(const ItemSet& items, const ExperimentConfig& config) {
  ValidateConfig(items, config);
  const ScenarioSet scenarios = BuildScenarios(items, DefaultBenchmark(items));
  std::vector<std::vector<DistanceRecord>> per_rep(config.repetitions);
  ParallelFor(config.repetitions, config.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = DeriveSeed(config.seed, rep);
    for (std::size_t k : config.ks) {
      const Questionnaire q = SelectPairsRandom(items, k, DeriveSeed(rep_seed, 1000 + k));
      Elicit(items, q, config, scenarios, "random", rep, per_rep[rep]);
    }
  });
  ExperimentReport report;
  report.experiment = "convergence";
  report.config = config;
  for (const auto& r : per_rep) report.records.insert(report.records.end(), r.begin(), r.end());
  return report;
}

PopulationReport PopulationGini(const ItemSet& items, const Questionnaire& q,
                                std::span<const AnswerSheet> sheets,
                                std::span<const std::string> groups,
                                const BreakpointGrid& grid, const ScenarioSet& scenarios,
                                const ElicitationOptions& options) {
  Require(groups.empty() || groups.size() == sheets.size(),
          "group labels must match the number of answer sheets");
  PopulationReport report;
  std::map<std::string, std::vector<const GiniRow*>> by_group;
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    const std::string group = groups.empty() ? "all" : groups[i];
    try {
      const ElicitationProblem problem(items, q, sheets[i], grid, scenarios, options);
      const ElicitationSet set = problem.All();
      report.rows.push_back({i, group, GiniCoefficient(set.pessimistic.utility).value,
                             GiniCoefficient(set.optimistic.utility).value,
                             GiniCoefficient(set.neutral.utility).value});
    } catch (const InconsistentAnswers&) {
      report.infeasible.push_back(i);
    }
  }
  for (const GiniRow& r : report.rows) by_group[r.group].push_back(&r);
  for (const auto& [name, rows] : by_group) {
    GroupStats g;
    g.group = name;
    g.count = rows.size();
    for (int e = 0; e < 3; ++e) {
      std::vector<double> v;
      for (const GiniRow* r : rows) {
        v.push_back(e == 0 ? r->pessimistic : (e == 1 ? r->optimistic : r->neutral));
      }
      for (double x : v) g.mean[e] += x;
      g.mean[e] /= static_cast<double>(v.size());
      g.variance[e] = Variance(v, g.mean[e]);
    }
    report.groups.push_back(g);
  }
  return report;
}

ReturnsPanel SyntheticReturns(std::size_t assets, std::size_t days, std::uint64_t seed) {
  Require(assets >= 1 && days >= 1, "synthetic panel needs assets and days");
  Rng rng(seed);
  std::vector<double> drift(assets), vol(assets);
  std::vector<std::string> names;
  for (std::size_t s = 0; s < assets; ++s) {
    drift[s] = rng.Uniform(0.0, 6e-4);
    vol[s] = rng.Uniform(0.005, 0.02);
    names.push_back("A" + std::to_string(s + 1));
  }
  std::vector<std::string> dates;
  Eigen::MatrixXd net(static_cast<Eigen::Index>(days), static_cast<Eigen::Index>(assets));
  long day = 16437;  // 2015-01-02, a Friday
  for (std::size_t t = 0; t < days; ++t) {
    while ((day + 4) % 7 == 6 || (day + 4) % 7 == 0) ++day;
    dates.push_back(CivilDate(day));
    ++day;
    for (std::size_t s = 0; s < assets; ++s) {
      net(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) =
          std::max(-0.5, drift[s] + vol[s] * rng.Normal());
    }
  }
  return ReturnsPanel::FromNetReturns(std::move(names), std::move(dates), net);
}

}  // namespace advisor
