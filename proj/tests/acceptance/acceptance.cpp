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

// Acceptance checks; prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Optional arguments select criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "advisor/elicitation.hpp"
#include "advisor/error.hpp"
#include "advisor/io.hpp"
#include "advisor/kantorovich.hpp"
#include "advisor/lottery.hpp"
#include "advisor/portfolio.hpp"
#include "advisor/random.hpp"
#include "advisor/service.hpp"
#include "advisor/session.hpp"
#include "advisor/simulation.hpp"
#include "advisor/spq.hpp"

#include <httplib.h>

namespace advisor {
namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string DataPath(const std::string& name) {
  return std::string(ADVISOR_DATA_DIR) + "/" + name;
}

std::string Fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

unsigned Threads() { return std::max(1u, std::thread::hardware_concurrency()); }

BreakpointGrid RandomGrid(Rng& rng, std::size_t n, double bbar) {
  std::vector<double> pts{0.0, bbar};
  while (pts.size() < n) {
    const double y = rng.Uniform(0.0, bbar);
    if (std::none_of(pts.begin(), pts.end(),
                     [&](double p) { return std::abs(p - y) < 1e-3 * bbar; })) {
      pts.push_back(y);
    }
  }
  std::sort(pts.begin(), pts.end());
  return BreakpointGrid(pts);
}

PwlUtility RandomUtility(Rng& rng, const BreakpointGrid& g) {
  const std::size_t n = g.size();
  std::vector<double> s(n - 1);
  for (double& x : s) x = rng.Uniform() < 0.2 ? 0.0 : rng.Uniform();
  std::sort(s.rbegin(), s.rend());
  if (s[0] == 0.0) s[0] = 1.0;
  double mass = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) mass += s[j] * g.width(j);
  std::vector<double> alpha(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) alpha[j + 1] = alpha[j] + s[j] * g.width(j) / mass;
  alpha.back() = 1.0;
  return PwlUtility::FromAlpha(g, alpha);
}

// ---------------------------------------------------------------------------
// Elicitation instances shared by the validity, bracketing, equidistance and
// analytics checks.

struct Instance {
  std::size_t seed = 0;
  std::size_t k = 0;
  double rate = 0.0;
  ItemSet items;
  Questionnaire q;
  AnswerSheet answers;
  ElicitationSet set;
  double benchmark_neutral = 0.0;
};

const std::vector<Instance>& Instances(double* seconds) {
  static std::vector<Instance> cache;
  static double elapsed = 0.0;
  if (cache.empty()) {
    const auto start = std::chrono::steady_clock::now();
    const ItemSet items = LoadItemSet(DataPath("items20.json"));
    const double bbar = items.MaxOutcome();
    const BreakpointGrid grid = BreakpointGrid::FromLotteries(items.items(), bbar);
    const ScenarioSet scen = BuildScenarios(items, DefaultBenchmark(items));
    const std::size_t ks[] = {3, 5, 8, 10, 20, 40, 80, 190};
    for (std::size_t s = 0; s < 100; ++s) {
      Rng rng(DeriveSeed(20260101, s));
      Instance in;
      in.seed = s;
      in.k = ks[s % std::size(ks)];
      in.rate = s % 10 == 0 ? 0.0 : std::pow(10.0, rng.Uniform(-6.5, -4.5));
      const ClosedFormUtility truth = in.rate == 0.0 ? ClosedFormUtility::Linear(bbar)
                                                     : ClosedFormUtility::Exponential(in.rate, bbar);
      in.items = items;
      in.q = SelectPairsRandom(items, in.k, rng.Next());
      in.answers = AnswerQuestionnaire(truth, items, in.q);
      const ElicitationProblem problem(items, in.q, in.answers, grid, scen);
      in.set = problem.All();
      in.benchmark_neutral = problem.BenchmarkValue(in.set.neutral.utility);
      cache.push_back(std::move(in));
    }
    elapsed = Seconds(start);
  }
  if (seconds) *seconds = elapsed;
  return cache;
}

const ElicitationResult* Results(const Instance& in, int e) {
  const ElicitationResult* r[] = {&in.set.pessimistic, &in.set.optimistic, &in.set.neutral};
  return r[e];
}

// Largest violation of normalization, monotonicity, concavity and slope
// consistency.
double ShapeViolation(const PwlUtility& u) {
  const auto a = u.alpha();
  const auto b = u.beta();
  const BreakpointGrid& g = u.grid();
  double worst = std::max(std::abs(a.front()), std::abs(a.back() - 1.0));
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    const double s = b[j] * g.bbar();
    worst = std::max(worst, -s);
    worst = std::max(worst, std::abs(a[j + 1] - a[j] - b[j] * g.width(j)));
    if (j + 2 < g.size()) worst = std::max(worst, (b[j + 1] - b[j]) * g.bbar());
  }
  return worst;
}

// Largest violation of Z_k (E u(W_k) - E u(Y_k)) >= 0.
double AnswerViolation(const Instance& in, const PwlUtility& u) {
  double worst = 0.0;
  for (std::size_t k = 0; k < in.q.size(); ++k) {
    const double d = ExpectedUtility(u, in.items[in.q.pairs[k].first]) -
                     ExpectedUtility(u, in.items[in.q.pairs[k].second]);
    worst = std::max(worst, -static_cast<double>(static_cast<int>(in.answers.answers[k])) * d);
  }
  return worst;
}

Verdict ElicitationValidity() {
  double seconds = 0.0;
  const auto& instances = Instances(&seconds);
  double shape = 0.0, answers = 0.0;
  for (const Instance& in : instances) {
    for (int e = 0; e < 3; ++e) {
      shape = std::max(shape, ShapeViolation(Results(in, e)->utility));
      answers = std::max(answers, AnswerViolation(in, Results(in, e)->utility));
    }
  }
  Verdict o;
  o.pass = shape <= 1e-8 && answers <= 1e-8 && seconds < 300.0;
  o.detail = std::to_string(instances.size()) + " instances on items20, max shape violation " +
             Fmt(shape) + ", max answer violation " + Fmt(answers) + ", " + Fmt(seconds, 3) + " s";
  return o;
}

Verdict Bracketing() {
  double worst = 0.0;
  for (const Instance& in : Instances(nullptr)) {
    worst = std::max(worst, in.set.pessimistic.objective - in.benchmark_neutral);
    worst = std::max(worst, in.benchmark_neutral - in.set.optimistic.objective);
  }
  return {worst <= 1e-6, "max bracket violation " + Fmt(worst) + " over 100 instances"};
}

Verdict NeutralEquidistance() {
  double worst = 0.0;
  for (const Instance& in : Instances(nullptr)) {
    const double dp = KantorovichClosedForm(in.set.neutral.utility, in.set.pessimistic.utility).value;
    const double dop = KantorovichClosedForm(in.set.neutral.utility, in.set.optimistic.utility).value;
    worst = std::max(worst, std::abs(dp - dop));
  }
  return {worst <= 1e-3, "max |d(N,P) - d(N,O)| " + Fmt(worst) + " over 100 instances"};
}

Verdict KantorovichOracle() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(404);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + rng.Below(8);
    const BreakpointGrid g = RandomGrid(rng, n, rng.Uniform(1.0, 1e6));
    const PwlUtility u = RandomUtility(rng, g);
    const PwlUtility v = RandomUtility(rng, g);
    worst = std::max(worst, std::abs(KantorovichSocp(u, v).value -
                                     KantorovichClosedForm(u, v).value));
  }
  const double seconds = Seconds(start);
  return {worst <= 1e-4 && seconds < 60.0,
          "200 pairs N in 3..10, max |socp - closed form| " + Fmt(worst) + ", " +
              Fmt(seconds, 3) + " s"};
}

Verdict UnconstrainedClosedForms() {
  Rng rng(55);
  double worst_p = 0.0, worst_o = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double bbar = 500000.0;
    const BreakpointGrid g = RandomGrid(rng, 3 + rng.Below(6), bbar);
    const ItemSet items("pair", {Lottery::Sure("A", g[1]), Lottery::Sure("B", g[2])});
    Questionnaire q;
    q.pairs = {{0, 1}};
    const AnswerSheet none{"", {Choice::kNone}};
    const double y = t == 0 ? 0.0 : (t == 1 ? bbar : rng.Uniform(0.0, bbar));
    const ElicitationProblem p(items, q, none, g, ScenarioSet{{{y, 1.0}}});
    worst_p = std::max(worst_p, std::abs(p.Pessimistic().objective - y / bbar));
    const ElicitationProblem o(items, q, none, g, ScenarioSet{{{g[1], 1.0}}});
    worst_o = std::max(worst_o, std::abs(o.Optimistic().objective - 1.0));
  }
  return {worst_p <= 1e-6 && worst_o <= 1e-6,
          "20 grids, max |pessimistic - y/bbar| " + Fmt(worst_p) +
              ", max |optimistic(y2) - 1| " + Fmt(worst_o)};
}

Verdict ConvergenceTrend() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.ks = {10, 20, 50, 100, 190};
  cfg.repetitions = 30;
  cfg.seed = 2026;
  cfg.threads = Threads();
  const ItemSet items = LoadItemSet(DataPath("items20.json"));
  const ExperimentReport report = RunConvergence(items, cfg);
  const double seconds = Seconds(start);
  bool pass = seconds < 1200.0;
  std::string detail;
  for (Estimator e : {Estimator::kPessimistic, Estimator::kOptimistic, Estimator::kNeutral}) {
    std::vector<double> m;
    for (std::size_t k : cfg.ks) m.push_back(report.Mean("random", e, k));
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < 4; ++i) decreasing = decreasing && m[i + 1] < m[i];
    const bool halved = m[4] <= 0.5 * m[0];
    pass = pass && decreasing && halved;
    detail += std::string(EstimatorName(e)) + " [";
    for (std::size_t i = 0; i < m.size(); ++i) detail += (i ? " " : "") + Fmt(m[i], 3);
    detail += "]" + std::string(decreasing ? "" : " not decreasing") +
              (halved ? "" : " K=190 above half of K=10") + "; ";
  }
  return {pass, "K=10,20,50,100,190 means: " + detail + Fmt(seconds, 3) + " s"};
}

Verdict SpqAdvantage() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.ks = {5};
  cfg.repetitions = 50;
  cfg.seed = 2026;
  cfg.threads = Threads();
  const ItemSet items = LoadItemSet(DataPath("items20.json"));
  const ExperimentReport report = RunSpqVsRandom(items, cfg);
  const double seconds = Seconds(start);
  const double paper_spq[] = {0.0941, 0.0665, 0.0803};
  const double paper_random[] = {0.1108, 0.0799, 0.0943};
  bool pass = seconds < 900.0;
  std::string detail;
  int e = 0;
  for (Estimator est : {Estimator::kPessimistic, Estimator::kOptimistic, Estimator::kNeutral}) {
    const double spq = report.Mean("spq", est, 5);
    const double rnd = report.Mean("random", est, 5);
    const bool order = spq < rnd;
    auto within = [](double v, double ref) { return v >= 0.3 * ref && v <= 3.0 * ref; };
    const bool range = within(spq, paper_spq[e]) && within(rnd, paper_random[e]);
    pass = pass && order && range;
    detail += std::string(EstimatorName(est)) + " spq " + Fmt(spq, 3) + " vs random " +
              Fmt(rnd, 3) + (order ? "" : " (spq not lower)") +
              (range ? "" : " (outside [0.3x, 3x])") + "; ";
    ++e;
  }
  return {pass, "K=5, 50 repetitions: " + detail + Fmt(seconds, 3) + " s"};
}

ReturnsPanel RandomPanel(Rng& rng, std::size_t rows, std::size_t risky, double spread) {
  Eigen::MatrixXd net(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(risky));
  for (Eigen::Index i = 0; i < net.size(); ++i) {
    net.data()[i] = rng.Uniform(-spread, spread) + 0.2 * spread;
  }
  std::vector<std::string> names, dates;
  for (std::size_t s = 0; s < risky; ++s) names.push_back("A" + std::to_string(s + 1));
  for (std::size_t t = 0; t < rows; ++t) dates.push_back("T" + std::to_string(100000 + t));
  return ReturnsPanel::FromNetReturns(names, dates, net);
}

Verdict PortfolioCorrectness() {
  constexpr double kBbar = 500000.0;
  Rng rng(808);
  double eval_gap = 0.0;
  for (int t = 0; t < 50; ++t) {
    const BreakpointGrid g = RandomGrid(rng, 3 + rng.Below(8), kBbar);
    const PwlUtility u = RandomUtility(rng, g);
    const ReturnsPanel panel = RandomPanel(rng, 5 + rng.Below(20), 1 + rng.Below(4), 0.2);
    const double budget = rng.Uniform(1000.0, 300000.0);
    const PortfolioSpec spec = PortfolioSpec::WithCapFraction(budget, panel.columns(), 0.5);
    const Portfolio p = OptimizePortfolio(u, panel, spec);
    eval_gap = std::max(eval_gap, std::abs(p.objective - EvaluatePortfolio(u, panel, p.x)));
  }
  double grid_gap = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double budget = 100000.0;
    const BreakpointGrid g({0.0, rng.Uniform(60000.0, 140000.0), rng.Uniform(150000.0, 300000.0),
                            kBbar});
    const PwlUtility u = RandomUtility(rng, g);
    const ReturnsPanel panel = RandomPanel(rng, 2 + rng.Below(4), 1, 0.3);
    const Portfolio p =
        OptimizePortfolio(u, panel, PortfolioSpec::WithCapFraction(budget, 2, 1.0));
    double best = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double risky = budget * i / 1000.0;
      const std::vector<double> x{budget - risky, risky};
      best = std::max(best, EvaluatePortfolio(u, panel, x));
    }
    grid_gap = std::max(grid_gap, std::abs(p.objective - best));
  }
  double greedy_gap = 0.0, greedy_obj_gap = 0.0;
  for (int t = 0; t < 20; ++t) {
    const PwlUtility u = PwlUtility::Linear(BreakpointGrid({0.0, 100000.0, kBbar}));
    const ReturnsPanel panel = RandomPanel(rng, 30, 2 + rng.Below(4), 0.05);
    const double budget = rng.Uniform(10000.0, 200000.0);
    const PortfolioSpec spec = PortfolioSpec::WithCapFraction(budget, panel.columns(), 0.3);
    const Portfolio p = OptimizePortfolio(u, panel, spec);
    const Eigen::VectorXd mean = panel.factors.colwise().mean();
    std::vector<std::size_t> order(panel.columns());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });
    std::vector<double> greedy(panel.columns(), 0.0);
    double left = budget;
    for (std::size_t s : order) {
      greedy[s] = std::min(left, spec.caps[s]);
      left -= greedy[s];
    }
    for (std::size_t s = 0; s < greedy.size(); ++s) {
      greedy_gap = std::max(greedy_gap, std::abs(p.x[s] - greedy[s]) / budget);
    }
    greedy_obj_gap =
        std::max(greedy_obj_gap, std::abs(p.objective - EvaluatePortfolio(u, panel, greedy)));
  }
  return {eval_gap <= 1e-8 && grid_gap <= 1e-4 && greedy_gap <= 1e-8 && greedy_obj_gap <= 1e-8,
          "50 instances max |LP - direct| " + Fmt(eval_gap) + "; 20 two-asset max |LP - grid| " +
              Fmt(grid_gap) + "; 20 linear max allocation gap " + Fmt(greedy_gap) +
              " of budget, objective gap " + Fmt(greedy_obj_gap)};
}

Verdict BacktestIntegrity() {
  const ItemSet items = LoadItemSet(DataPath("items20.json"));
  const double bbar = items.MaxOutcome();
  const Questionnaire q = SelectPairsRandom(items, 8, 77);
  const AnswerSheet a = AnswerQuestionnaire(ClosedFormUtility::Default(), items, q);
  const BreakpointGrid grid = BreakpointGrid::FromLotteries(items.items(), bbar);
  const ElicitationSet set =
      ElicitationProblem(items, q, a, grid, BuildScenarios(items, DefaultBenchmark(items))).All();
  const ReturnsPanel panel = SyntheticReturns(5, 1800, 2026);
  BacktestConfig cfg;
  cfg.window = 60;
  cfg.hold = 7;
  cfg.cap_fraction = 0.4;
  cfg.initial_wealth = 10000.0;
  const auto curves = RunBacktest(panel, cfg,
                                  {{"pessimistic", set.pessimistic.utility},
                                   {"optimistic", set.optimistic.utility},
                                   {"neutral", set.neutral.utility},
                                   {"true", ClosedFormUtility::Default().RestrictTo(grid)}});
  double budget_gap = 0.0, cap_gap = 0.0, min_wealth = INFINITY;
  std::size_t rebalances = 0;
  for (const WealthCurve& c : curves) {
    for (double w : c.wealth) min_wealth = std::min(min_wealth, w);
    for (const Rebalance& r : c.rebalances) {
      ++rebalances;
      double sum = 0.0;
      for (std::size_t s = 0; s < r.x.size(); ++s) {
        sum += r.x[s];
        const double cap = s == 0 ? r.wealth : cfg.cap_fraction * r.wealth;
        cap_gap = std::max(cap_gap, (r.x[s] - cap) / r.wealth);
        cap_gap = std::max(cap_gap, -r.x[s] / r.wealth);
      }
      budget_gap = std::max(budget_gap, std::abs(sum - r.wealth) / r.wealth);
    }
  }
  const bool pass = curves.size() == 4 && rebalances > 0 && budget_gap <= 1e-8 &&
                    cap_gap <= 1e-8 && min_wealth > 0.0;
  return {pass, std::to_string(rebalances) + " rebalances over 4 curves, max budget gap " +
                    Fmt(budget_gap) + ", max cap excess " + Fmt(cap_gap) + ", min wealth " +
                    Fmt(min_wealth, 6)};
}

Verdict Analytics() {
  Rng rng(1010);
  bool linear_zero = true;
  for (int t = 0; t < 50; ++t) {
    const BreakpointGrid g = RandomGrid(rng, 2 + rng.Below(12), rng.Uniform(1.0, 1e6));
    linear_zero = linear_zero && GiniCoefficient(PwlUtility::Linear(g)).value == 0.0;
  }
  double gini_min = INFINITY, gini_max = -INFINITY, risk_min = INFINITY;
  for (const Instance& in : Instances(nullptr)) {
    for (int e = 0; e < 3; ++e) {
      const RiskAnalytics r = RiskAversion(Results(in, e)->utility);
      gini_min = std::min(gini_min, r.gini);
      gini_max = std::max(gini_max, r.gini);
      for (const auto* v : {&r.ara, &r.rra}) {
        for (const KinkMeasure& k : *v) {
          if (k.value) risk_min = std::min(risk_min, *k.value);
        }
      }
    }
  }
  const BreakpointGrid half({0.0, 0.5, 1.0});
  const double gini_hand = GiniCoefficient(PwlUtility::FromAlpha(half, {0.0, 1.0, 1.0})).value;
  const RiskAnalytics kink = RiskAversion(PwlUtility::FromAlpha(half, {0.0, 2.0 / 3.0, 1.0}));
  const double ara = kink.ara.size() == 1 && kink.ara[0].value ? *kink.ara[0].value : NAN;
  const double rra = kink.rra.size() == 1 && kink.rra[0].value ? *kink.rra[0].value : NAN;
  const bool hand = std::abs(gini_hand - 0.5) <= 1e-12 && std::abs(ara - 0.25) <= 1e-12 &&
                    std::abs(rra - 0.125) <= 1e-12;
  const bool pass = linear_zero && gini_min >= 0.0 && gini_max <= 1.0 && risk_min >= 0.0 && hand;
  return {pass, std::string("linear Gini exactly 0 on 50 grids: ") + (linear_zero ? "yes" : "no") +
                    "; elicited Gini in [" + Fmt(gini_min) + ", " + Fmt(gini_max) +
                    "], min ARA/RRA " + Fmt(risk_min) + "; hand examples Gini " +
                    Fmt(gini_hand, 17) + ", ARA " + Fmt(ara, 17) + ", RRA " + Fmt(rra, 17)};
}

Verdict ServicePipeline() {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("advisor_acceptance_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const ItemSet items = LoadItemSet(DataPath("items10.json"));
  WriteTextFileAtomic((dir / "ratings.csv").string(),
                      RatingsCsv(SimulateRatings(items, 200, 5).ratings));
  WriteTextFileAtomic((dir / "returns.csv").string(), ReturnsCsv(SyntheticReturns(5, 250, 6)));
  ServiceConfig cfg;
  cfg.bind = "127.0.0.1:0";
  cfg.data_dir = (dir / "sessions").string();
  cfg.item_sets = {{DataPath("items10.json"), (dir / "ratings.csv").string()}};
  cfg.returns_path = (dir / "returns.csv").string();

  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
    return ok;
  };
  std::string session_id;
  Json http_utilities;
  std::size_t k = 0;
  {
    AdvisorService service(cfg);
    const int port = service.Start();
    httplib::Client client("127.0.0.1", port);
    auto post = [&](const std::string& path, const Json& body) -> std::pair<int, Json> {
      auto r = client.Post(path, body.dump(), "application/json");
      if (!r) return {0, Json()};
      return {r->status, ParseJson(r->body, path)};
    };
    const auto created = post("/v1/sessions", Json{{"method", "spq"}});
    if (expect(created.first == 201, "create returned " + std::to_string(created.first))) {
      session_id = created.second["session_id"];
      const Json& questions = created.second["questions"];
      k = questions.size();
      expect(k == 8, "default K is " + std::to_string(k));
      const ClosedFormUtility truth = ClosedFormUtility::Exponential(1e-5, items.MaxOutcome());
      Json answers = Json::array();
      for (const Json& q : questions) {
        const Lottery w = items[items.IndexOf(q["first"]["id"])];
        const Lottery y = items[items.IndexOf(q["second"]["id"])];
        const double d = truth.Expected(w) - truth.Expected(y);
        answers.push_back(Json{{"pair_index", q["index"]},
                               {"choice", d > 1e-12 ? "first" : (d < -1e-12 ? "second" : "none")}});
      }
      const std::string base = "/v1/sessions/" + session_id;
      const auto answered = post(base + "/answers", Json{{"answers", answers}});
      expect(answered.first == 200 && answered.second["status"] == "answered",
             "answers returned " + std::to_string(answered.first));
      const auto elicited = post(base + "/elicit", Json::object());
      expect(elicited.first == 200 && elicited.second["utilities"].size() == 3,
             "elicit returned " + std::to_string(elicited.first));
      http_utilities = elicited.second["utilities"];
      const auto again = post(base + "/elicit", Json::object());
      expect(again.second["utilities"] == http_utilities, "elicit is not idempotent");
      const auto portfolio =
          post(base + "/portfolio", Json{{"estimator", "neutral"}, {"budget", 10000.0}});
      if (expect(portfolio.first == 200, "portfolio returned " + std::to_string(portfolio.first) +
                                             " " + portfolio.second.dump())) {
        double sum = 0.0;
        for (const Json& a : portfolio.second["allocation"]) sum += a["amount"].get<double>();
        expect(std::abs(sum - 10000.0) <= 1e-6, "allocation sums to " + Fmt(sum, 12));
        expect(portfolio.second["wealth_preview"].size() == cfg.portfolio_window,
               "wealth preview length");
      }
      auto got = client.Get(base);
      expect(got && got->status == 200 && ParseJson(got->body, "get")["status"] == "recommended",
             "final status is not recommended");
    }
    service.Stop();
  }

  bool replayed = false;
  if (!session_id.empty()) {
    const SessionRecord r = SessionStore(cfg.data_dir).Get(session_id);
    const ElicitationSet set =
        ElicitationProblem(items, r.questionnaire, r.Sheet(),
                           BreakpointGrid::FromLotteries(items.items(), items.MaxOutcome()),
                           BuildScenarios(items, DefaultBenchmark(items)))
            .All();
    replayed = r.utilities.size() == 3;
    const ElicitationResult* fresh[] = {&set.pessimistic, &set.optimistic, &set.neutral};
    for (int e = 0; replayed && e < 3; ++e) {
      const ElicitationResult* stored = r.Utility(fresh[e]->estimator);
      const PwlUtility from_http =
          UtilityFromJson(http_utilities[EstimatorName(fresh[e]->estimator)]);
      replayed = stored && stored->utility == fresh[e]->utility &&
                 from_http == fresh[e]->utility && stored->objective == fresh[e]->objective;
    }
    expect(replayed, "replayed utilities differ from stored or served ones");
  }
  std::filesystem::remove_all(dir);
  std::string detail = "create, answer " + std::to_string(k) +
                       ", elicit, portfolio over HTTP; replay identical: " +
                       (replayed ? "yes" : "no") + "; no secondary component built";
  for (const std::string& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace
}  // namespace advisor

int main(int argc, char** argv) {
  using advisor::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "elicitation validity", advisor::ElicitationValidity},
      {2, "bracketing", advisor::Bracketing},
      {3, "neutral equidistance", advisor::NeutralEquidistance},
      {4, "kantorovich oracle equivalence", advisor::KantorovichOracle},
      {5, "unconstrained closed forms", advisor::UnconstrainedClosedForms},
      {6, "convergence trend", advisor::ConvergenceTrend},
      {7, "spq advantage", advisor::SpqAdvantage},
      {8, "portfolio lp correctness", advisor::PortfolioCorrectness},
      {9, "backtest integrity", advisor::BacktestIntegrity},
      {10, "analytics", advisor::Analytics},
      {11, "service pipeline", advisor::ServicePipeline},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    advisor::Verdict o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
