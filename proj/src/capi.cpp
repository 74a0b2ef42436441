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

#include "advisor/advisor.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "advisor/elicitation.hpp"
#include "advisor/error.hpp"
#include "advisor/io.hpp"
#include "advisor/kantorovich.hpp"
#include "advisor/lottery.hpp"
#include "advisor/portfolio.hpp"
#include "advisor/service.hpp"
#include "advisor/simulation.hpp"
#include "advisor/spq.hpp"

struct advisor_item_set {
  advisor::ItemSet items;
};

struct advisor_ratings {
  advisor::RatingsMatrix ratings;
};

struct advisor_lfm {
  advisor::LfmModel model;
  advisor::RatingsMatrix ratings;
};

struct advisor_questionnaire {
  advisor::Questionnaire q;
  advisor::ItemSet items;
};

struct advisor_answers {
  advisor::AnswerSheet sheet;
};

struct advisor_elicitation {
  advisor::ElicitationSet set;
};

struct advisor_utility {
  advisor::PwlUtility u;
  std::optional<advisor::Estimator> estimator;
  std::optional<double> objective;
};

struct advisor_returns {
  advisor::ReturnsPanel panel;
};

struct advisor_service {
  std::unique_ptr<advisor::AdvisorService> service;
};

namespace {

using advisor::ErrorCode;
using advisor::Json;

thread_local std::string g_error;
thread_local std::string g_details = "{}";

void ClearError() {
  g_error.clear();
  g_details = "{}";
}

advisor_status SetError(ErrorCode code, const std::string& message, const Json& details) {
  g_error = message;
  g_details = details.dump();
  return static_cast<advisor_status>(code);
}

// Runs `body` and maps exceptions to status codes.
template <typename F>
advisor_status Guard(F&& body) {
  ClearError();
  try {
    body();
    return ADVISOR_OK;
  } catch (const advisor::InconsistentAnswers& e) {
    return SetError(e.code(), e.what(), Json{{"conflicting_pairs", e.conflict()}});
  } catch (const advisor::Error& e) {
    return SetError(e.code(), e.what(), Json::object());
  } catch (const std::bad_alloc&) {
    return SetError(ErrorCode::kInternal, "out of memory", Json::object());
  } catch (const std::exception& e) {
    return SetError(ErrorCode::kInternal, e.what(), Json::object());
  }
}

void NotNull(const void* p, const char* name) {
  advisor::Require(p != nullptr, std::string(name) + " must not be null");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void Emit(char** out, const std::string& s) {
  NotNull(out, "out");
  *out = CopyString(s);
}

template <typename T>
void Publish(T** out, std::unique_ptr<T> value) {
  *out = value.release();
}

advisor::Estimator ToEstimator(advisor_estimator e) {
  switch (e) {
    case ADVISOR_PESSIMISTIC:
      return advisor::Estimator::kPessimistic;
    case ADVISOR_OPTIMISTIC:
      return advisor::Estimator::kOptimistic;
    case ADVISOR_NEUTRAL:
      return advisor::Estimator::kNeutral;
  }
  advisor::Fail(ErrorCode::kInvalidArgument, "unknown estimator");
}

const advisor::ElicitationResult& Pick(const advisor::ElicitationSet& s, advisor::Estimator e) {
  switch (e) {
    case advisor::Estimator::kPessimistic:
      return s.pessimistic;
    case advisor::Estimator::kOptimistic:
      return s.optimistic;
    case advisor::Estimator::kNeutral:
      break;
  }
  return s.neutral;
}

advisor::LfmConfig ToLfm(const advisor_lfm_config& c) {
  advisor::LfmConfig cfg;
  cfg.dim = c.dim;
  cfg.lambda_user = c.lambda_user;
  cfg.lambda_item = c.lambda_item;
  cfg.max_iters = c.max_iters;
  cfg.tol = c.tol;
  cfg.seed = c.seed;
  return cfg;
}

advisor::ExperimentConfig ToExperiment(const advisor_experiment_config& c,
                                       const advisor::ItemSet& items) {
  advisor::Require(c.ks != nullptr || c.ks_len == 0, "ks must not be null");
  advisor::ExperimentConfig cfg;
  cfg.ks.assign(c.ks, c.ks + c.ks_len);
  cfg.repetitions = c.repetitions;
  cfg.seed = c.seed;
  cfg.raters = c.raters;
  cfg.threads = c.threads;
  cfg.item_set_grid = c.item_set_grid != 0;
  cfg.lfm = ToLfm(c.lfm);
  cfg.truth = advisor::ClosedFormUtility::Exponential(c.truth_rate, items.MaxOutcome());
  return cfg;
}

}  // namespace

const char* advisor_version(void) { return "1.0.0"; }

const char* advisor_status_name(advisor_status status) {
  if (status == ADVISOR_OK) return "ok";
  return advisor::ErrorCodeName(static_cast<ErrorCode>(status));
}

const char* advisor_last_error(void) { return g_error.c_str(); }

const char* advisor_last_error_details(void) { return g_details.c_str(); }

void advisor_string_free(char* s) { std::free(s); }

advisor_status advisor_item_set_load(const char* path, advisor_item_set** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_item_set>(advisor_item_set{advisor::LoadItemSet(path)}));
  });
}

advisor_status advisor_item_set_parse(const char* json, advisor_item_set** out) {
  return Guard([&] {
    NotNull(json, "json");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_item_set>(
                     advisor_item_set{advisor::ItemSetFromJson(advisor::ParseJson(json, "item set"))}));
  });
}

size_t advisor_item_set_size(const advisor_item_set* items) {
  return items == nullptr ? 0 : items->items.size();
}

double advisor_item_set_bbar(const advisor_item_set* items) {
  return items == nullptr ? 0.0 : items->items.MaxOutcome();
}

advisor_status advisor_item_set_to_json(const advisor_item_set* items, char** out) {
  return Guard([&] {
    NotNull(items, "items");
    Emit(out, advisor::CanonicalJson(advisor::ItemSetToJson(items->items)));
  });
}

void advisor_item_set_free(advisor_item_set* items) { delete items; }

advisor_status advisor_ratings_load(const advisor_item_set* items, const char* path,
                                    advisor_ratings** out) {
  return Guard([&] {
    NotNull(items, "items");
    NotNull(path, "path");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_ratings>(
                     advisor_ratings{advisor::LoadRatings(path, items->items)}));
  });
}

advisor_status advisor_ratings_simulate(const advisor_item_set* items, size_t users,
                                        uint64_t seed, advisor_ratings** out) {
  return Guard([&] {
    NotNull(items, "items");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_ratings>(
                     advisor_ratings{advisor::SimulateRatings(items->items, users, seed).ratings}));
  });
}

advisor_status advisor_ratings_to_csv(const advisor_ratings* ratings, char** out) {
  return Guard([&] {
    NotNull(ratings, "ratings");
    Emit(out, advisor::RatingsCsv(ratings->ratings));
  });
}

void advisor_ratings_free(advisor_ratings* ratings) { delete ratings; }

advisor_lfm_config advisor_lfm_config_default(void) {
  const advisor::LfmConfig d;
  return advisor_lfm_config{d.dim, d.lambda_user, d.lambda_item, d.max_iters, d.tol, d.seed};
}

advisor_status advisor_lfm_fit(const advisor_ratings* ratings, const advisor_lfm_config* config,
                               advisor_lfm** out) {
  return Guard([&] {
    NotNull(ratings, "ratings");
    NotNull(out, "out");
    const advisor_lfm_config c = config ? *config : advisor_lfm_config_default();
    Publish(out, std::make_unique<advisor_lfm>(
                     advisor_lfm{advisor::FitLfm(ratings->ratings, ToLfm(c)), ratings->ratings}));
  });
}

advisor_status advisor_lfm_to_json(const advisor_lfm* model, char** out) {
  return Guard([&] {
    NotNull(model, "model");
    Emit(out, advisor::CanonicalJson(advisor::LfmModelToJson(model->model, model->ratings)));
  });
}

void advisor_lfm_free(advisor_lfm* model) { delete model; }

advisor_status advisor_questionnaire_spq(const advisor_lfm* model, const advisor_item_set* items,
                                         size_t k, advisor_questionnaire** out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(items, "items");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_questionnaire>(advisor_questionnaire{
                     advisor::SelectPairsSpq(model->model, items->items, k), items->items}));
  });
}

advisor_status advisor_questionnaire_random(const advisor_item_set* items, size_t k,
                                            uint64_t seed, advisor_questionnaire** out) {
  return Guard([&] {
    NotNull(items, "items");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_questionnaire>(advisor_questionnaire{
                     advisor::SelectPairsRandom(items->items, k, seed), items->items}));
  });
}

advisor_status advisor_questionnaire_load(const advisor_item_set* items, const char* path,
                                          advisor_questionnaire** out) {
  return Guard([&] {
    NotNull(items, "items");
    NotNull(path, "path");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_questionnaire>(advisor_questionnaire{
                     advisor::QuestionnaireFromJson(advisor::LoadJson(path), items->items),
                     items->items}));
  });
}

advisor_status advisor_questionnaire_parse(const advisor_item_set* items, const char* json,
                                           advisor_questionnaire** out) {
  return Guard([&] {
    NotNull(items, "items");
    NotNull(json, "json");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_questionnaire>(advisor_questionnaire{
                     advisor::QuestionnaireFromJson(advisor::ParseJson(json, "questionnaire"),
                                                    items->items),
                     items->items}));
  });
}

size_t advisor_questionnaire_size(const advisor_questionnaire* q) {
  return q == nullptr ? 0 : q->q.size();
}

advisor_status advisor_questionnaire_to_json(const advisor_questionnaire* q, char** out) {
  return Guard([&] {
    NotNull(q, "questionnaire");
    Emit(out, advisor::CanonicalJson(advisor::QuestionnaireToJson(q->q, q->items)));
  });
}

void advisor_questionnaire_free(advisor_questionnaire* q) { delete q; }

advisor_status advisor_answers_load(const char* path, advisor_answers** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_answers>(
                     advisor_answers{advisor::AnswerSheetFromJson(advisor::LoadJson(path))}));
  });
}

advisor_status advisor_answers_parse(const char* json, advisor_answers** out) {
  return Guard([&] {
    NotNull(json, "json");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_answers>(
                     advisor_answers{advisor::AnswerSheetFromJson(advisor::ParseJson(json, "answers"))}));
  });
}

advisor_status advisor_answers_simulate(const advisor_item_set* items,
                                        const advisor_questionnaire* q, double rate,
                                        advisor_answers** out) {
  return Guard([&] {
    NotNull(items, "items");
    NotNull(q, "questionnaire");
    NotNull(out, "out");
    const double bbar = items->items.MaxOutcome();
    const advisor::ClosedFormUtility u = rate == 0.0
                                             ? advisor::ClosedFormUtility::Linear(bbar)
                                             : advisor::ClosedFormUtility::Exponential(rate, bbar);
    Publish(out, std::make_unique<advisor_answers>(
                     advisor_answers{advisor::AnswerQuestionnaire(u, items->items, q->q)}));
  });
}

advisor_status advisor_answers_to_json(const advisor_answers* answers, char** out) {
  return Guard([&] {
    NotNull(answers, "answers");
    Emit(out, advisor::CanonicalJson(advisor::AnswerSheetToJson(answers->sheet)));
  });
}

void advisor_answers_free(advisor_answers* answers) { delete answers; }

advisor_status advisor_elicit(const advisor_item_set* items, const advisor_questionnaire* q,
                              const advisor_answers* answers, advisor_elicitation** out) {
  return Guard([&] {
    NotNull(items, "items");
    NotNull(q, "questionnaire");
    NotNull(answers, "answers");
    NotNull(out, "out");
    const advisor::ItemSet& set = items->items;
    const advisor::ElicitationProblem problem(
        set, q->q, answers->sheet,
        advisor::BreakpointGrid::FromLotteries(set.items(), set.MaxOutcome()),
        advisor::BuildScenarios(set, advisor::DefaultBenchmark(set)));
    Publish(out, std::make_unique<advisor_elicitation>(advisor_elicitation{problem.All()}));
  });
}

advisor_status advisor_elicitation_utility(const advisor_elicitation* e,
                                           advisor_estimator estimator, advisor_utility** out) {
  return Guard([&] {
    NotNull(e, "elicitation");
    NotNull(out, "out");
    const advisor::ElicitationResult& r = Pick(e->set, ToEstimator(estimator));
    Publish(out, std::make_unique<advisor_utility>(
                     advisor_utility{r.utility, r.estimator, r.objective}));
  });
}

double advisor_elicitation_objective(const advisor_elicitation* e, advisor_estimator estimator) {
  if (e == nullptr || estimator < ADVISOR_PESSIMISTIC || estimator > ADVISOR_NEUTRAL) return 0.0;
  return Pick(e->set, ToEstimator(estimator)).objective;
}

void advisor_elicitation_free(advisor_elicitation* e) { delete e; }

namespace {

std::unique_ptr<advisor_utility> UtilityFromJson(const Json& j) {
  auto u = std::make_unique<advisor_utility>();
  u->u = advisor::UtilityFromJson(j);
  if (j.contains("estimator") && j["estimator"].is_string()) {
    u->estimator = advisor::ParseEstimator(j["estimator"].get<std::string>());
  }
  if (j.contains("objective") && j["objective"].is_number()) {
    u->objective = j["objective"].get<double>();
  }
  return u;
}

}  // namespace

advisor_status advisor_utility_load(const char* path, advisor_utility** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    Publish(out, UtilityFromJson(advisor::LoadJson(path)));
  });
}

advisor_status advisor_utility_parse(const char* json, advisor_utility** out) {
  return Guard([&] {
    NotNull(json, "json");
    NotNull(out, "out");
    Publish(out, UtilityFromJson(advisor::ParseJson(json, "utility")));
  });
}

advisor_status advisor_utility_linear(const double* grid, size_t n, advisor_utility** out) {
  return Guard([&] {
    NotNull(grid, "grid");
    NotNull(out, "out");
    advisor::BreakpointGrid g(std::vector<double>(grid, grid + n));
    Publish(out, std::make_unique<advisor_utility>(
                     advisor_utility{advisor::PwlUtility::Linear(std::move(g)), {}, {}}));
  });
}

advisor_status advisor_utility_eval(const advisor_utility* u, double y, double* out) {
  return Guard([&] {
    NotNull(u, "utility");
    NotNull(out, "out");
    *out = advisor::EvalUtility(u->u, y);
  });
}

advisor_status advisor_utility_to_json(const advisor_utility* u, char** out) {
  return Guard([&] {
    NotNull(u, "utility");
    Emit(out, advisor::CanonicalJson(advisor::UtilityToJson(u->u, u->estimator, u->objective)));
  });
}

advisor_status advisor_utility_analytics(const advisor_utility* u, char** out) {
  return Guard([&] {
    NotNull(u, "utility");
    Emit(out, advisor::CanonicalJson(advisor::RiskAnalyticsToJson(advisor::RiskAversion(u->u))));
  });
}

void advisor_utility_free(advisor_utility* u) { delete u; }

advisor_status advisor_distance(const advisor_utility* u, const advisor_utility* v,
                                advisor_distance_method method, double* out) {
  return Guard([&] {
    NotNull(u, "u");
    NotNull(v, "v");
    NotNull(out, "out");
    switch (method) {
      case ADVISOR_DISTANCE_CLOSED_FORM:
        *out = advisor::KantorovichClosedForm(u->u, v->u).value;
        return;
      case ADVISOR_DISTANCE_SOCP:
        *out = advisor::KantorovichSocp(u->u, v->u).value;
        return;
    }
    advisor::Fail(ErrorCode::kInvalidArgument, "unknown distance method");
  });
}

advisor_status advisor_returns_load(const char* path, advisor_returns** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_returns>(advisor_returns{advisor::LoadReturns(path)}));
  });
}

advisor_status advisor_returns_synthetic(size_t assets, size_t days, uint64_t seed,
                                         advisor_returns** out) {
  return Guard([&] {
    NotNull(out, "out");
    Publish(out, std::make_unique<advisor_returns>(
                     advisor_returns{advisor::SyntheticReturns(assets, days, seed)}));
  });
}

size_t advisor_returns_rows(const advisor_returns* panel) {
  return panel == nullptr ? 0 : panel->panel.rows();
}

size_t advisor_returns_columns(const advisor_returns* panel) {
  return panel == nullptr ? 0 : panel->panel.columns();
}

advisor_status advisor_returns_to_csv(const advisor_returns* panel, char** out) {
  return Guard([&] {
    NotNull(panel, "panel");
    Emit(out, advisor::ReturnsCsv(panel->panel));
  });
}

void advisor_returns_free(advisor_returns* panel) { delete panel; }

advisor_status advisor_portfolio(const advisor_utility* u, const advisor_returns* panel,
                                 size_t window, double budget, const double* caps,
                                 size_t caps_len, double cap_fraction, char** out_json) {
  return Guard([&] {
    NotNull(u, "utility");
    NotNull(panel, "panel");
    NotNull(out_json, "out");
    const advisor::ReturnsPanel& p = panel->panel;
    advisor::Require(window <= p.rows(), "window " + std::to_string(window) + " exceeds " +
                                             std::to_string(p.rows()) + " panel rows");
    const std::size_t rows = window == 0 ? p.rows() : window;
    const advisor::ReturnsPanel w = p.Slice(p.rows() - rows, rows);
    advisor::PortfolioSpec spec;
    if (caps != nullptr) {
      spec.budget = budget;
      spec.caps.assign(caps, caps + caps_len);
    } else {
      spec = advisor::PortfolioSpec::WithCapFraction(budget, p.columns(), cap_fraction);
    }
    const advisor::Portfolio result = advisor::OptimizePortfolio(u->u, w, spec);
    Json j{{"assets", p.assets}};
    Json body = advisor::PortfolioToJson(result, w);
    j["allocation"] = std::move(body["allocation"]);
    j["objective"] = result.objective;
    j["iterations"] = result.iterations;
    j["window_start"] = w.dates.front();
    j["window_end"] = w.dates.back();
    *out_json = CopyString(advisor::CanonicalJson(j));
  });
}

advisor_backtest_config advisor_backtest_config_default(void) {
  const advisor::BacktestConfig d;
  return advisor_backtest_config{d.window, d.hold, d.initial_wealth, d.cap_fraction};
}

advisor_status advisor_backtest(const advisor_returns* panel, const advisor_backtest_config* config,
                                const advisor_utility* const* utilities, const char* const* names,
                                size_t count, char** out_csv) {
  return Guard([&] {
    NotNull(panel, "panel");
    NotNull(out_csv, "out");
    advisor::Require(count > 0, "at least one utility is required");
    NotNull(utilities, "utilities");
    NotNull(names, "names");
    const advisor_backtest_config c = config ? *config : advisor_backtest_config_default();
    advisor::BacktestConfig cfg;
    cfg.window = c.window;
    cfg.hold = c.hold;
    cfg.initial_wealth = c.initial_wealth;
    cfg.cap_fraction = c.cap_fraction;
    std::vector<std::pair<std::string, advisor::PwlUtility>> us;
    for (size_t i = 0; i < count; ++i) {
      NotNull(utilities[i], "utility");
      NotNull(names[i], "name");
      us.emplace_back(names[i], utilities[i]->u);
    }
    *out_csv = CopyString(advisor::WealthCsv(advisor::RunBacktest(panel->panel, cfg, us)));
  });
}

advisor_experiment_config advisor_experiment_config_default(void) {
  const advisor::ExperimentConfig d;
  advisor_experiment_config c{};
  c.ks = nullptr;
  c.ks_len = 0;
  c.repetitions = d.repetitions;
  c.seed = d.seed;
  c.raters = d.raters;
  c.threads = d.threads;
  c.item_set_grid = d.item_set_grid ? 1 : 0;
  c.truth_rate = d.truth.rate();
  c.lfm = advisor_lfm_config_default();
  return c;
}

namespace {

template <typename Run>
advisor_status Experiment(const advisor_item_set* items, const advisor_experiment_config* c,
                          char** out_records, char** out_summary, Run run) {
  return Guard([&] {
    NotNull(items, "items");
    NotNull(c, "config");
    NotNull(out_records, "out_records");
    NotNull(out_summary, "out_summary");
    const advisor::ExperimentReport report = run(items->items, ToExperiment(*c, items->items));
    std::unique_ptr<char, decltype(&std::free)> records(
        CopyString(advisor::ExperimentRecordsCsv(report)), &std::free);
    *out_summary = CopyString(advisor::ExperimentSummaryCsv(report));
    *out_records = records.release();
  });
}

}  // namespace

advisor_status advisor_simulate_spq_vs_random(const advisor_item_set* items,
                                              const advisor_experiment_config* c,
                                              char** out_records, char** out_summary) {
  return Experiment(items, c, out_records, out_summary, advisor::RunSpqVsRandom);
}

advisor_status advisor_simulate_convergence(const advisor_item_set* items,
                                            const advisor_experiment_config* c,
                                            char** out_records, char** out_summary) {
  return Experiment(items, c, out_records, out_summary, advisor::RunConvergence);
}

advisor_status advisor_service_create(const advisor_service_options* options,
                                      advisor_service** out) {
  return Guard([&] {
    NotNull(out, "out");
    const advisor_service_options o = options ? *options : advisor_service_options{};
    advisor::ServiceConfig cfg =
        o.config_path ? advisor::LoadServiceConfig(o.config_path) : advisor::ServiceConfig{};
    if (o.items_path) {
      cfg.item_sets.insert(cfg.item_sets.begin(),
                           advisor::ItemSource{o.items_path, o.ratings_path ? o.ratings_path : ""});
    } else {
      advisor::Require(o.ratings_path == nullptr, "ratings require an item set path");
    }
    if (o.returns_path) cfg.returns_path = o.returns_path;
    if (o.bind) cfg.bind = o.bind;
    if (o.data_dir) cfg.data_dir = o.data_dir;
    advisor::ApplyEnvironment(cfg);
    cfg.Validate();
    auto s = std::make_unique<advisor_service>();
    s->service = std::make_unique<advisor::AdvisorService>(std::move(cfg));
    Publish(out, std::move(s));
  });
}

advisor_status advisor_service_start(advisor_service* service, int* port) {
  return Guard([&] {
    NotNull(service, "service");
    const int p = service->service->Start();
    if (port != nullptr) *port = p;
  });
}

advisor_status advisor_service_run(advisor_service* service) {
  return Guard([&] {
    NotNull(service, "service");
    service->service->Run();
  });
}

void advisor_service_stop(advisor_service* service) {
  if (service != nullptr) service->service->Stop();
}

void advisor_service_free(advisor_service* service) {
  if (service != nullptr) service->service->Stop();
  delete service;
}

