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

#ifndef ADVISOR_ADVISOR_H_
#define ADVISOR_ADVISOR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ADVISOR_API __declspec(dllexport)
#else
#define ADVISOR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

// Status codes returned by every fallible call.
typedef enum advisor_status {
  ADVISOR_OK = 0,
  ADVISOR_INVALID_ARGUMENT = 1,
  ADVISOR_DOMAIN = 2,
  ADVISOR_INFEASIBLE = 3,
  ADVISOR_NUMERIC = 4,
  ADVISOR_IO = 5,
  ADVISOR_NOT_FOUND = 6,
  ADVISOR_CONFLICT = 7,
  ADVISOR_INTERNAL = 8,
  ADVISOR_MODEL = 9,
  ADVISOR_SINGULAR = 10,
} advisor_status;

typedef enum advisor_estimator {
  ADVISOR_PESSIMISTIC = 0,
  ADVISOR_OPTIMISTIC = 1,
  ADVISOR_NEUTRAL = 2,
} advisor_estimator;

typedef enum advisor_distance_method {
  ADVISOR_DISTANCE_CLOSED_FORM = 0,
  ADVISOR_DISTANCE_SOCP = 1,
} advisor_distance_method;

typedef struct advisor_item_set advisor_item_set;
typedef struct advisor_ratings advisor_ratings;
typedef struct advisor_lfm advisor_lfm;
typedef struct advisor_questionnaire advisor_questionnaire;
typedef struct advisor_answers advisor_answers;
typedef struct advisor_elicitation advisor_elicitation;
typedef struct advisor_utility advisor_utility;
typedef struct advisor_returns advisor_returns;
typedef struct advisor_service advisor_service;

ADVISOR_API const char* advisor_version(void);
ADVISOR_API const char* advisor_status_name(advisor_status status);

// Message of the last failed call on this thread; empty after success.
ADVISOR_API const char* advisor_last_error(void);
// JSON object with structured details of the last failure on this thread,
// e.g. {"conflicting_pairs": [...]} for inconsistent answers.
ADVISOR_API const char* advisor_last_error_details(void);

// Strings returned through char** outputs are owned by the caller.
ADVISOR_API void advisor_string_free(char* s);

// Item sets.
ADVISOR_API advisor_status advisor_item_set_load(const char* path, advisor_item_set** out);
ADVISOR_API advisor_status advisor_item_set_parse(const char* json, advisor_item_set** out);
ADVISOR_API size_t advisor_item_set_size(const advisor_item_set* items);
ADVISOR_API double advisor_item_set_bbar(const advisor_item_set* items);
ADVISOR_API advisor_status advisor_item_set_to_json(const advisor_item_set* items, char** out);
ADVISOR_API void advisor_item_set_free(advisor_item_set* items);

// Ratings; item ids resolve against `items`.
ADVISOR_API advisor_status advisor_ratings_load(const advisor_item_set* items, const char* path,
                                                advisor_ratings** out);
ADVISOR_API advisor_status advisor_ratings_simulate(const advisor_item_set* items, size_t users,
                                                    uint64_t seed, advisor_ratings** out);
ADVISOR_API advisor_status advisor_ratings_to_csv(const advisor_ratings* ratings, char** out);
ADVISOR_API void advisor_ratings_free(advisor_ratings* ratings);

// Latent factor model.
typedef struct advisor_lfm_config {
  int dim;
  double lambda_user;
  double lambda_item;
  int max_iters;
  double tol;
  uint64_t seed;
} advisor_lfm_config;

ADVISOR_API advisor_lfm_config advisor_lfm_config_default(void);
ADVISOR_API advisor_status advisor_lfm_fit(const advisor_ratings* ratings,
                                           const advisor_lfm_config* config, advisor_lfm** out);
ADVISOR_API advisor_status advisor_lfm_to_json(const advisor_lfm* model, char** out);
ADVISOR_API void advisor_lfm_free(advisor_lfm* model);

// Questionnaires.
ADVISOR_API advisor_status advisor_questionnaire_spq(const advisor_lfm* model,
                                                     const advisor_item_set* items, size_t k,
                                                     advisor_questionnaire** out);
ADVISOR_API advisor_status advisor_questionnaire_random(const advisor_item_set* items, size_t k,
                                                        uint64_t seed,
                                                        advisor_questionnaire** out);
ADVISOR_API advisor_status advisor_questionnaire_load(const advisor_item_set* items,
                                                      const char* path,
                                                      advisor_questionnaire** out);
ADVISOR_API advisor_status advisor_questionnaire_parse(const advisor_item_set* items,
                                                       const char* json,
                                                       advisor_questionnaire** out);
ADVISOR_API size_t advisor_questionnaire_size(const advisor_questionnaire* q);
ADVISOR_API advisor_status advisor_questionnaire_to_json(const advisor_questionnaire* q,
                                                         char** out);
ADVISOR_API void advisor_questionnaire_free(advisor_questionnaire* q);

// Answer sheets. Simulated answers come from the exponential utility with
// `rate`, or the linear utility when rate is 0.
ADVISOR_API advisor_status advisor_answers_load(const char* path, advisor_answers** out);
ADVISOR_API advisor_status advisor_answers_parse(const char* json, advisor_answers** out);
ADVISOR_API advisor_status advisor_answers_simulate(const advisor_item_set* items,
                                                    const advisor_questionnaire* q, double rate,
                                                    advisor_answers** out);
ADVISOR_API advisor_status advisor_answers_to_json(const advisor_answers* answers, char** out);
ADVISOR_API void advisor_answers_free(advisor_answers* answers);

// Elicitation of all three estimators. Fails with ADVISOR_INFEASIBLE when
// the answers admit no concave normalized utility.
ADVISOR_API advisor_status advisor_elicit(const advisor_item_set* items,
                                          const advisor_questionnaire* q,
                                          const advisor_answers* answers,
                                          advisor_elicitation** out);
ADVISOR_API advisor_status advisor_elicitation_utility(const advisor_elicitation* e,
                                                       advisor_estimator estimator,
                                                       advisor_utility** out);
ADVISOR_API double advisor_elicitation_objective(const advisor_elicitation* e,
                                                 advisor_estimator estimator);
ADVISOR_API void advisor_elicitation_free(advisor_elicitation* e);

// Utilities.
ADVISOR_API advisor_status advisor_utility_load(const char* path, advisor_utility** out);
ADVISOR_API advisor_status advisor_utility_parse(const char* json, advisor_utility** out);
ADVISOR_API advisor_status advisor_utility_linear(const double* grid, size_t n,
                                                  advisor_utility** out);
ADVISOR_API advisor_status advisor_utility_eval(const advisor_utility* u, double y, double* out);
// {estimator, objective, bbar, grid, alpha, beta}; estimator and objective
// are null unless the utility came from an elicitation.
ADVISOR_API advisor_status advisor_utility_to_json(const advisor_utility* u, char** out);
// {gini, ara: [{breakpoint, value}], rra: [...]}.
ADVISOR_API advisor_status advisor_utility_analytics(const advisor_utility* u, char** out);
ADVISOR_API void advisor_utility_free(advisor_utility* u);

// Kantorovich distance on the normalized domain [0, 1].
ADVISOR_API advisor_status advisor_distance(const advisor_utility* u, const advisor_utility* v,
                                            advisor_distance_method method, double* out);

// Returns panels.
ADVISOR_API advisor_status advisor_returns_load(const char* path, advisor_returns** out);
ADVISOR_API advisor_status advisor_returns_synthetic(size_t assets, size_t days, uint64_t seed,
                                                     advisor_returns** out);
ADVISOR_API size_t advisor_returns_rows(const advisor_returns* panel);
ADVISOR_API size_t advisor_returns_columns(const advisor_returns* panel);
ADVISOR_API advisor_status advisor_returns_to_csv(const advisor_returns* panel, char** out);
ADVISOR_API void advisor_returns_free(advisor_returns* panel);

// Portfolio over the trailing `window` rows (0: all rows). `caps` holds one
// cap per panel column, risk-free first; when null, risky caps are
// `cap_fraction` of the budget. Output JSON: {assets, allocation, objective,
// iterations}.
ADVISOR_API advisor_status advisor_portfolio(const advisor_utility* u,
                                             const advisor_returns* panel, size_t window,
                                             double budget, const double* caps,
                                             size_t caps_len, double cap_fraction,
                                             char** out_json);

typedef struct advisor_backtest_config {
  size_t window;
  size_t hold;
  double initial_wealth;
  double cap_fraction;
} advisor_backtest_config;

ADVISOR_API advisor_backtest_config advisor_backtest_config_default(void);
// Wealth curves as CSV `date,estimator,wealth`, one curve per utility named
// by `names`.
ADVISOR_API advisor_status advisor_backtest(const advisor_returns* panel,
                                            const advisor_backtest_config* config,
                                            const advisor_utility* const* utilities,
                                            const char* const* names, size_t count,
                                            char** out_csv);

typedef struct advisor_experiment_config {
  const size_t* ks;
  size_t ks_len;
  size_t repetitions;
  uint64_t seed;
  size_t raters;
  unsigned threads;
  int item_set_grid;  // nonzero: grid from every item outcome
  double truth_rate;  // exponential true utility on [0, largest outcome]
  advisor_lfm_config lfm;
} advisor_experiment_config;

ADVISOR_API advisor_experiment_config advisor_experiment_config_default(void);
// Per-record CSV `method,estimator,K,repetition,distance` and aggregated CSV
// `method,estimator,K,mean,stddev`.
ADVISOR_API advisor_status advisor_simulate_spq_vs_random(const advisor_item_set* items,
                                                          const advisor_experiment_config* c,
                                                          char** out_records,
                                                          char** out_summary);
ADVISOR_API advisor_status advisor_simulate_convergence(const advisor_item_set* items,
                                                        const advisor_experiment_config* c,
                                                        char** out_records,
                                                        char** out_summary);

// HTTP service from a JSON configuration file (`config_path` may be null for
// defaults). `bind` and `data_dir` override the configuration when non-null;
// ADVISOR_BIND and ADVISOR_DATA_DIR override both.
typedef struct advisor_service_options {
  const char* config_path;
  const char* bind;
  const char* data_dir;
  const char* items_path;
  const char* ratings_path;
  const char* returns_path;
} advisor_service_options;

ADVISOR_API advisor_status advisor_service_create(const advisor_service_options* options,
                                                  advisor_service** out);
// Serves on a background thread and stores the bound port in `port`.
ADVISOR_API advisor_status advisor_service_start(advisor_service* service, int* port);
// Serves on the calling thread until advisor_service_stop.
ADVISOR_API advisor_status advisor_service_run(advisor_service* service);
ADVISOR_API void advisor_service_stop(advisor_service* service);
ADVISOR_API void advisor_service_free(advisor_service* service);

#ifdef __cplusplus
}
#endif

#endif  // ADVISOR_ADVISOR_H_
