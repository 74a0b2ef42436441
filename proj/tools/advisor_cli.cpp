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

#include <signal.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "advisor/advisor.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct Failure {
  advisor_status status;
  std::string message;
};

struct UsageError {
  std::string message;
};

void Check(advisor_status s) {
  if (s != ADVISOR_OK) {
    std::string message = advisor_last_error();
    const std::string details = advisor_last_error_details();
    if (details != "{}") message += " " + details;
    throw Failure{s, message};
  }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};

using ItemSet = std::unique_ptr<advisor_item_set, Deleter<advisor_item_set, advisor_item_set_free>>;
using Ratings = std::unique_ptr<advisor_ratings, Deleter<advisor_ratings, advisor_ratings_free>>;
using Lfm = std::unique_ptr<advisor_lfm, Deleter<advisor_lfm, advisor_lfm_free>>;
using Questionnaire =
    std::unique_ptr<advisor_questionnaire, Deleter<advisor_questionnaire, advisor_questionnaire_free>>;
using Answers = std::unique_ptr<advisor_answers, Deleter<advisor_answers, advisor_answers_free>>;
using Elicitation =
    std::unique_ptr<advisor_elicitation, Deleter<advisor_elicitation, advisor_elicitation_free>>;
using Utility = std::unique_ptr<advisor_utility, Deleter<advisor_utility, advisor_utility_free>>;
using Returns = std::unique_ptr<advisor_returns, Deleter<advisor_returns, advisor_returns_free>>;
using Service = std::unique_ptr<advisor_service, Deleter<advisor_service, advisor_service_free>>;

std::string Take(char* s) {
  std::string out(s);
  advisor_string_free(s);
  return out;
}

ItemSet LoadItems(const std::string& path) {
  advisor_item_set* p = nullptr;
  Check(advisor_item_set_load(path.c_str(), &p));
  return ItemSet(p);
}

Ratings LoadRatings(const advisor_item_set* items, const std::string& path) {
  advisor_ratings* p = nullptr;
  Check(advisor_ratings_load(items, path.c_str(), &p));
  return Ratings(p);
}

Lfm Fit(const advisor_ratings* ratings, const advisor_lfm_config& cfg) {
  advisor_lfm* p = nullptr;
  Check(advisor_lfm_fit(ratings, &cfg, &p));
  return Lfm(p);
}

Questionnaire LoadQuestionnaire(const advisor_item_set* items, const std::string& path) {
  advisor_questionnaire* p = nullptr;
  Check(advisor_questionnaire_load(items, path.c_str(), &p));
  return Questionnaire(p);
}

Utility LoadUtility(const std::string& path) {
  advisor_utility* p = nullptr;
  Check(advisor_utility_load(path.c_str(), &p));
  return Utility(p);
}

Returns LoadReturns(const std::string& path) {
  advisor_returns* p = nullptr;
  Check(advisor_returns_load(path.c_str(), &p));
  return Returns(p);
}

// Writes `content` to `path`, or to stdout when the path is empty or "-".
void Output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << content;
  f.close();
  if (!f) throw Failure{ADVISOR_IO, "cannot write " + path};
}

std::vector<std::size_t> ParseKs(const std::vector<std::size_t>& ks) {
  if (ks.empty()) throw UsageError{"--k requires at least one value"};
  return ks;
}

advisor_estimator ParseEstimator(const std::string& s) {
  if (s == "pessimistic") return ADVISOR_PESSIMISTIC;
  if (s == "optimistic") return ADVISOR_OPTIMISTIC;
  return ADVISOR_NEUTRAL;
}

std::string Num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct LfmFlags {
  int dim = advisor_lfm_config_default().dim;
  double lambda_user = advisor_lfm_config_default().lambda_user;
  double lambda_item = advisor_lfm_config_default().lambda_item;
  int max_iters = advisor_lfm_config_default().max_iters;

  void Register(CLI::App* app) {
    app->add_option("--dim", dim, "Latent dimension")->check(CLI::PositiveNumber);
    app->add_option("--lambda-user", lambda_user, "Regularization on user terms")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--lambda-item", lambda_item, "Regularization on item terms")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--max-iters", max_iters, "Alternating least-squares passes")
        ->check(CLI::PositiveNumber);
  }

  advisor_lfm_config Config(std::uint64_t seed) const {
    advisor_lfm_config c = advisor_lfm_config_default();
    c.dim = dim;
    c.lambda_user = lambda_user;
    c.lambda_item = lambda_item;
    c.max_iters = max_iters;
    c.seed = seed;
    return c;
  }
};

const std::vector<std::string> kEstimators = {"pessimistic", "optimistic", "neutral"};

int Main(int argc, char** argv) {
  CLI::App app{"Nominal utility elicitation and portfolio advice"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(advisor_version()));

  // fit-lfm
  std::string items_path, ratings_path, out_path;
  std::uint64_t seed = 1;
  LfmFlags lfm;
  auto* fit = app.add_subcommand("fit-lfm",
                                 "Fit the latent factor model to a ratings CSV "
                                 "(user_id,item_id,rating) and write the model JSON");
  fit->add_option("--items", items_path, "Item-set JSON")->required()->check(CLI::ExistingFile);
  fit->add_option("--ratings", ratings_path, "Ratings CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--seed", seed, "Factor initialization seed");
  fit->add_option("--out", out_path, "Model JSON path (stdout when omitted)");
  lfm.Register(fit);

  // gen-questionnaire
  std::size_t k = 8;
  std::string method = "spq";
  auto* gen = app.add_subcommand(
      "gen-questionnaire",
      "Select K item pairs and write questionnaire JSON "
      "{id, pairs:[{first, second}], provenance, objective}");
  gen->add_option("--items", items_path, "Item-set JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--ratings", ratings_path, "Ratings CSV (spq only)")->check(CLI::ExistingFile);
  gen->add_option("--k", k, "Number of pairs")->check(CLI::PositiveNumber);
  gen->add_option("--method", method, "spq or random")
      ->check(CLI::IsMember({"spq", "random"}));
  gen->add_option("--seed", seed, "Seed for the LFM fit or the random draw");
  gen->add_option("--out", out_path, "Questionnaire JSON path (stdout when omitted)");
  lfm.Register(gen);

  // elicit
  std::string questionnaire_path, answers_path, estimator = "all";
  auto* elicit = app.add_subcommand(
      "elicit",
      "Elicit nominal utilities from an answer sheet "
      "{questionnaire_id, answers:[{pair_index, choice}]}; writes <estimator>.json "
      "{estimator, objective, bbar, grid, alpha, beta} and analytics.csv "
      "(estimator,objective,gini,breakpoint,ara,rra)");
  elicit->add_option("--items", items_path, "Item-set JSON")->required()->check(CLI::ExistingFile);
  elicit->add_option("--questionnaire", questionnaire_path, "Questionnaire JSON")
      ->required()
      ->check(CLI::ExistingFile);
  elicit->add_option("--answers", answers_path, "Answer-sheet JSON")
      ->required()
      ->check(CLI::ExistingFile);
  elicit->add_option("--estimator", estimator, "pessimistic, optimistic, neutral or all")
      ->check(CLI::IsMember({"pessimistic", "optimistic", "neutral", "all"}));
  elicit->add_option("--out", out_path, "Output directory")->required();

  // distance
  std::string u_path, v_path, distance_method = "closed-form";
  auto* distance = app.add_subcommand(
      "distance", "Kantorovich distance between two utility JSONs on the normalized domain");
  distance->add_option("--u", u_path, "First utility JSON")->required()->check(CLI::ExistingFile);
  distance->add_option("--v", v_path, "Second utility JSON")->required()->check(CLI::ExistingFile);
  distance->add_option("--method", distance_method, "closed-form or socp")
      ->check(CLI::IsMember({"closed-form", "socp"}));
  distance->add_option("--out", out_path, "JSON {distance, method} path (stdout when omitted)");

  // portfolio
  std::string utility_path, returns_path;
  double budget = 10000.0, cap_fraction = 0.4;
  std::size_t window = 60;
  std::vector<double> caps;
  auto* portfolio = app.add_subcommand(
      "portfolio",
      "Allocate a budget over the trailing window of a returns CSV "
      "(date,<asset>,... net returns); writes {assets, allocation, objective, ...}");
  portfolio->add_option("--utility", utility_path, "Utility JSON")
      ->required()
      ->check(CLI::ExistingFile);
  portfolio->add_option("--returns", returns_path, "Returns CSV")
      ->required()
      ->check(CLI::ExistingFile);
  portfolio->add_option("--budget", budget, "Budget in currency");
  portfolio->add_option("--window", window, "Trailing rows (0: all)");
  portfolio->add_option("--cap-fraction", cap_fraction, "Risky cap as a budget fraction");
  portfolio->add_option("--caps", caps, "Explicit caps, cash first")->delimiter(',');
  portfolio->add_option("--out", out_path, "Portfolio JSON path (stdout when omitted)");

  // backtest
  std::vector<std::string> utility_specs;
  std::size_t hold = 7;
  double initial_wealth = 10000.0;
  auto* backtest = app.add_subcommand(
      "backtest", "Rolling-window backtest; writes CSV date,estimator,wealth");
  backtest->add_option("--returns", returns_path, "Returns CSV")
      ->required()
      ->check(CLI::ExistingFile);
  backtest->add_option("--utility", utility_specs, "name=path or path (name from file stem)")
      ->required();
  backtest->add_option("--window", window, "Estimation window rows")->check(CLI::PositiveNumber);
  backtest->add_option("--hold", hold, "Holding period rows")->check(CLI::PositiveNumber);
  backtest->add_option("--initial-wealth", initial_wealth, "Starting wealth");
  backtest->add_option("--cap-fraction", cap_fraction, "Risky cap as a wealth fraction");
  backtest->add_option("--out", out_path, "Wealth CSV path (stdout when omitted)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Virtual-user experiments and synthetic data");
  simulate->require_subcommand(1);
  std::vector<std::size_t> ks;
  std::size_t reps = 1, raters = 200, users = 200, assets = 5, days = 1800;
  unsigned threads = 1;
  bool questioned_grid = false;
  double rate = 1e-5;
  auto experiment = [&](CLI::App* sub) {
    sub->add_option("--items", items_path, "Item-set JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--k", ks, "Questionnaire sizes")->required()->delimiter(',');
    sub->add_option("--reps", reps, "Repetitions")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--rate", rate, "Absolute risk aversion of the true exponential utility")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--questioned-grid", questioned_grid,
                  "Grid from questioned items only instead of every item outcome");
    sub->add_option("--out", out_path,
                    "Output directory for records.csv "
                    "(method,estimator,K,repetition,distance) and summary.csv "
                    "(method,estimator,K,mean,stddev)")
        ->required();
  };
  auto* spq_vs_random = simulate->add_subcommand(
      "spq-vs-random", "Distance to the true utility for SPQ and random questionnaires");
  experiment(spq_vs_random);
  spq_vs_random->add_option("--raters", raters, "Simulated raters per repetition")
      ->check(CLI::PositiveNumber);
  lfm.Register(spq_vs_random);
  auto* convergence = simulate->add_subcommand(
      "convergence", "Distance to the true utility as K grows (random questionnaires)");
  experiment(convergence);

  auto* sim_ratings = simulate->add_subcommand(
      "ratings", "Quadratic-utility raters; writes CSV user_id,item_id,rating");
  sim_ratings->add_option("--items", items_path, "Item-set JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sim_ratings->add_option("--users", users, "Raters")->check(CLI::PositiveNumber);
  sim_ratings->add_option("--seed", seed, "Seed");
  sim_ratings->add_option("--out", out_path, "Ratings CSV path (stdout when omitted)");

  auto* sim_answers = simulate->add_subcommand(
      "answers", "Answer a questionnaire by expected exponential utility");
  sim_answers->add_option("--items", items_path, "Item-set JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sim_answers->add_option("--questionnaire", questionnaire_path, "Questionnaire JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sim_answers->add_option("--rate", rate, "Absolute risk aversion; 0 for risk neutral")
      ->check(CLI::NonNegativeNumber);
  sim_answers->add_option("--out", out_path, "Answer-sheet JSON path (stdout when omitted)");

  auto* sim_returns = simulate->add_subcommand(
      "returns", "Synthetic daily returns; writes CSV date,<asset>,...");
  sim_returns->add_option("--assets", assets, "Risky assets")->check(CLI::PositiveNumber);
  sim_returns->add_option("--days", days, "Trading days")->check(CLI::PositiveNumber);
  sim_returns->add_option("--seed", seed, "Seed");
  sim_returns->add_option("--out", out_path, "Returns CSV path (stdout when omitted)");

  // serve
  std::string config_path, bind, data_dir;
  auto* serve = app.add_subcommand("serve", "Serve the /v1 HTTP API until SIGINT or SIGTERM");
  serve->add_option("--config", config_path, "Service configuration JSON")
      ->check(CLI::ExistingFile);
  serve->add_option("--items", items_path, "Default item-set JSON")->check(CLI::ExistingFile);
  serve->add_option("--ratings", ratings_path, "Ratings CSV for the default item set")
      ->check(CLI::ExistingFile);
  serve->add_option("--returns", returns_path, "Returns CSV for portfolios")
      ->check(CLI::ExistingFile);
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--data-dir", data_dir, "Session store directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*fit) {
    const ItemSet items = LoadItems(items_path);
    const Ratings ratings = LoadRatings(items.get(), ratings_path);
    const Lfm model = Fit(ratings.get(), lfm.Config(seed));
    char* json = nullptr;
    Check(advisor_lfm_to_json(model.get(), &json));
    Output(out_path, Take(json));
  } else if (*gen) {
    const ItemSet items = LoadItems(items_path);
    advisor_questionnaire* q = nullptr;
    if (method == "spq") {
      if (ratings_path.empty()) throw UsageError{"--method spq requires --ratings"};
      const Ratings ratings = LoadRatings(items.get(), ratings_path);
      const Lfm model = Fit(ratings.get(), lfm.Config(seed));
      Check(advisor_questionnaire_spq(model.get(), items.get(), k, &q));
    } else {
      Check(advisor_questionnaire_random(items.get(), k, seed, &q));
    }
    const Questionnaire owned(q);
    char* json = nullptr;
    Check(advisor_questionnaire_to_json(owned.get(), &json));
    Output(out_path, Take(json));
  } else if (*elicit) {
    const ItemSet items = LoadItems(items_path);
    const Questionnaire q = LoadQuestionnaire(items.get(), questionnaire_path);
    advisor_answers* a = nullptr;
    Check(advisor_answers_load(answers_path.c_str(), &a));
    const Answers answers(a);
    advisor_elicitation* e = nullptr;
    Check(advisor_elicit(items.get(), q.get(), answers.get(), &e));
    const Elicitation result(e);
    std::string table = "estimator,objective,gini,breakpoint,ara,rra\n";
    for (const std::string& name : kEstimators) {
      if (estimator != "all" && estimator != name) continue;
      advisor_utility* u = nullptr;
      Check(advisor_elicitation_utility(result.get(), ParseEstimator(name), &u));
      const Utility owned(u);
      char* json = nullptr;
      Check(advisor_utility_to_json(owned.get(), &json));
      Output((std::filesystem::path(out_path) / (name + ".json")).string(), Take(json));
      Check(advisor_utility_analytics(owned.get(), &json));
      const nlohmann::json risk = nlohmann::json::parse(Take(json));
      const std::string prefix =
          name + "," + Num(advisor_elicitation_objective(result.get(), ParseEstimator(name))) +
          "," + Num(risk["gini"].get<double>()) + ",";
      if (risk["ara"].empty()) table += prefix + ",,\n";
      for (std::size_t i = 0; i < risk["ara"].size(); ++i) {
        auto cell = [](const nlohmann::json& v) {
          return v.is_null() ? std::string() : Num(v.get<double>());
        };
        table += prefix + Num(risk["ara"][i]["breakpoint"].get<double>()) + "," +
                 cell(risk["ara"][i]["value"]) + "," + cell(risk["rra"][i]["value"]) + "\n";
      }
    }
    Output((std::filesystem::path(out_path) / "analytics.csv").string(), table);
  } else if (*distance) {
    const Utility u = LoadUtility(u_path);
    const Utility v = LoadUtility(v_path);
    double d = 0.0;
    Check(advisor_distance(u.get(), v.get(),
                           distance_method == "socp" ? ADVISOR_DISTANCE_SOCP
                                                     : ADVISOR_DISTANCE_CLOSED_FORM,
                           &d));
    const nlohmann::ordered_json j{{"distance", d}, {"method", distance_method}};
    Output(out_path, j.dump(2) + "\n");
  } else if (*portfolio) {
    const Utility u = LoadUtility(utility_path);
    const Returns panel = LoadReturns(returns_path);
    char* json = nullptr;
    Check(advisor_portfolio(u.get(), panel.get(), window, budget,
                            caps.empty() ? nullptr : caps.data(), caps.size(), cap_fraction,
                            &json));
    Output(out_path, Take(json));
  } else if (*backtest) {
    const Returns panel = LoadReturns(returns_path);
    std::vector<Utility> owned;
    std::vector<const advisor_utility*> us;
    std::vector<std::string> names;
    for (const std::string& spec : utility_specs) {
      const auto eq = spec.find('=');
      const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
      names.push_back(eq == std::string::npos ? std::filesystem::path(spec).stem().string()
                                              : spec.substr(0, eq));
      owned.push_back(LoadUtility(path));
      us.push_back(owned.back().get());
    }
    std::vector<const char*> name_ptrs;
    for (const std::string& n : names) name_ptrs.push_back(n.c_str());
    advisor_backtest_config cfg = advisor_backtest_config_default();
    cfg.window = window;
    cfg.hold = hold;
    cfg.initial_wealth = initial_wealth;
    cfg.cap_fraction = cap_fraction;
    char* csv = nullptr;
    Check(advisor_backtest(panel.get(), &cfg, us.data(), name_ptrs.data(), us.size(), &csv));
    Output(out_path, Take(csv));
  } else if (*spq_vs_random || *convergence) {
    const ItemSet items = LoadItems(items_path);
    const std::vector<std::size_t> k_values = ParseKs(ks);
    advisor_experiment_config cfg = advisor_experiment_config_default();
    cfg.ks = k_values.data();
    cfg.ks_len = k_values.size();
    cfg.repetitions = reps;
    cfg.seed = seed;
    cfg.raters = raters;
    cfg.threads = threads;
    cfg.item_set_grid = questioned_grid ? 0 : 1;
    cfg.truth_rate = rate;
    cfg.lfm = lfm.Config(advisor_lfm_config_default().seed);
    char* records = nullptr;
    char* summary = nullptr;
    Check(*spq_vs_random
              ? advisor_simulate_spq_vs_random(items.get(), &cfg, &records, &summary)
              : advisor_simulate_convergence(items.get(), &cfg, &records, &summary));
    const std::string r = Take(records);
    const std::string s = Take(summary);
    Output((std::filesystem::path(out_path) / "records.csv").string(), r);
    Output((std::filesystem::path(out_path) / "summary.csv").string(), s);
  } else if (*sim_ratings) {
    const ItemSet items = LoadItems(items_path);
    advisor_ratings* r = nullptr;
    Check(advisor_ratings_simulate(items.get(), users, seed, &r));
    const Ratings owned(r);
    char* csv = nullptr;
    Check(advisor_ratings_to_csv(owned.get(), &csv));
    Output(out_path, Take(csv));
  } else if (*sim_answers) {
    const ItemSet items = LoadItems(items_path);
    const Questionnaire q = LoadQuestionnaire(items.get(), questionnaire_path);
    advisor_answers* a = nullptr;
    Check(advisor_answers_simulate(items.get(), q.get(), rate, &a));
    const Answers owned(a);
    char* json = nullptr;
    Check(advisor_answers_to_json(owned.get(), &json));
    Output(out_path, Take(json));
  } else if (*sim_returns) {
    advisor_returns* r = nullptr;
    Check(advisor_returns_synthetic(assets, days, seed, &r));
    const Returns owned(r);
    char* csv = nullptr;
    Check(advisor_returns_to_csv(owned.get(), &csv));
    Output(out_path, Take(csv));
  } else if (*serve) {
    advisor_service_options opts{};
    opts.config_path = config_path.empty() ? nullptr : config_path.c_str();
    opts.items_path = items_path.empty() ? nullptr : items_path.c_str();
    opts.ratings_path = ratings_path.empty() ? nullptr : ratings_path.c_str();
    opts.returns_path = returns_path.empty() ? nullptr : returns_path.c_str();
    opts.bind = bind.empty() ? nullptr : bind.c_str();
    opts.data_dir = data_dir.empty() ? nullptr : data_dir.c_str();
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    advisor_service* s = nullptr;
    Check(advisor_service_create(&opts, &s));
    const Service service(s);
    int port = 0;
    Check(advisor_service_start(service.get(), &port));
    std::cerr << "listening on port " << port << std::endl;
    int received = 0;
    sigwait(&signals, &received);
    advisor_service_stop(service.get());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitValidation;
  } catch (const Failure& e) {
    std::cerr << "error [" << advisor_status_name(e.status) << "]: " << e.message << "\n";
    return e.status == ADVISOR_INVALID_ARGUMENT || e.status == ADVISOR_DOMAIN ? kExitValidation
                                                                              : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
