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

#include "advisor/service.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <random>
#include <semaphore>
#include <set>
#include <thread>

#include <httplib.h>

#include "advisor/error.hpp"
#include "advisor/portfolio.hpp"
#include "advisor/simulation.hpp"
#include "advisor/spq.hpp"

namespace advisor {
namespace {

struct ApiError {
  int status;
  std::string code;
  std::string message;
  Json details = Json::object();
};

[[noreturn]] void Throw(int status, const std::string& code, const std::string& message,
                        Json details = Json::object()) {
  throw ApiError{status, code, message, std::move(details)};
}

std::uint64_t Fnv1a(std::string_view data, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> SplitPath(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t pos = path.find('/', start);
    const std::string part =
        path.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!part.empty()) out.push_back(part);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::pair<std::string, int> ParseBind(const std::string& bind) {
  const std::size_t colon = bind.rfind(':');
  Require(colon != std::string::npos && colon > 0, "bind address must be host:port");
  const std::string host = bind.substr(0, colon);
  int port = -1;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
  }
  Require(port >= 0 && port <= 65535, "bind port must be in 0..65535");
  return {host, port};
}

std::size_t RequireCount(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) Throw(422, "invalid_argument", field + " must be an integer");
  const long long n = v.get<long long>();
  if (n < 1) Throw(422, "invalid_argument", field + " must be at least 1");
  return static_cast<std::size_t>(n);
}

std::string Resolve(const std::string& base, const std::string& path) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

}  // namespace

void ServiceConfig::Validate() const {
  Require(default_k >= 1, "default K must be at least 1");
  Require(!item_sets.empty(), "at least one item set is required");
  Require(workers >= 1, "at least one worker is required");
  Require(http_threads >= 1, "at least one HTTP thread is required");
  Require(portfolio_window >= 1, "portfolio window must be at least 1");
  Require(default_cap_fraction > 0.0, "cap fraction must be positive");
  ParseBind(bind);
}

ServiceConfig ServiceConfigFromJson(const Json& j, const std::string& base_dir) {
  Require(j.is_object(), "service config must be an object");
  ServiceConfig c;
  try {
    if (j.contains("bind")) c.bind = j["bind"].get<std::string>();
    if (j.contains("data_dir")) c.data_dir = Resolve(base_dir, j["data_dir"].get<std::string>());
    if (j.contains("item_sets")) {
      for (const Json& s : j["item_sets"]) {
        ItemSource src;
        src.items_path = Resolve(base_dir, s.at("items").get<std::string>());
        if (s.contains("ratings")) {
          src.ratings_path = Resolve(base_dir, s["ratings"].get<std::string>());
        }
        c.item_sets.push_back(src);
      }
    }
    if (j.contains("returns")) c.returns_path = Resolve(base_dir, j["returns"].get<std::string>());
    if (j.contains("default_estimator")) {
      c.default_estimator = ParseEstimator(j["default_estimator"].get<std::string>());
    }
    if (j.contains("default_k")) c.default_k = j["default_k"].get<std::size_t>();
    if (j.contains("cors_origins")) {
      c.cors_origins = j["cors_origins"].get<std::vector<std::string>>();
    }
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
    if (j.contains("http_threads")) c.http_threads = j["http_threads"].get<unsigned>();
    if (j.contains("portfolio_window")) c.portfolio_window = j["portfolio_window"].get<std::size_t>();
    if (j.contains("default_cap_fraction")) {
      c.default_cap_fraction = j["default_cap_fraction"].get<double>();
    }
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("service config: ") + e.what());
  }
  return c;
}

ServiceConfig LoadServiceConfig(const std::string& path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  return ServiceConfigFromJson(LoadJson(path), base.empty() ? "." : base);
}

void ApplyEnvironment(ServiceConfig& config) {
  if (const char* b = std::getenv("ADVISOR_BIND"); b && *b) config.bind = b;
  if (const char* d = std::getenv("ADVISOR_DATA_DIR"); d && *d) config.data_dir = d;
}

Json UtilityPayload(const ElicitationResult& r) {
  Json j = UtilityToJson(r.utility, r.estimator, r.objective);
  const RiskAnalytics a = RiskAversion(r.utility);
  const Json analytics = RiskAnalyticsToJson(a);
  j["gini"] = analytics["gini"];
  j["ara"] = analytics["ara"];
  j["rra"] = analytics["rra"];
  return j;
}

int HttpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDomain:
    case ErrorCode::kInfeasible:
      return 422;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    default: return 500;
  }
}

Json ErrorPayload(ErrorCode code, const std::string& message, Json details) {
  return Json{{"code", ErrorCodeName(code)}, {"message", message}, {"details", std::move(details)}};
}

struct AdvisorService::State {
  struct ItemEntry {
    ItemSet items;
    std::string canonical;
    std::optional<RatingsMatrix> ratings;
    std::string ratings_text;
    BreakpointGrid grid;
    ScenarioSet scenarios;
  };

  explicit State(ServiceConfig c)
      : config(std::move(c)), store(config.data_dir), workers(config.workers) {}

  ServiceConfig config;
  SessionStore store;
  std::map<std::string, ItemEntry> item_sets;
  std::string default_item_set;
  std::optional<ReturnsPanel> panel;
  std::counting_semaphore<1024> workers;

  std::mutex spq_mutex;
  std::map<std::uint64_t, Questionnaire> spq_cache;

  std::mutex session_locks_mutex;
  std::map<std::string, std::shared_ptr<std::mutex>> session_locks;

  httplib::Server server;
  std::thread thread;
  std::atomic<int> port{-1};

  std::shared_ptr<std::mutex> SessionLock(const std::string& id) {
    std::lock_guard<std::mutex> lock(session_locks_mutex);
    auto& m = session_locks[id];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
  }

  const ItemEntry& Entry(const std::string& name) const {
    const auto it = item_sets.find(name.empty() ? default_item_set : name);
    if (it == item_sets.end()) Throw(404, "not_found", "unknown item set '" + name + "'");
    return it->second;
  }

  template <typename F>
  auto WithWorker(F f) {
    workers.acquire();
    struct Release {
      std::counting_semaphore<1024>& s;
      ~Release() { s.release(); }
    } release{workers};
    return f();
  }

  Json Questions(const SessionRecord& r) const {
    const ItemSet& items = Entry(r.item_set).items;
    Json qs = Json::array();
    for (std::size_t k = 0; k < r.questionnaire.size(); ++k) {
      const ItemPair& p = r.questionnaire.pairs[k];
      qs.push_back(Json{{"index", k},
                        {"first", LotteryToJson(items[p.first])},
                        {"second", LotteryToJson(items[p.second])}});
    }
    return qs;
  }

  Json SessionView(const SessionRecord& r) const {
    Json j = SessionToJson(r);
    j["questions"] = Questions(r);
    return j;
  }

  Questionnaire SpqQuestionnaire(const ItemEntry& e, std::size_t k) {
    std::uint64_t h = Fnv1a(e.ratings_text);
    h = Fnv1a("\x1f", h);
    h = Fnv1a(e.canonical, h);
    h = Fnv1a("\x1f" + std::to_string(k), h);
    {
      std::lock_guard<std::mutex> lock(spq_mutex);
      const auto it = spq_cache.find(h);
      if (it != spq_cache.end()) return it->second;
    }
    Questionnaire q = WithWorker([&] {
      const LfmModel model = FitLfm(*e.ratings, config.lfm);
      return SelectPairsSpq(model, e.items, k);
    });
    std::lock_guard<std::mutex> lock(spq_mutex);
    return spq_cache.emplace(h, std::move(q)).first->second;
  }

  Response CreateSession(const Json& body) {
    const std::string item_set =
        body.contains("item_set") ? body["item_set"].get<std::string>() : default_item_set;
    const ItemEntry& e = Entry(item_set);
    const std::size_t k = body.contains("K") ? RequireCount(body["K"], "K") : config.default_k;
    if (k > PairCount(e.items.size())) {
      Throw(422, "invalid_argument",
            "K = " + std::to_string(k) + " exceeds the " +
                std::to_string(PairCount(e.items.size())) + " distinct pairs");
    }
    std::string method = body.contains("method") ? body["method"].get<std::string>()
                                                 : (e.ratings ? "spq" : "random");
    if (method != "spq" && method != "random") {
      Throw(422, "invalid_argument", "method must be 'spq' or 'random'");
    }
    SessionRecord r;
    r.item_set = e.items.name();
    r.method = method;
    if (method == "spq") {
      if (!e.ratings) {
        Throw(409, "conflict", "SPQ needs a ratings matrix; none is configured for item set '" +
                                   e.items.name() + "'");
      }
      r.questionnaire = SpqQuestionnaire(e, k);
    } else {
      r.seed = std::random_device{}();
      r.seed = (r.seed << 32) ^ std::random_device{}();
      r.questionnaire = SelectPairsRandom(e.items, k, r.seed);
    }
    r.answers.assign(k, std::nullopt);
    r = store.Create(r);
    r.questionnaire.id = r.id;
    {
      const auto mu = SessionLock(r.id);
      std::lock_guard<std::mutex> lock(*mu);
      r = store.Update(r);
    }
    return {201, Json{{"session_id", r.id},
                      {"status", SessionStatusName(r.status)},
                      {"method", r.method},
                      {"questions", Questions(r)}}};
  }

  Response SubmitAnswers(const std::string& id, const Json& body) {
    const auto mu = SessionLock(id);
    std::lock_guard<std::mutex> lock(*mu);
    SessionRecord r = store.Get(id);
    if (r.status != SessionStatus::kQuestioning) {
      Throw(409, "conflict", "session " + id + " is " + SessionStatusName(r.status) +
                                 " and accepts no more answers");
    }
    if (!body.contains("answers") || !body["answers"].is_array()) {
      Throw(422, "invalid_argument", "answers must be an array");
    }
    std::set<std::size_t> seen;
    for (std::size_t n = 0; n < body["answers"].size(); ++n) {
      const Json& a = body["answers"][n];
      const std::string where = "answers[" + std::to_string(n) + "]";
      if (!a.is_object() || !a.contains("pair_index") || !a["pair_index"].is_number_integer()) {
        Throw(422, "invalid_argument", where + ".pair_index must be an integer");
      }
      const long long idx = a["pair_index"].get<long long>();
      if (idx < 0 || idx >= static_cast<long long>(r.answers.size())) {
        Throw(422, "invalid_argument",
              where + ".pair_index " + std::to_string(idx) + " outside [0, " +
                  std::to_string(r.answers.size()) + ")");
      }
      if (!seen.insert(static_cast<std::size_t>(idx)).second) {
        Throw(422, "invalid_argument", where + " repeats pair_index " + std::to_string(idx));
      }
      if (!a.contains("choice") || !a["choice"].is_string()) {
        Throw(422, "invalid_argument", where + ".choice must be a string");
      }
      r.answers[static_cast<std::size_t>(idx)] = ParseChoice(a["choice"].get<std::string>());
    }
    if (r.Complete()) r.status = SessionStatus::kAnswered;
    r = store.Update(r);
    std::size_t answered = 0;
    for (const auto& a : r.answers) answered += a.has_value();
    return {200, Json{{"status", SessionStatusName(r.status)},
                      {"answered", answered},
                      {"remaining", r.answers.size() - answered}}};
  }

  static std::vector<Estimator> RequestedEstimators(const Json& body) {
    std::vector<Estimator> out;
    if (body.contains("estimators")) {
      if (!body["estimators"].is_array()) {
        Throw(422, "invalid_argument", "estimators must be an array");
      }
      for (const Json& e : body["estimators"]) {
        if (!e.is_string()) Throw(422, "invalid_argument", "estimator names must be strings");
        out.push_back(ParseEstimator(e.get<std::string>()));
      }
    }
    if (out.empty()) {
      out = {Estimator::kPessimistic, Estimator::kOptimistic, Estimator::kNeutral};
    }
    return out;
  }

  Response Elicit(const std::string& id, const Json& body) {
    const std::vector<Estimator> wanted = RequestedEstimators(body);
    const auto mu = SessionLock(id);
    std::lock_guard<std::mutex> lock(*mu);
    SessionRecord r = store.Get(id);
    if (r.status == SessionStatus::kQuestioning) {
      Throw(409, "conflict", "session " + id + " has unanswered questions");
    }
    if (r.status == SessionStatus::kAnswered) {
      const ItemEntry& e = Entry(r.item_set);
      const ElicitationSet set = WithWorker([&] {
        const ElicitationProblem problem(e.items, r.questionnaire, r.Sheet(), e.grid,
                                         e.scenarios);
        return problem.All();
      });
      r.utilities = {set.pessimistic, set.optimistic, set.neutral};
      r.status = SessionStatus::kElicited;
      r = store.Update(r);
    }
    Json utilities = Json::object();
    for (Estimator est : wanted) {
      const ElicitationResult* u = r.Utility(est);
      if (u) utilities[EstimatorName(est)] = UtilityPayload(*u);
    }
    return {200, Json{{"status", SessionStatusName(r.status)}, {"utilities", utilities}}};
  }

  Response Recommend(const std::string& id, const Json& body) {
    if (!panel) Throw(409, "conflict", "no returns panel is configured");
    const auto mu = SessionLock(id);
    std::lock_guard<std::mutex> lock(*mu);
    SessionRecord r = store.Get(id);
    if (r.status < SessionStatus::kElicited) {
      Throw(409, "conflict", "session " + id + " has not been elicited");
    }
    const Estimator est = body.contains("estimator")
                              ? ParseEstimator(body["estimator"].get<std::string>())
                              : config.default_estimator;
    const ElicitationResult* u = r.Utility(est);
    if (!u) Throw(404, "not_found", std::string("no ") + EstimatorName(est) + " utility stored");
    if (!body.contains("budget") || !body["budget"].is_number()) {
      Throw(422, "invalid_argument", "budget must be a number");
    }
    const double budget = body["budget"].get<double>();
    const std::size_t rows = std::min(config.portfolio_window, panel->rows());
    const ReturnsPanel window = panel->Slice(panel->rows() - rows, rows);
    PortfolioSpec spec;
    if (body.contains("caps") && !body["caps"].is_null()) {
      const Json& caps = body["caps"];
      spec.budget = budget;
      if (caps.is_array()) {
        for (const Json& c : caps) {
          if (!c.is_number()) Throw(422, "invalid_argument", "caps must be numbers");
          spec.caps.push_back(c.get<double>());
        }
      } else if (caps.is_object()) {
        spec.caps.assign(window.columns(), 0.0);
        std::vector<bool> given(window.columns(), false);
        for (const auto& [name, v] : caps.items()) {
          const auto it = std::find(window.assets.begin(), window.assets.end(), name);
          if (it == window.assets.end()) {
            Throw(422, "invalid_argument", "unknown asset '" + name + "' in caps");
          }
          if (!v.is_number()) Throw(422, "invalid_argument", "caps must be numbers");
          const auto c = static_cast<std::size_t>(it - window.assets.begin());
          spec.caps[c] = v.get<double>();
          given[c] = true;
        }
        for (std::size_t c = 0; c < given.size(); ++c) {
          if (!given[c]) {
            Throw(422, "invalid_argument", "caps lack asset '" + window.assets[c] + "'");
          }
        }
      } else {
        Throw(422, "invalid_argument", "caps must be an array or an object");
      }
    } else {
      spec = PortfolioSpec::WithCapFraction(budget, window.columns(), config.default_cap_fraction);
    }
    const Portfolio p =
        WithWorker([&] { return OptimizePortfolio(u->utility, window, spec); });
    PortfolioRecord rec;
    rec.estimator = est;
    rec.budget = budget;
    rec.assets = window.assets;
    rec.caps = spec.caps;
    rec.allocation = p.x;
    rec.objective = p.objective;
    rec.preview_dates = window.dates;
    for (std::size_t t = 0; t < window.rows(); ++t) {
      double w = 0.0;
      for (std::size_t c = 0; c < window.columns(); ++c) {
        w += window.factors(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) * p.x[c];
      }
      rec.wealth_preview.push_back(w);
    }
    r.portfolio = rec;
    r.status = SessionStatus::kRecommended;
    r = store.Update(r);
    Json alloc = Json::array();
    for (std::size_t c = 0; c < rec.assets.size(); ++c) {
      alloc.push_back(Json{{"asset", rec.assets[c]}, {"amount", rec.allocation[c]}});
    }
    Json preview = Json::array();
    for (std::size_t t = 0; t < rec.preview_dates.size(); ++t) {
      preview.push_back(Json{{"date", rec.preview_dates[t]}, {"wealth", rec.wealth_preview[t]}});
    }
    return {200, Json{{"status", SessionStatusName(r.status)},
                      {"estimator", EstimatorName(est)},
                      {"budget", budget},
                      {"allocation", alloc},
                      {"objective", rec.objective},
                      {"wealth_preview", preview}}};
  }

  Response Route(const std::string& method, const std::string& path, const std::string& body_text,
                 const std::string& query_item_set) {
    const std::vector<std::string> seg = SplitPath(path);
    if (seg.empty() || seg[0] != "v1") Throw(404, "not_found", "no route for " + path);
    Json body = Json::object();
    if (method == "POST" && !body_text.empty()) {
      try {
        body = Json::parse(body_text);
      } catch (const Json::parse_error& e) {
        Throw(400, "invalid_json", std::string("request body is not valid JSON: ") + e.what());
      }
      if (!body.is_object()) Throw(400, "invalid_json", "request body must be a JSON object");
    }
    const std::size_t n = seg.size();
    if (n == 2 && seg[1] == "healthz" && method == "GET") {
      return {200, Json{{"status", "ok"}}};
    }
    if (n == 2 && seg[1] == "items" && method == "GET") {
      return {200, ItemSetToJson(Entry(query_item_set).items)};
    }
    if (n >= 2 && seg[1] == "sessions") {
      if (n == 2 && method == "POST") return CreateSession(body);
      if (n == 3 && method == "GET") return {200, SessionView(store.Get(seg[2]))};
      if (n == 4 && method == "POST") {
        if (seg[3] == "answers") return SubmitAnswers(seg[2], body);
        if (seg[3] == "elicit") return Elicit(seg[2], body);
        if (seg[3] == "portfolio") return Recommend(seg[2], body);
      }
    }
    Throw(404, "not_found", "no route for " + method + " " + path);
  }
};

AdvisorService::AdvisorService(ServiceConfig config) {
  config.Validate();
  state_ = std::make_unique<State>(std::move(config));
  State& s = *state_;
  for (const ItemSource& src : s.config.item_sets) {
    State::ItemEntry e;
    e.items = LoadItemSet(src.items_path);
    e.canonical = CanonicalJson(ItemSetToJson(e.items));
    if (!src.ratings_path.empty()) {
      e.ratings_text = ReadTextFile(src.ratings_path);
      try {
        e.ratings = ParseRatingsCsv(e.ratings_text, e.items);
      } catch (const Error& err) {
        Fail(err.code(), src.ratings_path + ": " + err.what());
      }
    }
    e.grid = BreakpointGrid::FromLotteries(e.items.items(), e.items.MaxOutcome());
    e.scenarios = BuildScenarios(e.items, DefaultBenchmark(e.items));
    const std::string name = e.items.name();
    Require(!s.item_sets.count(name), "duplicate item set name '" + name + "'");
    if (s.default_item_set.empty()) s.default_item_set = name;
    s.item_sets.emplace(name, std::move(e));
  }
  if (!s.config.returns_path.empty()) s.panel = LoadReturns(s.config.returns_path);

  const unsigned threads = s.config.http_threads;
  s.server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  s.server.set_payload_max_length(8u << 20);
  const std::vector<std::string> origins = s.config.cors_origins;
  s.server.set_post_routing_handler([origins](const httplib::Request& req, httplib::Response& res) {
    const std::string origin = req.get_header_value("Origin");
    const bool any = std::find(origins.begin(), origins.end(), "*") != origins.end();
    if (any) {
      res.set_header("Access-Control-Allow-Origin", "*");
    } else if (!origin.empty() &&
               std::find(origins.begin(), origins.end(), origin) != origins.end()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  s.server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const Response r = Handle(req.method, req.path, req.body,
                              req.has_param("item_set") ? req.get_param_value("item_set") : "");
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  s.server.Get(R"(/v1/.*)", handler);
  s.server.Post(R"(/v1/.*)", handler);
}

AdvisorService::~AdvisorService() { Stop(); }

AdvisorService::Response AdvisorService::Handle(const std::string& method,
                                                const std::string& path,
                                                const std::string& body,
                                                const std::string& query_item_set) {
  try {
    return state_->Route(method, path, body, query_item_set);
  } catch (const ApiError& e) {
    return {e.status, Json{{"code", e.code}, {"message", e.message}, {"details", e.details}}};
  } catch (const InconsistentAnswers& e) {
    return {422, ErrorPayload(e.code(), e.what(),
                              Json{{"conflicting_pairs", e.conflict()}})};
  } catch (const Error& e) {
    return {HttpStatus(e.code()), ErrorPayload(e.code(), e.what())};
  } catch (const Json::exception& e) {
    return {422, ErrorPayload(ErrorCode::kInvalidArgument, e.what())};
  } catch (const std::exception& e) {
    return {500, ErrorPayload(ErrorCode::kInternal, e.what())};
  }
}

namespace {

int Bind(httplib::Server& server, const std::string& bind) {
  const auto [host, port] = ParseBind(bind);
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) Fail(ErrorCode::kIo, "cannot bind " + bind);
  return bound;
}

}  // namespace

int AdvisorService::Start() {
  State& s = *state_;
  s.port = Bind(s.server, s.config.bind);
  s.thread = std::thread([&s] { s.server.listen_after_bind(); });
  s.server.wait_until_ready();
  return s.port;
}

void AdvisorService::Run() {
  State& s = *state_;
  s.port = Bind(s.server, s.config.bind);
  s.server.listen_after_bind();
}

void AdvisorService::Stop() {
  if (!state_) return;
  state_->server.stop();
  if (state_->thread.joinable() && state_->thread.get_id() != std::this_thread::get_id()) {
    state_->thread.join();
  }
}

int AdvisorService::port() const { return state_->port; }
const ServiceConfig& AdvisorService::config() const { return state_->config; }
SessionStore& AdvisorService::store() { return state_->store; }

}  // namespace advisor
