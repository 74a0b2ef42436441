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

// HTTP/JSON service under /v1: sessions, answers, elicitation, portfolios.

#ifndef ADVISOR_SERVICE_HPP_
#define ADVISOR_SERVICE_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "advisor/elicitation.hpp"
#include "advisor/io.hpp"
#include "advisor/session.hpp"

namespace advisor {

struct ItemSource {
  std::string items_path;
  std::string ratings_path;  // empty: only random questionnaires
};

struct ServiceConfig {
  std::string bind = "127.0.0.1:8080";  // host:port, port 0 picks a free one
  std::string data_dir = "advisor-data";
  std::vector<ItemSource> item_sets;  // the first is the default
  std::string returns_path;           // empty: portfolio endpoint disabled
  Estimator default_estimator = Estimator::kNeutral;
  std::size_t default_k = 8;
  std::vector<std::string> cors_origins{"*"};
  unsigned workers = 2;  // concurrent solver calls
  unsigned http_threads = 8;
  std::size_t portfolio_window = 60;
  double default_cap_fraction = 0.4;
  LfmConfig lfm;

  // K >= 1, at least one item set, workers >= 1.
  void Validate() const;
};

// Fields as in ServiceConfig; relative paths resolve against the file's
// directory.
ServiceConfig ServiceConfigFromJson(const Json& j, const std::string& base_dir = ".");
ServiceConfig LoadServiceConfig(const std::string& path);
// ADVISOR_BIND and ADVISOR_DATA_DIR override the corresponding fields.
void ApplyEnvironment(ServiceConfig& config);

// {estimator, objective, grid, alpha, beta, gini, ara, rra}.
Json UtilityPayload(const ElicitationResult& r);

// HTTP status for an error category.
int HttpStatus(ErrorCode code);
// {code, message, details}.
Json ErrorPayload(ErrorCode code, const std::string& message, Json details = Json::object());

class AdvisorService {
 public:
  // Loads item sets, ratings and returns; throws on unreadable inputs.
  explicit AdvisorService(ServiceConfig config);
  ~AdvisorService();
  AdvisorService(const AdvisorService&) = delete;
  AdvisorService& operator=(const AdvisorService&) = delete;

  struct Response {
    int status = 200;
    Json body;
  };

  // Routes one request without a socket; `path` excludes the query string.
  Response Handle(const std::string& method, const std::string& path,
                  const std::string& body, const std::string& query_item_set = {});

  // Binds and serves on a background thread; returns the bound port.
  int Start();
  // Binds and serves on the calling thread until Stop().
  void Run();
  void Stop();
  int port() const;

  const ServiceConfig& config() const;
  SessionStore& store();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace advisor

#endif  // ADVISOR_SERVICE_HPP_
