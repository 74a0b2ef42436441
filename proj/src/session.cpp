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

#include "advisor/session.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <random>

#include "advisor/error.hpp"

namespace advisor {
namespace {

namespace fs = std::filesystem;

bool ValidId(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  }
  return true;
}

std::string NowUtc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

std::string FreshId() {
  static std::mutex mu;
  static std::mt19937_64 gen{std::random_device{}()};
  std::lock_guard<std::mutex> lock(mu);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

Json Doubles(const std::vector<double>& v) { return Json(v); }

std::vector<double> ReadDoubles(const Json& j, const char* key) {
  std::vector<double> out;
  for (const Json& v : j.at(key)) out.push_back(v.get<double>());
  return out;
}

}  // namespace

const char* SessionStatusName(SessionStatus s) {
  switch (s) {
    case SessionStatus::kQuestioning: return "questioning";
    case SessionStatus::kAnswered: return "answered";
    case SessionStatus::kElicited: return "elicited";
    case SessionStatus::kRecommended: return "recommended";
  }
  return "questioning";
}

SessionStatus ParseSessionStatus(const std::string& s) {
  for (SessionStatus st : {SessionStatus::kQuestioning, SessionStatus::kAnswered,
                           SessionStatus::kElicited, SessionStatus::kRecommended}) {
    if (s == SessionStatusName(st)) return st;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown session status '" + s + "'");
}

void SessionRecord::Validate() const {
  Require(answers.size() == questionnaire.size(), "session needs one answer slot per pair");
  if (status >= SessionStatus::kAnswered) {
    Require(Complete(), "session status " + std::string(SessionStatusName(status)) +
                            " requires every answer");
  }
  Require(status >= SessionStatus::kElicited || utilities.empty(),
          "utilities are only stored once elicited");
  Require(status >= SessionStatus::kElicited || !portfolio,
          "portfolio is only stored once elicited");
  Require(status != SessionStatus::kRecommended || portfolio.has_value(),
          "recommended session needs a portfolio");
}

bool SessionRecord::Complete() const {
  for (const auto& a : answers) {
    if (!a) return false;
  }
  return answers.size() == questionnaire.size();
}

AnswerSheet SessionRecord::Sheet() const {
  Require(Complete(), "session " + id + " is not fully answered");
  AnswerSheet s;
  s.questionnaire_id = questionnaire.id;
  for (const auto& a : answers) s.answers.push_back(*a);
  return s;
}

const ElicitationResult* SessionRecord::Utility(Estimator e) const {
  for (const ElicitationResult& r : utilities) {
    if (r.estimator == e) return &r;
  }
  return nullptr;
}

Json SessionToJson(const SessionRecord& r) {
  Json j;
  j["id"] = r.id;
  j["version"] = r.version;
  j["status"] = SessionStatusName(r.status);
  j["item_set"] = r.item_set;
  j["method"] = r.method;
  j["seed"] = r.seed;
  Json q;
  q["id"] = r.questionnaire.id;
  Json pairs = Json::array();
  for (const ItemPair& p : r.questionnaire.pairs) {
    pairs.push_back(Json{{"first", p.first}, {"second", p.second}});
  }
  q["pairs"] = std::move(pairs);
  q["provenance"] = ProvenanceName(r.questionnaire.provenance);
  q["objective"] =
      r.questionnaire.objective ? Json(*r.questionnaire.objective) : Json(nullptr);
  j["questionnaire"] = std::move(q);
  Json answers = Json::array();
  for (const auto& a : r.answers) answers.push_back(a ? Json(ChoiceName(*a)) : Json(nullptr));
  j["answers"] = std::move(answers);
  Json utilities = Json::array();
  for (const ElicitationResult& u : r.utilities) utilities.push_back(ElicitationResultToJson(u));
  j["utilities"] = std::move(utilities);
  if (r.portfolio) {
    const PortfolioRecord& p = *r.portfolio;
    j["portfolio"] = Json{{"estimator", EstimatorName(p.estimator)},
                          {"budget", p.budget},
                          {"assets", p.assets},
                          {"caps", Doubles(p.caps)},
                          {"allocation", Doubles(p.allocation)},
                          {"objective", p.objective},
                          {"preview_dates", p.preview_dates},
                          {"wealth_preview", Doubles(p.wealth_preview)}};
  } else {
    j["portfolio"] = nullptr;
  }
  j["created_at"] = r.created_at;
  j["updated_at"] = r.updated_at;
  return j;
}

SessionRecord SessionFromJson(const Json& j) {
  SessionRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.version = j.at("version").get<std::uint64_t>();
    r.status = ParseSessionStatus(j.at("status").get<std::string>());
    r.item_set = j.at("item_set").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const Json& q = j.at("questionnaire");
    r.questionnaire.id = q.at("id").get<std::string>();
    for (const Json& p : q.at("pairs")) {
      r.questionnaire.pairs.push_back(
          {p.at("first").get<std::size_t>(), p.at("second").get<std::size_t>()});
    }
    r.questionnaire.provenance = ParseProvenance(q.at("provenance").get<std::string>());
    if (!q.at("objective").is_null()) r.questionnaire.objective = q["objective"].get<double>();
    for (const Json& a : j.at("answers")) {
      r.answers.push_back(a.is_null() ? std::nullopt
                                      : std::optional<Choice>(ParseChoice(a.get<std::string>())));
    }
    for (const Json& u : j.at("utilities")) r.utilities.push_back(ElicitationResultFromJson(u));
    if (!j.at("portfolio").is_null()) {
      const Json& p = j["portfolio"];
      PortfolioRecord pr;
      pr.estimator = ParseEstimator(p.at("estimator").get<std::string>());
      pr.budget = p.at("budget").get<double>();
      pr.assets = p.at("assets").get<std::vector<std::string>>();
      pr.caps = ReadDoubles(p, "caps");
      pr.allocation = ReadDoubles(p, "allocation");
      pr.objective = p.at("objective").get<double>();
      pr.preview_dates = p.at("preview_dates").get<std::vector<std::string>>();
      pr.wealth_preview = ReadDoubles(p, "wealth_preview");
      r.portfolio = std::move(pr);
    }
    r.created_at = j.at("created_at").get<std::string>();
    r.updated_at = j.at("updated_at").get<std::string>();
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("malformed session record: ") + e.what());
  }
  return r;
}

SessionStore::SessionStore(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    Fail(ErrorCode::kIo, "cannot create session directory " + dir_);
  }
}

std::string SessionStore::PathOf(const std::string& id) const {
  return (fs::path(dir_) / (id + ".json")).string();
}

std::shared_ptr<std::mutex> SessionStore::LockFor(const std::string& id) {
  std::lock_guard<std::mutex> lock(locks_mutex_);
  auto& m = locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

SessionRecord SessionStore::Create(SessionRecord record) {
  if (record.id.empty()) record.id = FreshId();
  Require(ValidId(record.id), "invalid session id '" + record.id + "'");
  record.Validate();
  const auto mu = LockFor(record.id);
  std::lock_guard<std::mutex> lock(*mu);
  if (fs::exists(PathOf(record.id))) {
    Fail(ErrorCode::kConflict, "session " + record.id + " already exists");
  }
  record.version = 1;
  record.created_at = record.updated_at = NowUtc();
  SaveJson(PathOf(record.id), SessionToJson(record));
  return record;
}

SessionRecord SessionStore::Get(const std::string& id) const {
  if (!ValidId(id) || !fs::exists(PathOf(id))) {
    Fail(ErrorCode::kNotFound, "session " + id + " not found");
  }
  return SessionFromJson(LoadJson(PathOf(id)));
}

SessionRecord SessionStore::Update(SessionRecord record) {
  if (!ValidId(record.id)) Fail(ErrorCode::kNotFound, "session " + record.id + " not found");
  record.Validate();
  const auto mu = LockFor(record.id);
  std::lock_guard<std::mutex> lock(*mu);
  const SessionRecord current = Get(record.id);
  if (record.version != current.version) {
    Fail(ErrorCode::kConflict, "session " + record.id + " is at version " +
                                   std::to_string(current.version) + ", update carried " +
                                   std::to_string(record.version));
  }
  Require(record.status >= current.status,
          "session status cannot move from " + std::string(SessionStatusName(current.status)) +
              " to " + SessionStatusName(record.status));
  record.version = current.version + 1;
  record.created_at = current.created_at;
  record.updated_at = NowUtc();
  SaveJson(PathOf(record.id), SessionToJson(record));
  return record;
}

std::vector<std::string> SessionStore::List() const {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.is_regular_file() && e.path().extension() == ".json") {
      ids.push_back(e.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace advisor
