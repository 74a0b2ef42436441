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

// Durable JSON-per-session storage with optimistic versioning.

#ifndef ADVISOR_SESSION_HPP_
#define ADVISOR_SESSION_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "advisor/elicitation.hpp"
#include "advisor/io.hpp"
#include "advisor/spq.hpp"

namespace advisor {

enum class SessionStatus { kQuestioning, kAnswered, kElicited, kRecommended };

const char* SessionStatusName(SessionStatus s);
SessionStatus ParseSessionStatus(const std::string& s);

struct PortfolioRecord {
  Estimator estimator = Estimator::kNeutral;
  double budget = 0.0;
  std::vector<std::string> assets;
  std::vector<double> caps;
  std::vector<double> allocation;
  double objective = 0.0;
  std::vector<std::string> preview_dates;
  std::vector<double> wealth_preview;
};

struct SessionRecord {
  std::string id;
  std::string item_set;
  std::string method;
  std::uint64_t seed = 0;
  Questionnaire questionnaire;
  std::vector<std::optional<Choice>> answers;  // one slot per pair
  std::vector<ElicitationResult> utilities;    // in elicitation order
  std::optional<PortfolioRecord> portfolio;
  std::string created_at;
  std::string updated_at;
  SessionStatus status = SessionStatus::kQuestioning;
  std::uint64_t version = 0;

  // Answer slots match K, answered and later states hold every answer,
  // utilities only from elicited on, portfolio only when recommended.
  void Validate() const;
  bool Complete() const;
  AnswerSheet Sheet() const;  // requires Complete()
  const ElicitationResult* Utility(Estimator e) const;
};

Json SessionToJson(const SessionRecord& r);
SessionRecord SessionFromJson(const Json& j);

// One file `<id>.json` per session under `dir`. Writes to a session are
// serialized; reads see the last renamed file.
class SessionStore {
 public:
  explicit SessionStore(std::string dir);

  const std::string& dir() const { return dir_; }

  // Assigns a fresh id when `record.id` is empty, version 1 and both
  // timestamps. Throws kConflict when the id exists.
  SessionRecord Create(SessionRecord record);
  // Throws kNotFound.
  SessionRecord Get(const std::string& id) const;
  // `record.version` must equal the stored version (kConflict otherwise);
  // status never moves backwards (kInvalidArgument). Returns the stored
  // record with the version incremented.
  SessionRecord Update(SessionRecord record);
  std::vector<std::string> List() const;

 private:
  std::string PathOf(const std::string& id) const;
  std::shared_ptr<std::mutex> LockFor(const std::string& id);

  std::string dir_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace advisor

#endif  // ADVISOR_SESSION_HPP_
