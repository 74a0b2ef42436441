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

// File formats: item sets, ratings, returns panels, questionnaires, answer
// sheets, elicited utilities and experiment outputs.

#ifndef ADVISOR_IO_HPP_
#define ADVISOR_IO_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "advisor/elicitation.hpp"
#include "advisor/lottery.hpp"
#include "advisor/portfolio.hpp"
#include "advisor/simulation.hpp"
#include "advisor/spq.hpp"

namespace advisor {

using Json = nlohmann::ordered_json;

// Probability sums within this distance of 1 are renormalized on load.
inline constexpr double kProbabilitySumTolerance = 1e-6;

// Shortest decimal that round-trips to the same double.
std::string FormatNumber(double v);

std::string ReadTextFile(const std::string& path);
// Writes to a temporary sibling, syncs and renames over `path`.
void WriteTextFileAtomic(const std::string& path, std::string_view content);

// Two-space indentation, UTF-8, trailing newline.
std::string CanonicalJson(const Json& j);
// Throws kInvalidArgument with the parser position.
Json ParseJson(std::string_view text, const std::string& source);
Json LoadJson(const std::string& path);
void SaveJson(const std::string& path, const Json& j);

Json ItemSetToJson(const ItemSet& items);
ItemSet ItemSetFromJson(const Json& j);
ItemSet LoadItemSet(const std::string& path);

Json LotteryToJson(const Lottery& l);

// Header `user_id,item_id,rating`; users indexed in order of appearance.
RatingsMatrix ParseRatingsCsv(std::string_view text, const ItemSet& items);
RatingsMatrix LoadRatings(const std::string& path, const ItemSet& items);
std::string RatingsCsv(const RatingsMatrix& r);

// Header `date,<asset>,...` with daily net returns; a `cash` column with
// factor 1 is prepended.
ReturnsPanel ParseReturnsCsv(std::string_view text);
ReturnsPanel LoadReturns(const std::string& path);
std::string ReturnsCsv(const ReturnsPanel& panel);

// {mu, item_bias, user_bias, item_factors, user_factors, objective, iterations,
// trace}; factor matrices row-major.
Json LfmModelToJson(const LfmModel& m, const RatingsMatrix& r);

Json QuestionnaireToJson(const Questionnaire& q, const ItemSet& items);
Questionnaire QuestionnaireFromJson(const Json& j, const ItemSet& items);

Json AnswerSheetToJson(const AnswerSheet& sheet);
// Every pair index from 0 to n - 1 exactly once.
AnswerSheet AnswerSheetFromJson(const Json& j);

Json UtilityToJson(const PwlUtility& u, std::optional<Estimator> estimator = {},
                   std::optional<double> objective = {});
PwlUtility UtilityFromJson(const Json& j);
Json ElicitationResultToJson(const ElicitationResult& r);
ElicitationResult ElicitationResultFromJson(const Json& j);

Json RiskAnalyticsToJson(const RiskAnalytics& r);

Json PortfolioToJson(const Portfolio& p, const ReturnsPanel& panel);

// `date,estimator,wealth`.
std::string WealthCsv(const std::vector<WealthCurve>& curves);
// `method,estimator,K,repetition,distance`.
std::string ExperimentRecordsCsv(const ExperimentReport& report);
// `method,estimator,K,mean,stddev`.
std::string ExperimentSummaryCsv(const ExperimentReport& report);

}  // namespace advisor

#endif  // ADVISOR_IO_HPP_
