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

#include "advisor/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "advisor/error.hpp"

namespace advisor {
namespace {

[[noreturn]] void Invalid(const std::string& path, const std::string& message) {
  Fail(ErrorCode::kInvalidArgument, path + ": " + message);
}

const Json& Field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) Invalid(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) Invalid(path + "." + key, "missing field");
  return *it;
}

std::string StringField(const Json& j, const char* key, const std::string& path) {
  const Json& v = Field(j, key, path);
  if (!v.is_string()) Invalid(path + "." + key, "expected a string");
  return v.get<std::string>();
}

double NumberValue(const Json& v, const std::string& path) {
  if (!v.is_number()) Invalid(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) Invalid(path, "expected a finite number");
  return d;
}

double NumberField(const Json& j, const char* key, const std::string& path) {
  return NumberValue(Field(j, key, path), path + "." + key);
}

const Json& ArrayField(const Json& j, const char* key, const std::string& path) {
  const Json& v = Field(j, key, path);
  if (!v.is_array()) Invalid(path + "." + key, "expected an array");
  return v;
}

std::vector<double> NumberArray(const Json& j, const char* key, const std::string& path) {
  const Json& a = ArrayField(j, key, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back(NumberValue(a[i], path + "." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string Indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::vector<std::string_view> Split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Non-empty lines with their 1-based line numbers; a UTF-8 BOM is dropped.
std::vector<std::pair<std::size_t, std::string_view>> Lines(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t number = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++number;
    line = Trim(line);
    if (!line.empty()) out.emplace_back(number, line);
  }
  return out;
}

double ParseDouble(std::string_view s, const std::string& where) {
  s = Trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    Invalid(where, "'" + std::string(s) + "' is not a finite number");
  }
  return v;
}

std::string LineRef(const std::string& what, std::size_t line) {
  return what + " line " + std::to_string(line);
}

}  // namespace

std::string FormatNumber(double v) {
  char buf[64];
  const double a = std::abs(v);
  const bool fixed = a == 0.0 || (a >= 1e-6 && a < 1e15);
  const auto [ptr, ec] = fixed ? std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed)
                               : std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) Fail(ErrorCode::kInternal, "number formatting failed");
  return std::string(buf, ptr);
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) Fail(ErrorCode::kIo, "read failed for " + path);
  return ss.str();
}

void WriteTextFileAtomic(const std::string& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  const std::filesystem::path target(path);
  const std::string tmp = path + ".tmp." + std::to_string(::getpid()) + "." +
                          std::to_string(counter.fetch_add(1));
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) Fail(ErrorCode::kIo, "cannot create " + tmp + ": " + std::strerror(errno));
  const char* p = content.data();
  std::size_t left = content.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      ::unlink(tmp.c_str());
      Fail(ErrorCode::kIo, "write failed for " + tmp + ": " + std::strerror(err));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    ::unlink(tmp.c_str());
    Fail(ErrorCode::kIo, "sync failed for " + tmp);
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    const int err = errno;
    ::unlink(tmp.c_str());
    Fail(ErrorCode::kIo, "rename to " + path + " failed: " + std::strerror(err));
  }
  const std::string dir =
      target.has_parent_path() ? target.parent_path().string() : std::string(".");
  const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

std::string CanonicalJson(const Json& j) {
  return j.dump(2, ' ', false, Json::error_handler_t::strict) + "\n";
}

Json ParseJson(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kInvalidArgument,
         source + ": invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

Json LoadJson(const std::string& path) { return ParseJson(ReadTextFile(path), path); }

void SaveJson(const std::string& path, const Json& j) {
  WriteTextFileAtomic(path, CanonicalJson(j));
}

Json LotteryToJson(const Lottery& l) {
  Json outcomes = Json::array();
  for (const Outcome& o : l.outcomes()) {
    outcomes.push_back(Json{{"value", o.value}, {"prob", o.prob}});
  }
  return Json{{"id", l.id()}, {"label", l.label()}, {"outcomes", std::move(outcomes)}};
}

Json ItemSetToJson(const ItemSet& items) {
  Json arr = Json::array();
  for (const Lottery& l : items.items()) arr.push_back(LotteryToJson(l));
  return Json{{"name", items.name()}, {"items", std::move(arr)}};
}

ItemSet ItemSetFromJson(const Json& j) {
  const std::string root = "item set";
  const std::string name = StringField(j, "name", root);
  const Json& arr = ArrayField(j, "items", root);
  std::vector<Lottery> lotteries;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = Indexed("items", i);
    const std::string id = StringField(arr[i], "id", path);
    const std::string label = StringField(arr[i], "label", path);
    const Json& outs = ArrayField(arr[i], "outcomes", path);
    if (outs.empty()) Invalid(path + ".outcomes", "at least one outcome is required");
    std::vector<Outcome> outcomes;
    double sum = 0.0;
    for (std::size_t k = 0; k < outs.size(); ++k) {
      const std::string op = Indexed(path + ".outcomes", k);
      const Outcome o{NumberField(outs[k], "value", op), NumberField(outs[k], "prob", op)};
      if (o.value < 0.0) Invalid(op + ".value", "must be non-negative");
      if (!(o.prob > 0.0)) Invalid(op + ".prob", "must be positive");
      sum += o.prob;
      outcomes.push_back(o);
    }
    if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
      Invalid(path + ".outcomes", "probabilities sum to " + FormatNumber(sum));
    }
    if (sum != 1.0) {
      for (Outcome& o : outcomes) o.prob /= sum;
    }
    try {
      lotteries.emplace_back(id, label, std::move(outcomes));
    } catch (const Error& e) {
      Invalid(path, e.what());
    }
  }
  try {
    return ItemSet(name, std::move(lotteries));
  } catch (const Error& e) {
    Invalid("items", e.what());
  }
}

ItemSet LoadItemSet(const std::string& path) {
  try {
    return ItemSetFromJson(LoadJson(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    Fail(e.code(), path + ": " + e.what());
  }
}

RatingsMatrix ParseRatingsCsv(std::string_view text, const ItemSet& items) {
  const auto lines = Lines(text);
  if (lines.empty() || lines[0].second != "user_id,item_id,rating") {
    Invalid("ratings line 1", "header must be 'user_id,item_id,rating'");
  }
  std::vector<std::string> user_ids;
  std::map<std::string, std::size_t, std::less<>> user_index;
  std::vector<std::string> item_ids;
  for (const Lottery& l : items.items()) item_ids.push_back(l.id());
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<Rating> entries;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string where = LineRef("ratings", lines[n].first);
    const auto fields = Split(lines[n].second, ',');
    if (fields.size() != 3) Invalid(where, "expected 3 fields");
    const std::string user(Trim(fields[0]));
    const std::string item(Trim(fields[1]));
    if (user.empty()) Invalid(where, "empty user_id");
    std::size_t item_idx = 0;
    try {
      item_idx = items.IndexOf(item);
    } catch (const Error&) {
      Invalid(where, "unknown item_id '" + item + "'");
    }
    const double rating = ParseDouble(fields[2], where);
    if (rating < 0.0 || rating > 10.0) {
      Invalid(where, "rating " + FormatNumber(rating) + " outside [0, 10]");
    }
    auto [it, inserted] = user_index.emplace(user, user_ids.size());
    if (inserted) user_ids.push_back(user);
    if (!seen.emplace(it->second, item_idx).second) {
      Invalid(where, "duplicate rating for user '" + user + "' and item '" + item + "'");
    }
    entries.push_back({it->second, item_idx, rating});
  }
  if (entries.empty()) Invalid("ratings", "no ratings");
  return RatingsMatrix(std::move(user_ids), std::move(item_ids), std::move(entries));
}

RatingsMatrix LoadRatings(const std::string& path, const ItemSet& items) {
  try {
    return ParseRatingsCsv(ReadTextFile(path), items);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    Fail(e.code(), path + ": " + e.what());
  }
}

std::string RatingsCsv(const RatingsMatrix& r) {
  std::string out = "user_id,item_id,rating\n";
  for (const Rating& e : r.entries()) {
    out += r.user_ids()[e.user] + "," + r.item_ids()[e.item] + "," + FormatNumber(e.value) +
           "\n";
  }
  return out;
}

ReturnsPanel ParseReturnsCsv(std::string_view text) {
  const auto lines = Lines(text);
  if (lines.empty()) Invalid("returns", "empty file");
  const auto header = Split(lines[0].second, ',');
  if (header.size() < 2 || Trim(header[0]) != "date") {
    Invalid("returns line 1", "header must be 'date,<asset>,...'");
  }
  std::vector<std::string> assets;
  std::set<std::string> names{"cash"};
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::string name(Trim(header[c]));
    if (name.empty()) Invalid("returns line 1", "empty asset name");
    if (!names.insert(name).second) Invalid("returns line 1", "duplicate asset '" + name + "'");
    assets.push_back(std::move(name));
  }
  std::vector<std::string> dates;
  Eigen::MatrixXd net(static_cast<Eigen::Index>(lines.size() - 1),
                      static_cast<Eigen::Index>(assets.size()));
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string where = LineRef("returns", lines[n].first);
    const auto fields = Split(lines[n].second, ',');
    if (fields.size() != header.size()) {
      Invalid(where, "expected " + std::to_string(header.size()) + " fields");
    }
    std::string date(Trim(fields[0]));
    if (date.empty()) Invalid(where, "empty date");
    if (!dates.empty() && !(dates.back() < date)) {
      Invalid(where, "date '" + date + "' does not follow '" + dates.back() + "'");
    }
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const double r = ParseDouble(fields[c], where);
      if (!(r > -1.0)) Invalid(where, "net return " + FormatNumber(r) + " must exceed -1");
      net(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(c - 1)) = r;
    }
    dates.push_back(std::move(date));
  }
  if (dates.empty()) Invalid("returns", "no data rows");
  return ReturnsPanel::FromNetReturns(std::move(assets), std::move(dates), net);
}

ReturnsPanel LoadReturns(const std::string& path) {
  try {
    return ParseReturnsCsv(ReadTextFile(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    Fail(e.code(), path + ": " + e.what());
  }
}

std::string ReturnsCsv(const ReturnsPanel& panel) {
  std::string out = "date";
  for (std::size_t c = 1; c < panel.columns(); ++c) out += "," + panel.assets[c];
  out += "\n";
  for (std::size_t r = 0; r < panel.rows(); ++r) {
    out += panel.dates[r];
    for (std::size_t c = 1; c < panel.columns(); ++c) {
      out += "," + FormatNumber(panel.factors(static_cast<Eigen::Index>(r),
                                              static_cast<Eigen::Index>(c)) -
                                1.0);
    }
    out += "\n";
  }
  return out;
}

Json LfmModelToJson(const LfmModel& m, const RatingsMatrix& r) {
  auto rows = [](const Eigen::MatrixXd& f, const std::vector<std::string>& ids) {
    Json out = Json::object();
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index d = 0; d < f.cols(); ++d) row.push_back(f(i, d));
      out[ids[static_cast<std::size_t>(i)]] = std::move(row);
    }
    return out;
  };
  auto bias = [](const Eigen::VectorXd& b, const std::vector<std::string>& ids) {
    Json out = Json::object();
    for (Eigen::Index i = 0; i < b.size(); ++i) out[ids[static_cast<std::size_t>(i)]] = b(i);
    return out;
  };
  return Json{{"dim", m.dim()},
              {"mu", m.mu},
              {"item_bias", bias(m.item_bias, r.item_ids())},
              {"user_bias", bias(m.user_bias, r.user_ids())},
              {"item_factors", rows(m.item_factors, r.item_ids())},
              {"user_factors", rows(m.user_factors, r.user_ids())},
              {"objective", m.objective},
              {"iterations", m.iterations},
              {"trace", m.trace}};
}

Json QuestionnaireToJson(const Questionnaire& q, const ItemSet& items) {
  Json pairs = Json::array();
  for (const ItemPair& p : q.pairs) {
    pairs.push_back(Json{{"first", items[p.first].id()}, {"second", items[p.second].id()}});
  }
  Json j;
  j["id"] = q.id;
  j["pairs"] = std::move(pairs);
  j["provenance"] = ProvenanceName(q.provenance);
  j["objective"] = q.objective ? Json(*q.objective) : Json(nullptr);
  return j;
}

Questionnaire QuestionnaireFromJson(const Json& j, const ItemSet& items) {
  const std::string root = "questionnaire";
  Questionnaire q;
  if (j.is_object() && j.contains("id")) q.id = StringField(j, "id", root);
  const Json& pairs = ArrayField(j, "pairs", root);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::string path = Indexed("pairs", k);
    ItemPair p;
    for (const char* side : {"first", "second"}) {
      const std::string id = StringField(pairs[k], side, path);
      try {
        (side[0] == 'f' ? p.first : p.second) = items.IndexOf(id);
      } catch (const Error&) {
        Invalid(path + "." + side, "unknown item '" + id + "'");
      }
    }
    q.pairs.push_back(p);
  }
  if (j.contains("provenance")) {
    try {
      q.provenance = ParseProvenance(StringField(j, "provenance", root));
    } catch (const Error& e) {
      Invalid("provenance", e.what());
    }
  }
  if (j.contains("objective") && !j["objective"].is_null()) {
    q.objective = NumberField(j, "objective", root);
  }
  q.Validate(items.size());
  return q;
}

Json AnswerSheetToJson(const AnswerSheet& sheet) {
  Json answers = Json::array();
  for (std::size_t k = 0; k < sheet.answers.size(); ++k) {
    answers.push_back(Json{{"pair_index", k}, {"choice", ChoiceName(sheet.answers[k])}});
  }
  return Json{{"questionnaire_id", sheet.questionnaire_id}, {"answers", std::move(answers)}};
}

AnswerSheet AnswerSheetFromJson(const Json& j) {
  const std::string root = "answer sheet";
  AnswerSheet sheet;
  if (j.is_object() && j.contains("questionnaire_id")) {
    sheet.questionnaire_id = StringField(j, "questionnaire_id", root);
  }
  const Json& arr = ArrayField(j, "answers", root);
  std::vector<std::optional<Choice>> choices(arr.size());
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string path = Indexed("answers", k);
    const Json& idx = Field(arr[k], "pair_index", path);
    if (!idx.is_number_integer() || idx.get<long long>() < 0 ||
        idx.get<long long>() >= static_cast<long long>(arr.size())) {
      Invalid(path + ".pair_index", "must be an integer in [0, " +
                                        std::to_string(arr.size()) + ")");
    }
    const auto i = static_cast<std::size_t>(idx.get<long long>());
    if (choices[i]) Invalid(path + ".pair_index", "duplicate index " + std::to_string(i));
    try {
      choices[i] = ParseChoice(StringField(arr[k], "choice", path));
    } catch (const Error& e) {
      Invalid(path + ".choice", e.what());
    }
  }
  for (const auto& c : choices) sheet.answers.push_back(*c);
  return sheet;
}

Json UtilityToJson(const PwlUtility& u, std::optional<Estimator> estimator,
                   std::optional<double> objective) {
  Json j;
  j["estimator"] = estimator ? Json(EstimatorName(*estimator)) : Json(nullptr);
  j["objective"] = objective ? Json(*objective) : Json(nullptr);
  j["bbar"] = u.bbar();
  j["grid"] = std::vector<double>(u.grid().points().begin(), u.grid().points().end());
  j["alpha"] = std::vector<double>(u.alpha().begin(), u.alpha().end());
  j["beta"] = std::vector<double>(u.beta().begin(), u.beta().end());
  return j;
}

PwlUtility UtilityFromJson(const Json& j) {
  const std::string root = "utility";
  std::vector<double> grid = NumberArray(j, "grid", root);
  std::vector<double> alpha = NumberArray(j, "alpha", root);
  if (grid.size() != alpha.size()) Invalid("alpha", "length must match grid");
  try {
    if (j.contains("beta")) {
      return PwlUtility::FromAlphaBeta(BreakpointGrid(std::move(grid)), std::move(alpha),
                                       NumberArray(j, "beta", root));
    }
    return PwlUtility::FromAlpha(BreakpointGrid(std::move(grid)), std::move(alpha));
  } catch (const Error& e) {
    Invalid(root, e.what());
  }
}

Json ElicitationResultToJson(const ElicitationResult& r) {
  Json j = UtilityToJson(r.utility, r.estimator, r.objective);
  j["iterations"] = r.iterations;
  return j;
}

ElicitationResult ElicitationResultFromJson(const Json& j) {
  ElicitationResult r;
  r.utility = UtilityFromJson(j);
  try {
    r.estimator = ParseEstimator(StringField(j, "estimator", "utility"));
  } catch (const Error& e) {
    Invalid("utility.estimator", e.what());
  }
  r.objective = NumberField(j, "objective", "utility");
  if (j.contains("iterations") && j["iterations"].is_number_integer()) {
    r.iterations = j["iterations"].get<int>();
  }
  return r;
}

Json RiskAnalyticsToJson(const RiskAnalytics& r) {
  auto kinks = [](const std::vector<KinkMeasure>& v) {
    Json a = Json::array();
    for (const KinkMeasure& k : v) {
      a.push_back(Json{{"breakpoint", k.breakpoint},
                       {"value", k.value ? Json(*k.value) : Json(nullptr)}});
    }
    return a;
  };
  return Json{{"gini", r.gini}, {"ara", kinks(r.ara)}, {"rra", kinks(r.rra)}};
}

Json PortfolioToJson(const Portfolio& p, const ReturnsPanel& panel) {
  Json alloc = Json::array();
  for (std::size_t c = 0; c < p.x.size(); ++c) {
    alloc.push_back(Json{{"asset", panel.assets[c]}, {"amount", p.x[c]}});
  }
  return Json{{"allocation", std::move(alloc)}, {"objective", p.objective}};
}

std::string WealthCsv(const std::vector<WealthCurve>& curves) {
  std::string out = "date,estimator,wealth\n";
  for (const WealthCurve& c : curves) {
    for (std::size_t t = 0; t < c.dates.size(); ++t) {
      out += c.dates[t] + "," + c.estimator + "," + FormatNumber(c.wealth[t]) + "\n";
    }
  }
  return out;
}

std::string ExperimentRecordsCsv(const ExperimentReport& report) {
  std::string out = "method,estimator,K,repetition,distance\n";
  for (const DistanceRecord& r : report.records) {
    out += r.method + "," + EstimatorName(r.estimator) + "," + std::to_string(r.k) + "," +
           std::to_string(r.repetition) + "," + FormatNumber(r.distance) + "\n";
  }
  return out;
}

std::string ExperimentSummaryCsv(const ExperimentReport& report) {
  std::string out = "method,estimator,K,mean,stddev\n";
  for (const SummaryCell& c : report.Summary()) {
    out += c.method + "," + EstimatorName(c.estimator) + "," + std::to_string(c.k) + "," +
           FormatNumber(c.mean) + "," + FormatNumber(c.stddev) + "\n";
  }
  return out;
}

}  // namespace advisor
