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

#include <atomic>
#include <filesystem>
#include <thread>

#include <gtest/gtest.h>

#include "advisor/error.hpp"

namespace advisor {
namespace {

class SessionStoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = ::testing::TempDir() + "/advisor_sessions_" +
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    std::filesystem::remove_all(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  static SessionRecord Fresh() {
    SessionRecord r;
    r.item_set = "I10";
    r.method = "random";
    r.seed = 42;
    r.questionnaire.id = "q";
    r.questionnaire.pairs = {{0, 1}, {2, 3}};
    r.questionnaire.provenance = Provenance::kRandom;
    r.answers.assign(2, std::nullopt);
    return r;
  }

  std::string dir_;
};

TEST_F(SessionStoreTest, CreateGetRoundTrip) {
  SessionStore store(dir_);
  const SessionRecord created = store.Create(Fresh());
  EXPECT_FALSE(created.id.empty());
  EXPECT_EQ(created.version, 1u);
  const SessionRecord got = store.Get(created.id);
  EXPECT_EQ(CanonicalJson(SessionToJson(got)), CanonicalJson(SessionToJson(created)));
  EXPECT_EQ(ReadTextFile(dir_ + "/" + created.id + ".json"),
            CanonicalJson(SessionToJson(got)));
  EXPECT_EQ(store.List(), std::vector<std::string>{created.id});
}

TEST_F(SessionStoreTest, StaleVersionConflicts) {
  SessionStore store(dir_);
  SessionRecord r = store.Create(Fresh());
  SessionRecord a = r;
  a.answers[0] = Choice::kFirst;
  const SessionRecord updated = store.Update(a);
  EXPECT_EQ(updated.version, 2u);
  SessionRecord b = r;
  b.answers[1] = Choice::kSecond;
  try {
    store.Update(b);
    FAIL() << "expected conflict";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
  }
  EXPECT_EQ(store.Get(r.id).answers[0], Choice::kFirst);
}

TEST_F(SessionStoreTest, StatusNeverRegresses) {
  SessionStore store(dir_);
  SessionRecord r = Fresh();
  r.answers = {Choice::kFirst, Choice::kNone};
  r.status = SessionStatus::kAnswered;
  r = store.Create(r);
  r.status = SessionStatus::kQuestioning;
  try {
    store.Update(r);
    FAIL() << "expected validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST_F(SessionStoreTest, InvariantsChecked) {
  SessionStore store(dir_);
  SessionRecord r = Fresh();
  r.status = SessionStatus::kAnswered;
  EXPECT_THROW(store.Create(r), Error);
  r = Fresh();
  r.answers.resize(3);
  EXPECT_THROW(store.Create(r), Error);
  r = Fresh();
  r.utilities.emplace_back();
  EXPECT_THROW(store.Create(r), Error);
}

TEST_F(SessionStoreTest, UnknownIdNotFound) {
  SessionStore store(dir_);
  for (const char* id : {"missing", "../etc/passwd", ""}) {
    try {
      store.Get(id);
      FAIL() << "expected not found";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNotFound);
    }
  }
  SessionRecord r = Fresh();
  r.id = "nope";
  r.version = 1;
  EXPECT_THROW(store.Update(r), Error);
}

TEST_F(SessionStoreTest, DuplicateIdConflicts) {
  SessionStore store(dir_);
  SessionRecord r = Fresh();
  r.id = "fixed";
  store.Create(r);
  try {
    store.Create(r);
    FAIL() << "expected conflict";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
  }
}

TEST_F(SessionStoreTest, ConcurrentUpdatesSerialize) {
  SessionStore store(dir_);
  const SessionRecord base = store.Create(Fresh());
  std::atomic<int> ok{0};
  std::atomic<int> conflicts{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      try {
        store.Update(base);
        ++ok;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kConflict) ++conflicts;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 1);
  EXPECT_EQ(conflicts.load(), 3);
  EXPECT_EQ(store.Get(base.id).version, 2u);
}

TEST_F(SessionStoreTest, FullRecordSurvivesReload) {
  SessionStore store(dir_);
  SessionRecord r = Fresh();
  r.answers = {Choice::kFirst, Choice::kSecond};
  r.status = SessionStatus::kRecommended;
  ElicitationResult u;
  u.estimator = Estimator::kNeutral;
  u.utility = PwlUtility::FromAlpha(BreakpointGrid({0.0, 1.0, 3.0}), {0.0, 0.6, 1.0});
  u.objective = 0.7;
  r.utilities = {u};
  PortfolioRecord p;
  p.budget = 100.0;
  p.assets = {"cash", "A"};
  p.caps = {100.0, 40.0};
  p.allocation = {60.0, 40.0};
  p.objective = 0.1 + 0.2;
  p.preview_dates = {"d1"};
  p.wealth_preview = {100.0};
  r.portfolio = p;
  r = store.Create(r);
  SessionStore reopened(dir_);
  const SessionRecord back = reopened.Get(r.id);
  EXPECT_EQ(back.utilities[0].utility, u.utility);
  EXPECT_EQ(back.portfolio->objective, p.objective);
  EXPECT_EQ(back.status, SessionStatus::kRecommended);
  ASSERT_NE(back.Utility(Estimator::kNeutral), nullptr);
  EXPECT_EQ(back.Utility(Estimator::kPessimistic), nullptr);
}

}  // namespace
}  // namespace advisor
