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

#include "advisor/spq.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "advisor/error.hpp"
#include "advisor/random.hpp"

namespace advisor {
namespace {

ItemSet SureItems(std::size_t n) {
  std::vector<Lottery> items;
  for (std::size_t i = 0; i < n; ++i) {
    items.push_back(Lottery::Sure("I" + std::to_string(i + 1), 100.0 * (i + 1)));
  }
  return ItemSet("sure", std::move(items));
}

std::vector<std::string> Ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

LfmModel FactorModel(const Eigen::MatrixXd& factors) {
  LfmModel m;
  m.item_factors = factors;
  m.item_bias = Eigen::VectorXd::Zero(factors.rows());
  return m;
}

// Dense inverse by Gauss-Jordan elimination with partial pivoting.
Eigen::MatrixXd GaussJordanInverse(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    }
    a.row(c).swap(a.row(piv));
    inv.row(c).swap(inv.row(piv));
    const double d = a(c, c);
    a.row(c) /= d;
    inv.row(c) /= d;
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a(r, c);
      a.row(r) -= f * a.row(c);
      inv.row(r) -= f * inv.row(c);
    }
  }
  return inv;
}

TEST(LfmTest, ConstantRatingsShrinkToZero) {
  std::vector<Rating> entries;
  for (std::size_t u = 0; u < 5; ++u) {
    for (std::size_t i = 0; i < 4; ++i) entries.push_back({u, i, 6.5});
  }
  const RatingsMatrix r(Ids("u", 5), Ids("i", 4), entries);
  LfmConfig cfg;
  cfg.lambda_user = cfg.lambda_item = 1.0;
  const LfmModel m = FitLfm(r, cfg);
  EXPECT_DOUBLE_EQ(m.mu, 6.5);
  EXPECT_LE(m.item_bias.norm(), 1e-6);
  EXPECT_LE(m.user_bias.norm(), 1e-6);
  EXPECT_LE(m.item_factors.norm(), 1e-6);
  EXPECT_LE(m.user_factors.norm(), 1e-6);
}

TEST(LfmTest, RecoversRankTwoRatings) {
  Rng rng(5);
  const std::size_t users = 30;
  const std::size_t items = 8;
  Eigen::MatrixXd p(items, 2), q(users, 2);
  for (int i = 0; i < p.size(); ++i) p.data()[i] = rng.Uniform(-1.0, 1.0);
  for (int i = 0; i < q.size(); ++i) q.data()[i] = rng.Uniform(-1.0, 1.0);
  std::vector<Rating> entries;
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t i = 0; i < items; ++i) {
      entries.push_back({u, i, 5.0 + 2.0 * p.row(i).dot(q.row(u))});
    }
  }
  const RatingsMatrix r(Ids("u", users), Ids("i", items), entries);
  LfmConfig cfg;
  cfg.dim = 2;
  cfg.lambda_user = cfg.lambda_item = 1e-8;
  cfg.max_iters = 2000;
  cfg.tol = 1e-14;
  const LfmModel m = FitLfm(r, cfg);
  double sse = 0.0;
  for (const Rating& e : r.entries()) {
    const double res = e.value - m.Predict(e.user, e.item);
    sse += res * res;
  }
  EXPECT_LT(std::sqrt(sse / static_cast<double>(entries.size())), 1e-3);
}

TEST(LfmTest, SingleRating) {
  const RatingsMatrix r({"u"}, {"i"}, {{0, 0, 7.0}});
  const LfmModel m = FitLfm(r, LfmConfig{});
  EXPECT_DOUBLE_EQ(m.mu, 7.0);
  EXPECT_NEAR(m.objective, 0.0, 1e-12);
  EXPECT_NEAR(m.Predict(0, 0), 7.0, 1e-9);
}

TEST(LfmTest, ObjectiveDecreasesAcrossPasses) {
  Rng rng(9);
  std::vector<Rating> entries;
  for (std::size_t u = 0; u < 40; ++u) {
    for (std::size_t i = 0; i < 10; ++i) {
      if (rng.Uniform() < 0.7) entries.push_back({u, i, rng.Uniform(0.0, 10.0)});
    }
  }
  const RatingsMatrix r(Ids("u", 40), Ids("i", 10), entries);
  const LfmModel m = FitLfm(r, LfmConfig{});
  ASSERT_FALSE(m.trace.empty());
  for (std::size_t t = 1; t < m.trace.size(); ++t) {
    EXPECT_LE(m.trace[t], m.trace[t - 1] * (1.0 + 1e-12));
  }
  LfmModel zero = m;
  zero.item_bias.setZero();
  zero.user_bias.setZero();
  zero.item_factors.setZero();
  zero.user_factors.setZero();
  EXPECT_LE(m.objective, LfmObjective(r, zero, LfmConfig{}));
}

TEST(LfmTest, RejectsBadInput) {
  EXPECT_THROW(RatingsMatrix({"u"}, {"i"}, {{0, 0, 11.0}}), Error);
  EXPECT_THROW(RatingsMatrix({"u"}, {"i"}, {{0, 0, NAN}}), Error);
  EXPECT_THROW(RatingsMatrix({"u"}, {"i"}, {{0, 0, 1.0}, {0, 0, 2.0}}), Error);
  EXPECT_THROW(FitLfm(RatingsMatrix({"u"}, {"i"}, {}), LfmConfig{}), Error);
}

TEST(SpqObjectiveTest, ScalarCase) {
  Eigen::MatrixXd f(2, 1);
  f << 3.0, 1.0;
  const std::vector<ItemPair> pairs{{0, 1}};
  EXPECT_DOUBLE_EQ(SpqObjective(pairs, f, 0.0), 0.25);
}

TEST(SpqObjectiveTest, IdentityGram) {
  Eigen::MatrixXd f(3, 2);
  f << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  const std::vector<ItemPair> pairs{{1, 0}, {2, 0}};
  EXPECT_NEAR(SpqObjective(pairs, f, 0.0), 2.0, 1e-14);
}

TEST(SpqObjectiveTest, MatchesGaussJordanOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd f(5, 2);
    for (int i = 0; i < f.size(); ++i) f.data()[i] = rng.Uniform(-1.0, 1.0);
    const std::vector<ItemPair> pairs{{0, 1}, {2, 3}, {1, 4}};
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(2, 2);
    for (const ItemPair& p : pairs) {
      const Eigen::VectorXd d = (f.row(p.first) - f.row(p.second)).transpose();
      gram += d * d.transpose();
    }
    EXPECT_NEAR(SpqObjective(pairs, f, 0.0), GaussJordanInverse(gram).trace(), 1e-10);
  }
}

TEST(SpqObjectiveTest, SingularWithoutRidge) {
  Eigen::MatrixXd f(3, 2);
  f << 0.0, 0.0, 1.0, 1.0, 2.0, 2.0;
  const std::vector<ItemPair> pairs{{0, 1}, {0, 2}};
  try {
    SpqObjective(pairs, f, 0.0);
    FAIL() << "expected a singularity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingular);
  }
  EXPECT_GT(SpqObjective(pairs, f, 1e-6), 1e5);
}

TEST(SpqObjectiveTest, InvariantUnderReorderAndSwap) {
  Rng rng(4);
  Eigen::MatrixXd f(6, 3);
  for (int i = 0; i < f.size(); ++i) f.data()[i] = rng.Normal();
  std::vector<ItemPair> pairs{{0, 1}, {2, 5}, {3, 4}, {1, 5}};
  const double base = SpqObjective(pairs, f, 0.0);
  std::reverse(pairs.begin(), pairs.end());
  EXPECT_NEAR(SpqObjective(pairs, f, 0.0), base, 1e-12 * base);
  for (ItemPair& p : pairs) std::swap(p.first, p.second);
  EXPECT_NEAR(SpqObjective(pairs, f, 0.0), base, 1e-12 * base);
}

TEST(SelectSpqTest, SingleStepPicksLargestDifference) {
  Eigen::MatrixXd f(4, 1);
  f << 0.3, -1.2, 0.9, 0.1;
  const Questionnaire q = SelectPairsSpq(FactorModel(f), SureItems(4), 1);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.pairs[0], (ItemPair{1, 2}));
  EXPECT_NEAR(*q.objective, 1.0 / (2.1 * 2.1), 1e-12);
  EXPECT_EQ(q.provenance, Provenance::kSpq);
}

TEST(SelectSpqTest, MatchesExhaustiveSearchOnFourItems) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd f(4, 1);
    for (int i = 0; i < 4; ++i) f(i, 0) = rng.Uniform(-1.0, 1.0);
    const Questionnaire q = SelectPairsSpq(FactorModel(f), SureItems(4), 2);
    std::vector<ItemPair> all;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) all.push_back({i, j});
    }
    double best = INFINITY;
    int subsets = 0;
    for (std::size_t a = 0; a < all.size(); ++a) {
      for (std::size_t b = a + 1; b < all.size(); ++b) {
        const std::vector<ItemPair> s{all[a], all[b]};
        best = std::min(best, SpqObjective(s, f, 0.0));
        ++subsets;
      }
    }
    EXPECT_EQ(subsets, 15);
    EXPECT_NEAR(*q.objective, best, 1e-12);
  }
}

TEST(SelectSpqTest, TrajectoryIsMonotoneOnceInvertible) {
  Rng rng(17);
  Eigen::MatrixXd f(10, 3);
  for (int i = 0; i < f.size(); ++i) f.data()[i] = rng.Normal();
  std::vector<double> traj;
  const Questionnaire q = SelectPairsSpq(FactorModel(f), SureItems(10), 12, {}, &traj);
  ASSERT_EQ(traj.size(), 12u);
  q.Validate(10);
  for (std::size_t t = 3; t < traj.size(); ++t) EXPECT_LE(traj[t], traj[t - 1] * (1.0 + 1e-12));
  EXPECT_NEAR(*q.objective, SpqObjective(q.pairs, f, 0.0), 1e-12);
}

TEST(SelectSpqTest, RejectsTooManyPairs) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Ones(3, 1);
  EXPECT_THROW(SelectPairsSpq(FactorModel(f), SureItems(3), 4), Error);
}

TEST(SelectRandomTest, OnlyPairOfTwoItems) {
  const Questionnaire q = SelectPairsRandom(SureItems(2), 1, 3);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.pairs[0], (ItemPair{0, 1}));
  EXPECT_EQ(q.provenance, Provenance::kRandom);
}

TEST(SelectRandomTest, DeterministicUnderSeed) {
  const ItemSet items = SureItems(10);
  const Questionnaire a = SelectPairsRandom(items, 8, 99);
  const Questionnaire b = SelectPairsRandom(items, 8, 99);
  EXPECT_EQ(a.pairs, b.pairs);
  a.Validate(10);
}

TEST(SelectRandomTest, FullCountCoversEveryPair) {
  const Questionnaire q = SelectPairsRandom(SureItems(6), PairCount(6), 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const ItemPair& p : q.pairs) seen.insert(std::minmax(p.first, p.second));
  EXPECT_EQ(seen.size(), 15u);
  EXPECT_THROW(SelectPairsRandom(SureItems(6), 16, 1), Error);
}

TEST(QuestionnaireTest, ValidateRejectsDefects) {
  Questionnaire q;
  EXPECT_THROW(q.Validate(3), Error);
  q.pairs = {{0, 0}};
  EXPECT_THROW(q.Validate(3), Error);
  q.pairs = {{0, 1}, {1, 0}};
  EXPECT_THROW(q.Validate(3), Error);
  q.pairs = {{0, 3}};
  EXPECT_THROW(q.Validate(3), Error);
  EXPECT_EQ(ParseProvenance("spq"), Provenance::kSpq);
  EXPECT_THROW(ParseProvenance("other"), Error);
}

}  // namespace
}  // namespace advisor
