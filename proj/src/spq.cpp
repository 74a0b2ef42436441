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
#include <limits>
#include <set>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "advisor/error.hpp"
#include "advisor/random.hpp"

namespace advisor {

RatingsMatrix::RatingsMatrix(std::vector<std::string> user_ids,
                             std::vector<std::string> item_ids,
                             std::vector<Rating> entries)
    : user_ids_(std::move(user_ids)), item_ids_(std::move(item_ids)),
      entries_(std::move(entries)) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const Rating& r : entries_) {
    Require(r.user < user_ids_.size() && r.item < item_ids_.size(),
            "rating index out of range");
    Require(std::isfinite(r.value), "rating must be finite");
    Require(r.value >= 0.0 && r.value <= 10.0,
            "rating " + std::to_string(r.value) + " outside [0, 10]");
    Require(seen.insert({r.user, r.item}).second,
            "duplicate rating for user '" + user_ids_[r.user] + "' item '" +
                item_ids_[r.item] + "'");
  }
}

double RatingsMatrix::Mean() const {
  Require(!entries_.empty(), "ratings matrix is empty");
  double s = 0.0;
  for (const Rating& r : entries_) s += r.value;
  return s / static_cast<double>(entries_.size());
}

double LfmModel::Predict(std::size_t user, std::size_t item) const {
  return mu + item_bias[item] + user_bias[user] +
         item_factors.row(item).dot(user_factors.row(user));
}

double LfmObjective(const RatingsMatrix& r, const LfmModel& model,
                    const LfmConfig& cfg) {
  double obj = 0.0;
  for (const Rating& e : r.entries()) {
    const double res = e.value - model.Predict(e.user, e.item);
    obj += res * res;
  }
  obj += cfg.lambda_user *
         (model.user_factors.squaredNorm() + model.user_bias.squaredNorm());
  obj += cfg.lambda_item *
         (model.item_factors.squaredNorm() + model.item_bias.squaredNorm());
  return obj;
}

namespace {

// Ridge regression of target on [features, 1] for one row of the model.
void SolveRow(const std::vector<std::pair<std::size_t, double>>& obs,
              const Eigen::MatrixXd& features, double lambda,
              Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> factors,
              double& bias) {
  const int v = static_cast<int>(features.cols());
  if (obs.empty()) {
    factors.setZero();
    bias = 0.0;
    return;
  }
  Eigen::MatrixXd ata = Eigen::MatrixXd::Identity(v + 1, v + 1) * lambda;
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(v + 1);
  Eigen::VectorXd x(v + 1);
  for (const auto& [k, target] : obs) {
    x.head(v) = features.row(k).transpose();
    x[v] = 1.0;
    ata.noalias() += x * x.transpose();
    atb.noalias() += target * x;
  }
  const Eigen::VectorXd sol = ata.ldlt().solve(atb);
  factors = sol.head(v).transpose();
  bias = sol[v];
}

}  // namespace

LfmModel FitLfm(const RatingsMatrix& r, const LfmConfig& cfg) {
  Require(cfg.dim >= 1, "latent dimension must be at least 1");
  Require(cfg.tol > 0.0, "tolerance must be positive");
  Require(cfg.lambda_user >= 0.0 && cfg.lambda_item >= 0.0,
          "regularization weights must be non-negative");
  Require(cfg.max_iters >= 1, "max_iters must be at least 1");
  Require(!r.entries().empty(), "ratings matrix is empty");
  const std::size_t m = r.users();
  const std::size_t n = r.items();
  const int v = cfg.dim;

  LfmModel model;
  model.mu = r.Mean();
  model.item_bias = Eigen::VectorXd::Zero(n);
  model.user_bias = Eigen::VectorXd::Zero(m);
  model.item_factors = Eigen::MatrixXd::Zero(n, v);
  model.user_factors = Eigen::MatrixXd::Zero(m, v);

  const LfmModel zero = model;
  const double zero_objective = LfmObjective(r, zero, cfg);

  Rng rng(cfg.seed);
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < v; ++d) model.item_factors(i, d) = 0.1 * rng.Normal();
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> by_user(m), by_item(n);
  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    for (auto& o : by_user) o.clear();
    for (const Rating& e : r.entries()) {
      by_user[e.user].push_back(
          {e.item, e.value - model.mu - model.item_bias[e.item]});
    }
    for (std::size_t u = 0; u < m; ++u) {
      SolveRow(by_user[u], model.item_factors, cfg.lambda_user,
               model.user_factors.row(u), model.user_bias[u]);
    }
    for (auto& o : by_item) o.clear();
    for (const Rating& e : r.entries()) {
      by_item[e.item].push_back(
          {e.user, e.value - model.mu - model.user_bias[e.user]});
    }
    for (std::size_t i = 0; i < n; ++i) {
      SolveRow(by_item[i], model.user_factors, cfg.lambda_item,
               model.item_factors.row(i), model.item_bias[i]);
    }
    const double obj = LfmObjective(r, model, cfg);
    model.trace.push_back(obj);
    model.iterations = iter;
    if (prev - obj < cfg.tol * std::max(1.0, std::abs(obj))) break;
    prev = obj;
  }
  model.objective = model.trace.back();
  if (!std::isfinite(model.objective) || model.objective > zero_objective) {
    LfmModel fallback = zero;
    fallback.objective = zero_objective;
    fallback.iterations = model.iterations;
    fallback.trace = model.trace;
    return fallback;
  }
  return model;
}

const char* ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kSpq: return "spq";
    case Provenance::kRandom: return "random";
    case Provenance::kManual: return "manual";
  }
  return "manual";
}

Provenance ParseProvenance(const std::string& s) {
  if (s == "spq") return Provenance::kSpq;
  if (s == "random") return Provenance::kRandom;
  if (s == "manual") return Provenance::kManual;
  Fail(ErrorCode::kInvalidArgument, "unknown provenance '" + s + "'");
}

void Questionnaire::Validate(std::size_t n) const {
  Require(!pairs.empty(), "questionnaire needs at least one pair");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const ItemPair& p : pairs) {
    Require(p.first < n && p.second < n, "pair references an unknown item");
    Require(p.first != p.second, "pair compares an item with itself");
    Require(seen.insert(std::minmax(p.first, p.second)).second,
            "questionnaire repeats a pair");
  }
}

std::size_t PairCount(std::size_t n) { return n * (n - 1) / 2; }

double SpqObjective(std::span<const ItemPair> pairs,
                    const Eigen::MatrixXd& item_factors, double ridge) {
  Require(!pairs.empty(), "pair set is empty");
  const int v = static_cast<int>(item_factors.cols());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(v, v) * ridge;
  for (const ItemPair& p : pairs) {
    const Eigen::VectorXd d =
        (item_factors.row(p.first) - item_factors.row(p.second)).transpose();
    gram.noalias() += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || ev.minCoeff() <= 1e-12 * top) {
    Fail(ErrorCode::kSingular, "Gram matrix of the selected pairs is singular");
  }
  return ev.cwiseInverse().sum();
}

Questionnaire SelectPairsSpq(const LfmModel& model, const ItemSet& items,
                             std::size_t k, const SpqOptions& opts,
                             std::vector<double>* trajectory) {
  const std::size_t n = items.size();
  Require(static_cast<std::size_t>(model.item_factors.rows()) == n,
          "model and item set disagree on the item count");
  Require(k >= 1, "K must be at least 1");
  Require(k <= PairCount(n), "K exceeds the number of distinct pairs");
  const std::size_t v = static_cast<std::size_t>(model.dim());

  std::vector<ItemPair> chosen;
  std::set<std::pair<std::size_t, std::size_t>> used;
  double last = std::numeric_limits<double>::infinity();
  bool last_exact = false;
  if (trajectory) trajectory->clear();

  for (std::size_t step = 0; step < k; ++step) {
    const bool bootstrap = chosen.size() + 1 < v;
    // Exact (unridged) objectives rank ahead of ridged ones.
    std::pair<int, double> best{2, 0.0};
    ItemPair best_pair{};
    chosen.push_back({});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (used.count({i, j})) continue;
        chosen.back() = {i, j};
        std::pair<int, double> key;
        if (bootstrap) {
          key = {1, SpqObjective(chosen, model.item_factors, opts.ridge)};
        } else {
          try {
            key = {0, SpqObjective(chosen, model.item_factors, 0.0)};
          } catch (const Error&) {
            key = {1, SpqObjective(chosen, model.item_factors, opts.ridge)};
          }
        }
        if (key < best) {
          best = key;
          best_pair = {i, j};
        }
      }
    }
    chosen.back() = best_pair;
    used.insert({best_pair.first, best_pair.second});
    const bool exact = best.first == 0;
    if (exact && last_exact && best.second > last * (1.0 + 1e-9)) {
      Fail(ErrorCode::kInternal, "greedy objective increased");
    }
    last = best.second;
    last_exact = exact;
    if (trajectory) trajectory->push_back(last);
  }

  Questionnaire q;
  q.id = items.name() + "-spq-k" + std::to_string(k);
  q.pairs = std::move(chosen);
  q.provenance = Provenance::kSpq;
  q.objective = last;
  return q;
}

Questionnaire SelectPairsRandom(const ItemSet& items, std::size_t k,
                                std::uint64_t seed) {
  const std::size_t n = items.size();
  Require(k >= 1, "K must be at least 1");
  Require(k <= PairCount(n), "K exceeds the number of distinct pairs");
  std::vector<ItemPair> all;
  all.reserve(PairCount(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) all.push_back({i, j});
  }
  Rng rng(seed);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t pick = t + rng.Below(all.size() - t);
    std::swap(all[t], all[pick]);
  }
  all.resize(k);
  Questionnaire q;
  q.id = items.name() + "-random-k" + std::to_string(k) + "-s" + std::to_string(seed);
  q.pairs = std::move(all);
  q.provenance = Provenance::kRandom;
  return q;
}

}  // namespace advisor
