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

// Latent factor model fit and static preference questionnaire selection.

#ifndef ADVISOR_SPQ_HPP_
#define ADVISOR_SPQ_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "advisor/lottery.hpp"

namespace advisor {

struct Rating {
  std::size_t user = 0;
  std::size_t item = 0;
  double value = 0.0;
};

// Sparse m x n rating matrix; item columns follow an ItemSet.
class RatingsMatrix {
 public:
  RatingsMatrix() = default;
  // Throws unless ratings are finite, lie in [0, 10] and no (user, item)
  // pair repeats.
  RatingsMatrix(std::vector<std::string> user_ids,
                std::vector<std::string> item_ids, std::vector<Rating> entries);

  std::size_t users() const { return user_ids_.size(); }
  std::size_t items() const { return item_ids_.size(); }
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  std::span<const Rating> entries() const { return entries_; }
  double Mean() const;

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::vector<Rating> entries_;
};

struct LfmConfig {
  int dim = 3;
  double lambda_user = 0.1;  // on q_u and s_u
  double lambda_item = 0.1;  // on p_i and b_i
  int max_iters = 200;
  double tol = 1e-8;
  std::uint64_t seed = 1;
};

struct LfmModel {
  double mu = 0.0;
  Eigen::VectorXd item_bias;     // n
  Eigen::VectorXd user_bias;     // m
  Eigen::MatrixXd item_factors;  // n x dim
  Eigen::MatrixXd user_factors;  // m x dim
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> trace;  // objective after each alternating pass

  int dim() const { return static_cast<int>(item_factors.cols()); }
  double Predict(std::size_t user, std::size_t item) const;
};

// Regularized least-squares objective over observed entries.
double LfmObjective(const RatingsMatrix& r, const LfmModel& model,
                    const LfmConfig& cfg);

LfmModel FitLfm(const RatingsMatrix& r, const LfmConfig& cfg);

struct ItemPair {
  std::size_t first = 0;
  std::size_t second = 0;
  bool operator==(const ItemPair&) const = default;
};

enum class Provenance { kSpq, kRandom, kManual };

const char* ProvenanceName(Provenance p);
Provenance ParseProvenance(const std::string& s);

struct Questionnaire {
  std::string id;
  std::vector<ItemPair> pairs;
  Provenance provenance = Provenance::kManual;
  std::optional<double> objective;

  std::size_t size() const { return pairs.size(); }
  // K >= 1, indices below n, distinct items per pair, no repeated
  // unordered pair.
  void Validate(std::size_t n) const;
};

// tr((P P' + ridge I)^-1) with columns p_first - p_second.
// Throws kSingular when ridge is zero and the Gram matrix is singular.
double SpqObjective(std::span<const ItemPair> pairs,
                    const Eigen::MatrixXd& item_factors, double ridge);

struct SpqOptions {
  double ridge = 1e-6;
};

// Forward greedy selection over unordered pairs. When `trajectory` is given
// it receives the objective after each step.
Questionnaire SelectPairsSpq(const LfmModel& model, const ItemSet& items,
                             std::size_t k, const SpqOptions& opts = {},
                             std::vector<double>* trajectory = nullptr);

// K distinct unordered pairs uniformly without replacement.
Questionnaire SelectPairsRandom(const ItemSet& items, std::size_t k,
                                std::uint64_t seed);

std::size_t PairCount(std::size_t n);

}  // namespace advisor

#endif  // ADVISOR_SPQ_HPP_
