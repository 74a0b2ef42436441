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

// Sparse LDL' factorization of symmetric quasi-definite matrices with an
// approximate minimum degree ordering and sign-aware dynamic regularization
// of the pivots.

#ifndef ADVISOR_SRC_LDL_HPP_
#define ADVISOR_SRC_LDL_HPP_

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace advisor::ipm {

class QuasiDefiniteLdl {
 public:
  using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

  // `lower` holds the lower triangle including every diagonal entry.
  // `signs` gives the expected sign (+1 or -1) of each pivot.
  void Analyze(const SpMat& lower, std::vector<int> signs);

  // Factors a matrix with the analyzed pattern. Returns the number of
  // pivots that needed dynamic regularization, or -1 on failure.
  int Factor(const SpMat& lower, double eps, double delta);

  Eigen::VectorXd Solve(const Eigen::VectorXd& rhs) const;

  int size() const { return n_; }

 private:
  int n_ = 0;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_inv_;
  std::vector<int> signs_;  // in permuted order
  std::vector<int> etree_;
  std::vector<int> lp_;
  std::vector<int> li_;
  std::vector<double> lx_;
  std::vector<double> d_inv_;
};

}  // namespace advisor::ipm

#endif  // ADVISOR_SRC_LDL_HPP_
