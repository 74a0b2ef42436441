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

#include "ldl.hpp"

#include <cmath>

#include <Eigen/OrderingMethods>

#include "advisor/error.hpp"

namespace advisor::ipm {
namespace {

using SpMat = QuasiDefiniteLdl::SpMat;

// Upper triangle of P A P' from the lower triangle of A.
SpMat PermutedUpper(const SpMat& lower,
                    const Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>& perm) {
  SpMat upper(lower.rows(), lower.cols());
  upper.selfadjointView<Eigen::Upper>() =
      lower.selfadjointView<Eigen::Lower>().twistedBy(perm);
  upper.makeCompressed();
  return upper;
}

}  // namespace

void QuasiDefiniteLdl::Analyze(const SpMat& lower, std::vector<int> signs) {
  n_ = static_cast<int>(lower.rows());
  Require(lower.cols() == n_ && static_cast<int>(signs.size()) == n_,
          "LDL input dimensions do not match");
  Eigen::AMDOrdering<int> amd;
  amd(lower, perm_inv_);
  perm_ = perm_inv_.inverse();

  signs_.assign(n_, 1);
  for (int i = 0; i < n_; ++i) signs_[perm_.indices()[i]] = signs[i];

  const SpMat upper = PermutedUpper(lower, perm_);
  etree_.assign(n_, -1);
  std::vector<int> counts(n_, 0);
  std::vector<int> work(n_, -1);
  for (int j = 0; j < n_; ++j) {
    work[j] = j;
    for (SpMat::InnerIterator it(upper, j); it; ++it) {
      int i = static_cast<int>(it.row());
      if (i >= j) continue;
      while (work[i] != j) {
        if (etree_[i] == -1) etree_[i] = j;
        ++counts[i];
        work[i] = j;
        i = etree_[i];
      }
    }
  }
  lp_.assign(n_ + 1, 0);
  for (int i = 0; i < n_; ++i) lp_[i + 1] = lp_[i] + counts[i];
  li_.assign(lp_[n_], 0);
  lx_.assign(lp_[n_], 0.0);
  d_inv_.assign(n_, 0.0);
}

int QuasiDefiniteLdl::Factor(const SpMat& lower, double eps, double delta) {
  const SpMat upper = PermutedUpper(lower, perm_);
  std::vector<double> y(n_, 0.0);
  std::vector<char> marked(n_, 0);
  std::vector<int> pattern;
  std::vector<int> stack;
  std::vector<int> next(lp_.begin(), lp_.end() - 1);
  int bumped = 0;
  for (int k = 0; k < n_; ++k) {
    double dk = 0.0;
    pattern.clear();
    for (SpMat::InnerIterator it(upper, k); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (row == k) {
        dk = it.value();
        continue;
      }
      y[row] = it.value();
      if (marked[row]) continue;
      stack.clear();
      for (int i = row; i != -1 && i < k && !marked[i]; i = etree_[i]) {
        marked[i] = 1;
        stack.push_back(i);
      }
      while (!stack.empty()) {
        pattern.push_back(stack.back());
        stack.pop_back();
      }
    }
    for (auto p = pattern.rbegin(); p != pattern.rend(); ++p) {
      const int c = *p;
      const double yc = y[c];
      for (int j = lp_[c]; j < next[c]; ++j) y[li_[j]] -= lx_[j] * yc;
      const int slot = next[c]++;
      li_[slot] = k;
      lx_[slot] = yc * d_inv_[c];
      dk -= yc * lx_[slot];
      y[c] = 0.0;
      marked[c] = 0;
    }
    if (!std::isfinite(dk)) return -1;
    if (signs_[k] * dk <= eps) {
      dk = signs_[k] * delta;
      ++bumped;
    }
    d_inv_[k] = 1.0 / dk;
  }
  return bumped;
}

Eigen::VectorXd QuasiDefiniteLdl::Solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = perm_ * rhs;
  for (int i = 0; i < n_; ++i) {
    for (int j = lp_[i]; j < lp_[i + 1]; ++j) x[li_[j]] -= lx_[j] * x[i];
  }
  for (int i = 0; i < n_; ++i) x[i] *= d_inv_[i];
  for (int i = n_ - 1; i >= 0; --i) {
    for (int j = lp_[i]; j < lp_[i + 1]; ++j) x[i] -= lx_[j] * x[li_[j]];
  }
  return perm_inv_ * x;
}

}  // namespace advisor::ipm
