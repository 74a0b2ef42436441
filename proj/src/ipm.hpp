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

// Homogeneous self-dual interior-point method for
//
//   minimize c'x  subject to  Ax = b,  Gx + s = h,  s in K,
//
// where K is a product of l nonnegative orthants and q three-dimensional
// second-order cones. Nesterov-Todd scaling, Mehrotra predictor-corrector,
// sparse quasi-definite KKT factorization with iterative refinement.

#ifndef ADVISOR_SRC_IPM_HPP_
#define ADVISOR_SRC_IPM_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "advisor/conic.hpp"

namespace advisor::ipm {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct StandardForm {
  int n = 0;
  int l = 0;  // orthant rows come first in G and h
  int q = 0;  // then q blocks of three rows (t, u1, u2)
  SpMat A;    // p x n
  Eigen::VectorXd b;
  SpMat G;    // (l + 3q) x n
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

struct Solution {
  SolveStatus status = SolveStatus::kNumericFailure;
  Eigen::VectorXd x, y, z, s;
  int iterations = 0;
  double pres = 0.0;
  double dres = 0.0;
  double gap = 0.0;
  std::string message;
};

Solution SolveStandard(const StandardForm& problem,
                       const SolverSettings& settings);

// Nesterov-Todd scaling of one second-order cone block.
struct SocScaling {
  double eta = 1.0;
  Eigen::Vector3d w{1.0, 0.0, 0.0};

  static SocScaling Compute(const Eigen::Vector3d& s, const Eigen::Vector3d& z);
  Eigen::Vector3d Apply(const Eigen::Vector3d& v) const;
  Eigen::Vector3d ApplyInverse(const Eigen::Vector3d& v) const;
  Eigen::Matrix3d Matrix() const;
};

// Jordan product and its inverse on one cone block.
Eigen::Vector3d SocProduct(const Eigen::Vector3d& u, const Eigen::Vector3d& v);
Eigen::Vector3d SocDivide(const Eigen::Vector3d& lambda,
                          const Eigen::Vector3d& r);
// Largest a in [0, cap] with u + a d in the closed cone.
double SocMaxStep(const Eigen::Vector3d& u, const Eigen::Vector3d& d,
                  double cap);

}  // namespace advisor::ipm

#endif  // ADVISOR_SRC_IPM_HPP_
