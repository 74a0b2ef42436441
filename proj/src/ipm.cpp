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

#include "ipm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "ldl.hpp"

namespace advisor::ipm {
namespace {

using Eigen::Vector3d;
using Eigen::VectorXd;

constexpr double kStepFactor = 0.99;
constexpr double kStaticReg = 1e-8;
constexpr double kPivotEps = 1e-13;
constexpr double kPivotDelta = 7e-8;
constexpr int kMaxRefine = 10;

// u0^2 - |u1|^2 without cancellation.
double SocResidual(const Vector3d& u) {
  const double r = std::hypot(u[1], u[2]);
  return (u[0] - r) * (u[0] + r);
}

double Norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.norm(); }

Vector3d Block(const VectorXd& v, int offset) {
  return Vector3d(v[offset], v[offset + 1], v[offset + 2]);
}

void SetBlock(VectorXd& v, int offset, const Vector3d& b) {
  v[offset] = b[0];
  v[offset + 1] = b[1];
  v[offset + 2] = b[2];
}

class Cones {
 public:
  Cones(int l, int q) : l_(l), q_(q) {}

  int m() const { return l_ + 3 * q_; }
  int degree() const { return l_ + q_; }
  int soc_offset(int k) const { return l_ + 3 * k; }

  // Signed distance to the cone boundary: min over blocks of the smallest
  // eigenvalue.
  double MinEig(const VectorXd& u) const {
    double r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < l_; ++i) r = std::min(r, u[i]);
    for (int k = 0; k < q_; ++k) {
      const int o = soc_offset(k);
      r = std::min(r, u[o] - std::hypot(u[o + 1], u[o + 2]));
    }
    return r;
  }

  void AddIdentity(VectorXd& u, double a) const {
    for (int i = 0; i < l_; ++i) u[i] += a;
    for (int k = 0; k < q_; ++k) u[soc_offset(k)] += a;
  }

  double MaxStep(const VectorXd& u, const VectorXd& d, double cap) const {
    double a = cap;
    for (int i = 0; i < l_; ++i) {
      if (d[i] < 0.0) a = std::min(a, -u[i] / d[i]);
    }
    for (int k = 0; k < q_; ++k) {
      const int o = soc_offset(k);
      a = SocMaxStep(Block(u, o), Block(d, o), a);
    }
    return std::max(a, 0.0);
  }

  VectorXd Product(const VectorXd& u, const VectorXd& v) const {
    VectorXd r(m());
    for (int i = 0; i < l_; ++i) r[i] = u[i] * v[i];
    for (int k = 0; k < q_; ++k) {
      const int o = soc_offset(k);
      SetBlock(r, o, SocProduct(Block(u, o), Block(v, o)));
    }
    return r;
  }

  VectorXd Divide(const VectorXd& lambda, const VectorXd& r) const {
    VectorXd x(m());
    for (int i = 0; i < l_; ++i) x[i] = r[i] / lambda[i];
    for (int k = 0; k < q_; ++k) {
      const int o = soc_offset(k);
      SetBlock(x, o, SocDivide(Block(lambda, o), Block(r, o)));
    }
    return x;
  }

 private:
  int l_;
  int q_;
};

// NT scaling for the whole product cone.
class Scaling {
 public:
  explicit Scaling(const Cones& cones) : cones_(cones), lp_(cones.m(), 1.0) {}

  void SetIdentity(int q) {
    std::fill(lp_.begin(), lp_.end(), 1.0);
    soc_.assign(q, SocScaling{});
  }

  void Update(const VectorXd& s, const VectorXd& z, int l, int q) {
    for (int i = 0; i < l; ++i) lp_[i] = std::sqrt(s[i] / z[i]);
    soc_.resize(q);
    for (int k = 0; k < q; ++k) {
      const int o = cones_.soc_offset(k);
      soc_[k] = SocScaling::Compute(Block(s, o), Block(z, o));
    }
  }

  VectorXd Apply(const VectorXd& v, int l, int q) const {
    VectorXd r(v.size());
    for (int i = 0; i < l; ++i) r[i] = lp_[i] * v[i];
    for (int k = 0; k < q; ++k) {
      const int o = cones_.soc_offset(k);
      SetBlock(r, o, soc_[k].Apply(Block(v, o)));
    }
    return r;
  }

  VectorXd ApplyInverse(const VectorXd& v, int l, int q) const {
    VectorXd r(v.size());
    for (int i = 0; i < l; ++i) r[i] = v[i] / lp_[i];
    for (int k = 0; k < q; ++k) {
      const int o = cones_.soc_offset(k);
      SetBlock(r, o, soc_[k].ApplyInverse(Block(v, o)));
    }
    return r;
  }

  double lp(int i) const { return lp_[i]; }
  const SocScaling& soc(int k) const { return soc_[k]; }

 private:
  const Cones& cones_;
  std::vector<double> lp_;
  std::vector<SocScaling> soc_;
};

// Quasi-definite KKT system
//   [ 0  A'  G'  ] [dx]   [bx]
//   [ A  0   0   ] [dy] = [by]
//   [ G  0  -W'W ] [dz]   [bz]
// factored with static regularization and solved with iterative refinement
// against the unregularized operator.
class KktSolver {
 public:
  KktSolver(const StandardForm& p, const Cones& cones)
      : p_(p), cones_(cones), n_(p.n), np_(static_cast<int>(p.A.rows())),
        m_(cones.m()), dim_(n_ + np_ + m_) {
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n_; ++i) t.emplace_back(i, i, kStaticReg);
    for (int i = 0; i < np_; ++i) t.emplace_back(n_ + i, n_ + i, -kStaticReg);
    AddOffDiagonal(p.A, n_, t);
    AddOffDiagonal(p.G, n_ + np_, t);
    const int zo = n_ + np_;
    for (int i = 0; i < cones.m() - 3 * p.q; ++i) {
      t.emplace_back(zo + i, zo + i, -1.0);
    }
    for (int k = 0; k < p.q; ++k) {
      const int o = zo + cones.soc_offset(k);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b <= a; ++b) t.emplace_back(o + a, o + b, a == b ? -1.0 : 0.0);
      }
    }
    K_.resize(dim_, dim_);
    K_.setFromTriplets(t.begin(), t.end());
    K_.makeCompressed();
    std::vector<int> signs(dim_, -1);
    std::fill(signs.begin(), signs.begin() + n_, 1);
    ldl_.Analyze(K_, std::move(signs));
  }

  bool Factor(const Scaling& w) {
    w_ = &w;
    const int zo = n_ + np_;
    const int l = p_.l;
    for (int i = 0; i < l; ++i) {
      K_.coeffRef(zo + i, zo + i) = -(w.lp(i) * w.lp(i)) - kStaticReg;
    }
    for (int k = 0; k < p_.q; ++k) {
      const int o = zo + cones_.soc_offset(k);
      const Eigen::Matrix3d wm = w.soc(k).Matrix();
      const Eigen::Matrix3d w2 = wm * wm;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b <= a; ++b) {
          K_.coeffRef(o + a, o + b) = -w2(a, b) - (a == b ? kStaticReg : 0.0);
        }
      }
    }
    return ldl_.Factor(K_, kPivotEps, kPivotDelta) >= 0;
  }

  VectorXd Solve(const VectorXd& rhs) const {
    VectorXd sol = ldl_.Solve(rhs);
    const double scale = 1.0 + rhs.lpNorm<Eigen::Infinity>();
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kMaxRefine; ++it) {
      VectorXd r = rhs - Multiply(sol);
      const double err = r.lpNorm<Eigen::Infinity>();
      if (!(err > 1e-14 * scale) || err > 0.5 * prev) break;
      prev = err;
      sol += ldl_.Solve(r);
    }
    return sol;
  }

 private:
  static void AddOffDiagonal(const SpMat& M, int row_offset,
                             std::vector<Eigen::Triplet<double>>& t) {
    for (int col = 0; col < M.outerSize(); ++col) {
      for (SpMat::InnerIterator it(M, col); it; ++it) {
        t.emplace_back(row_offset + static_cast<int>(it.row()), col, it.value());
      }
    }
  }

  VectorXd Multiply(const VectorXd& v) const {
    const auto x = v.head(n_);
    const auto y = v.segment(n_, np_);
    const VectorXd z = v.tail(m_);
    VectorXd out(dim_);
    out.head(n_) = p_.A.transpose() * y + p_.G.transpose() * z;
    out.segment(n_, np_) = p_.A * x;
    out.tail(m_) = p_.G * x - w_->Apply(w_->Apply(z, p_.l, p_.q), p_.l, p_.q);
    return out;
  }

  const StandardForm& p_;
  const Cones& cones_;
  int n_, np_, m_, dim_;
  SpMat K_;
  QuasiDefiniteLdl ldl_;
  const Scaling* w_ = nullptr;
};

}  // namespace

SocScaling SocScaling::Compute(const Vector3d& s, const Vector3d& z) {
  const double sres = SocResidual(s);
  const double zres = SocResidual(z);
  const Vector3d sb = s / std::sqrt(sres);
  const Vector3d zb = z / std::sqrt(zres);
  const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
  SocScaling w;
  w.w = Vector3d(sb[0] + zb[0], sb[1] - zb[1], sb[2] - zb[2]) / (2.0 * gamma);
  w.eta = std::pow(sres / zres, 0.25);
  return w;
}

Vector3d SocScaling::Apply(const Vector3d& v) const {
  const double w1v1 = w[1] * v[1] + w[2] * v[2];
  const double k = v[0] + w1v1 / (1.0 + w[0]);
  return eta * Vector3d(w[0] * v[0] + w1v1, v[1] + k * w[1], v[2] + k * w[2]);
}

Vector3d SocScaling::ApplyInverse(const Vector3d& v) const {
  const double w1v1 = w[1] * v[1] + w[2] * v[2];
  const double k = -v[0] + w1v1 / (1.0 + w[0]);
  return Vector3d(w[0] * v[0] - w1v1, v[1] + k * w[1], v[2] + k * w[2]) / eta;
}

Eigen::Matrix3d SocScaling::Matrix() const {
  Eigen::Matrix3d m;
  for (int j = 0; j < 3; ++j) m.col(j) = Apply(Vector3d::Unit(j));
  return m;
}

Vector3d SocProduct(const Vector3d& u, const Vector3d& v) {
  return Vector3d(u.dot(v), u[0] * v[1] + v[0] * u[1], u[0] * v[2] + v[0] * u[2]);
}

Vector3d SocDivide(const Vector3d& lambda, const Vector3d& r) {
  const double det = SocResidual(lambda);
  const double x0 =
      (lambda[0] * r[0] - lambda[1] * r[1] - lambda[2] * r[2]) / det;
  return Vector3d(x0, (r[1] - x0 * lambda[1]) / lambda[0],
                  (r[2] - x0 * lambda[2]) / lambda[0]);
}

double SocMaxStep(const Vector3d& u, const Vector3d& d, double cap) {
  double amax = cap;
  if (d[0] < 0.0) amax = std::min(amax, -u[0] / d[0]);
  const double a = d[0] * d[0] - d[1] * d[1] - d[2] * d[2];
  const double b = u[0] * d[0] - u[1] * d[1] - u[2] * d[2];
  const double c = std::max(0.0, SocResidual(u));
  double root = std::numeric_limits<double>::infinity();
  if (std::abs(a) <= 1e-300) {
    if (b < 0.0) root = -c / (2.0 * b);
  } else {
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double qv = -(b + (b >= 0.0 ? sq : -sq));
      for (double r : {qv / a, qv != 0.0 ? c / qv : std::numeric_limits<double>::infinity()}) {
        if (r >= 0.0) root = std::min(root, r);
      }
    }
  }
  return std::max(0.0, std::min(amax, root));
}

Solution SolveStandard(const StandardForm& p, const SolverSettings& settings) {
  const int n = p.n;
  const int np = static_cast<int>(p.A.rows());
  const Cones cones(p.l, p.q);
  const int m = cones.m();
  const int degree = cones.degree();

  Solution out;
  KktSolver kkt(p, cones);
  Scaling scaling(cones);
  scaling.SetIdentity(p.q);

  auto split = [&](const VectorXd& v, VectorXd& x, VectorXd& y, VectorXd& z) {
    x = v.head(n);
    y = v.segment(n, np);
    z = v.tail(m);
  };
  auto stack = [&](const VectorXd& a, const VectorXd& b, const VectorXd& c) {
    VectorXd v(n + np + m);
    v << a, b, c;
    return v;
  };

  if (!kkt.Factor(scaling)) {
    out.message = "initial factorization failed";
    return out;
  }

  VectorXd x, y, z, s, tmp;
  {
    VectorXd xs, ys, zs;
    split(kkt.Solve(stack(VectorXd::Zero(n), p.b, p.h)), xs, ys, zs);
    x = xs;
    s = -zs;
    split(kkt.Solve(stack(-p.c, VectorXd::Zero(np), VectorXd::Zero(m))), xs, ys, zs);
    y = ys;
    z = zs;
    if (m > 0) {
      const double as = -cones.MinEig(s);
      if (as >= -1e-8) cones.AddIdentity(s, 1.0 + as);
      const double az = -cones.MinEig(z);
      if (az >= -1e-8) cones.AddIdentity(z, 1.0 + az);
    }
  }
  double tau = 1.0;
  double kappa = 1.0;

  const double resx0 = std::max(1.0, Norm(p.c));
  const double resy0 = std::max(1.0, Norm(p.b));
  const double resz0 = std::max(1.0, Norm(p.h));

  VectorXd e = VectorXd::Zero(m);
  cones.AddIdentity(e, 1.0);

  for (int iter = 0;; ++iter) {
    const VectorXd Atx = p.A * x;
    const VectorXd Gx = p.G * x;
    const VectorXd Aty = p.A.transpose() * y;
    const VectorXd Gtz = p.G.transpose() * z;
    const VectorXd rx = -Aty - Gtz - tau * p.c;
    const VectorXd ry = Atx - tau * p.b;
    const VectorXd rz = s + Gx - tau * p.h;
    const double cx = p.c.dot(x);
    const double by = p.b.dot(y);
    const double hz = p.h.dot(z);
    const double rt = kappa + cx + by + hz;

    const double pcost = cx / tau;
    const double dcost = -(hz + by) / tau;
    const double sz = s.dot(z);
    out.pres = std::max(Norm(ry) / resy0, Norm(rz) / resz0) / tau;
    out.dres = Norm(rx) / resx0 / tau;
    out.gap = sz / (tau * tau);
    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0) relgap = out.gap / -pcost;
    else if (dcost > 0.0) relgap = out.gap / dcost;
    out.iterations = iter;

    if (settings.verbose) {
      std::fprintf(stderr,
                   "%3d pcost %+.9e dcost %+.9e gap %.2e pres %.2e dres %.2e "
                   "tau %.2e kap %.2e\n",
                   iter, pcost, dcost, out.gap, out.pres, out.dres, tau, kappa);
    }

    if (!std::isfinite(pcost) || !std::isfinite(dcost) || !std::isfinite(out.gap)) {
      out.message = "non-finite iterate";
      return out;
    }
    if (out.pres < settings.feastol && out.dres < settings.feastol &&
        (out.gap < settings.abstol || relgap < settings.reltol)) {
      out.status = SolveStatus::kOptimal;
      out.x = x / tau;
      out.y = y / tau;
      out.z = z / tau;
      out.s = s / tau;
      return out;
    }
    if (hz + by < 0.0) {
      const double pinf = Norm(Aty + Gtz) / resx0 / -(hz + by);
      if (pinf < settings.feastol) {
        out.status = SolveStatus::kInfeasible;
        out.message = "primal infeasibility certificate";
        out.y = y / -(hz + by);
        out.z = z / -(hz + by);
        return out;
      }
    }
    if (cx < 0.0) {
      const double dinf = std::max(Norm(Atx) / resy0, Norm(Gx + s) / resz0) / -cx;
      if (dinf < settings.feastol) {
        out.status = SolveStatus::kUnbounded;
        out.message = "dual infeasibility certificate";
        out.x = x / -cx;
        return out;
      }
    }
    if (iter >= settings.max_iters) {
      out.message = "iteration limit reached";
      return out;
    }

    scaling.Update(s, z, p.l, p.q);
    const VectorXd lambda = scaling.Apply(z, p.l, p.q);
    if (!kkt.Factor(scaling)) {
      out.message = "KKT factorization failed";
      return out;
    }
    VectorXd x1, y1, z1;
    split(kkt.Solve(stack(-p.c, p.b, p.h)), x1, y1, z1);
    const double denom = -p.c.dot(x1) - p.b.dot(y1) - p.h.dot(z1) + kappa / tau;
    const double mu = (sz + tau * kappa) / (degree + 1);

    struct Direction {
      VectorXd dx, dy, dz, ds;
      double dtau = 0.0;
      double dkappa = 0.0;
    };
    auto direction = [&](double residual_factor, const VectorXd& ds_bar,
                         double dk) {
      Direction d;
      const VectorXd q = scaling.Apply(cones.Divide(lambda, ds_bar), p.l, p.q);
      VectorXd x2, y2, z2;
      split(kkt.Solve(stack(residual_factor * rx, -residual_factor * ry,
                            -residual_factor * rz - q)),
            x2, y2, z2);
      d.dtau = (residual_factor * rt + dk / tau + p.c.dot(x2) + p.b.dot(y2) +
                p.h.dot(z2)) /
               denom;
      d.dx = x2 + d.dtau * x1;
      d.dy = y2 + d.dtau * y1;
      d.dz = z2 + d.dtau * z1;
      d.ds = q - scaling.Apply(scaling.Apply(d.dz, p.l, p.q), p.l, p.q);
      d.dkappa = (dk - kappa * d.dtau) / tau;
      return d;
    };
    auto max_step = [&](const Direction& d) {
      double a = 1.0;
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      a = cones.MaxStep(s, d.ds, a);
      a = cones.MaxStep(z, d.dz, a);
      return a;
    };

    const VectorXd ll = cones.Product(lambda, lambda);
    const Direction aff = direction(1.0, -ll, -tau * kappa);
    const double alpha_aff = max_step(aff);
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    const VectorXd corr =
        cones.Product(scaling.ApplyInverse(aff.ds, p.l, p.q),
                      scaling.Apply(aff.dz, p.l, p.q));
    const Direction d = direction(1.0 - sigma, -ll - corr + sigma * mu * e,
                                  -tau * kappa - aff.dtau * aff.dkappa + sigma * mu);
    double alpha = std::min(1.0, kStepFactor * max_step(d));
    if (!(alpha > 1e-12)) {
      out.message = "step length collapsed";
      return out;
    }
    x += alpha * d.dx;
    y += alpha * d.dy;
    z += alpha * d.dz;
    s += alpha * d.ds;
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
  }
}

}  // namespace advisor::ipm
