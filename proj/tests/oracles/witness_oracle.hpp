// Copyright 2026 The Spanforge Authors.
//
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


#pragma once

// Witness-size oracles that take the opposite route from the library:
// the 1-case through a null-space parametrization, the 0-case through a
// KKT system. Both use Eigen decompositions the library does not.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// min sum c_i w_i^2 subject to A w = t. Returns +inf when infeasible.
inline double one_witness(const Eigen::MatrixXd& a, const Eigen::VectorXd& t,
                          const std::vector<double>& c) {
  const Eigen::Index k = a.cols();
  if (k == 0) return t.norm() < 1e-12 ? 0.0 : INFINITY;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(1e-11);
  const Eigen::VectorXd w0 = cod.solve(t);
  if ((a * w0 - t).norm() > 1e-8 * std::max(1.0, t.norm())) return INFINITY;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    rank += svd.singularValues()(i) > 1e-11 * smax;
  const Eigen::MatrixXd n = svd.matrixV().rightCols(k - rank);
  Eigen::VectorXd w = w0;
  const Eigen::VectorXd cv = Eigen::Map<const Eigen::VectorXd>(c.data(), k);
  if (n.cols() > 0) {
    const Eigen::MatrixXd h = n.transpose() * cv.asDiagonal() * n;
    const Eigen::VectorXd g = n.transpose() * (cv.asDiagonal() * w0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double emax = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(h.rows());
    const Eigen::VectorXd gb = es.eigenvectors().transpose() * g;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (ev(i) > 1e-12 * emax) z += es.eigenvectors().col(i) * (gb(i) / ev(i));
    w = w0 - n * z;
  }
  return (cv.array() * w.array().square()).sum();
}

// min nw |w|^2 + sum c_i <u_i, w>^2 subject to <t, w> = 1 and w orthogonal
// to the columns of `avail`. Returns +inf when infeasible.
inline double zero_witness(const Eigen::MatrixXd& avail, const Eigen::MatrixXd& unavail,
                           const Eigen::VectorXd& t, const std::vector<double>& c,
                           double nw) {
  const Eigen::Index d = t.size();
  Eigen::MatrixXd m = nw * Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index i = 0; i < unavail.cols(); ++i)
    m += c[static_cast<std::size_t>(i)] * unavail.col(i) * unavail.col(i).transpose();
  Eigen::MatrixXd b(d, 1 + avail.cols());
  b.col(0) = t;
  b.rightCols(avail.cols()) = avail;
  const Eigen::Index e = b.cols();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(d + e, d + e);
  kkt.topLeftCorner(d, d) = 2.0 * m;
  kkt.topRightCorner(d, e) = b;
  kkt.bottomLeftCorner(e, d) = b.transpose();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + e);
  rhs[d] = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
  cod.setThreshold(1e-12);
  const Eigen::VectorXd sol = cod.solve(rhs);
  const Eigen::VectorXd w = sol.head(d);
  if ((b.transpose() * w - Eigen::VectorXd::Unit(e, 0)).norm() > 1e-7) return INFINITY;
  return w.dot(m * w);
}

}  // namespace oracle
