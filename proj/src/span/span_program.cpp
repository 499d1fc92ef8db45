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


#include <algorithm>
#include <cmath>
#include <numeric>

#include "spanforge/errors.hpp"
#include "spanforge/span_program.hpp"

namespace spanforge {

SpanProgram::SpanProgram(int n, Eigen::VectorXd target,
                         std::vector<SpanColumn> columns)
    : n_(n), target_(std::move(target)) {
  if (n_ < 0) throw DomainError("negative input count");
  const auto key = [](const SpanColumn& c) {
    return c.input ? 2 * c.input->var + (c.input->value ? 1 : 0) : -1;
  };
  std::stable_sort(columns.begin(), columns.end(),
                   [&](const SpanColumn& a, const SpanColumn& b) {
                     return key(a) < key(b);
                   });
  a_.resize(target_.size(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const SpanColumn& c = columns[i];
    if (c.vector.size() != target_.size())
      throw DomainError("column '" + c.label + "' has dimension " +
                        std::to_string(c.vector.size()) + ", expected " +
                        std::to_string(target_.size()));
    if (c.input && (c.input->var < 0 || c.input->var >= n_))
      throw DomainError("column '" + c.label + "' reads input " +
                        std::to_string(c.input->var + 1) + " outside 1.." +
                        std::to_string(n_));
    a_.col(static_cast<Eigen::Index>(i)) = c.vector;
    tags_.push_back(c.input);
    labels_.push_back(c.label.empty() ? "i" + std::to_string(i + 1) : c.label);
  }
}

int SpanProgram::free_count() const {
  return static_cast<int>(
      std::count_if(tags_.begin(), tags_.end(), [](const auto& t) { return !t; }));
}

bool SpanProgram::monotone() const {
  return std::none_of(tags_.begin(), tags_.end(),
                      [](const auto& t) { return t && !t->value; });
}

bool SpanProgram::available(int col, const BitString& x) const {
  const auto& t = tags_[col];
  return !t || x[t->var] == t->value;
}

std::vector<int> SpanProgram::columns_for(int var, bool value) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (tags_[i] && tags_[i]->var == var && tags_[i]->value == value)
      out.push_back(i);
  return out;
}

// ---------------------------------------------------------------- solvers

namespace solver {
namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& a, std::span<const int> cols) {
  Eigen::MatrixXd m(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i)
    m.col(static_cast<Eigen::Index>(i)) = a.col(cols[i]);
  return m;
}

// Pseudo-inverse solve of a symmetric system.
Eigen::VectorXd sym_pinv_solve(const Eigen::MatrixXd& k, const Eigen::VectorXd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double cut = kRankCutoff * lam.cwiseAbs().maxCoeff();
  Eigen::VectorXd c = es.eigenvectors().transpose() * b;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    c[i] = std::abs(lam[i]) > cut ? c[i] / lam[i] : 0.0;
  return es.eigenvectors() * c;
}

}  // namespace

int numeric_rank(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  if (smax <= 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) r += sv[i] > kRankCutoff * smax;
  return r;
}

bool in_span(const Eigen::MatrixXd& a, std::span<const int> cols,
             const Eigen::VectorXd& t) {
  if (t.size() == 0 || t.cwiseAbs().maxCoeff() == 0.0) return true;
  if (cols.empty()) return false;
  Eigen::MatrixXd m = gather(a, cols);
  const int r1 = numeric_rank(m);
  m.conservativeResize(Eigen::NoChange, m.cols() + 1);
  m.col(m.cols() - 1) = t;
  return numeric_rank(m) == r1;
}

QuadWitness min_one_witness(const Eigen::MatrixXd& a, const Eigen::VectorXd& t,
                            std::span<const int> cols,
                            std::span<const double> weights) {
  const Eigen::Index k = static_cast<Eigen::Index>(cols.size());
  const Eigen::Index d = t.size();
  QuadWitness out;
  if (k == 0) {
    out.w = Eigen::VectorXd::Zero(0);
    out.residual = t.norm();
    return out;
  }
  const Eigen::MatrixXd av = gather(a, cols);
  // KKT system [2W A^T; A 0] [w; lambda] = [0; t].
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + d, k + d);
  for (Eigen::Index i = 0; i < k; ++i) kkt(i, i) = 2.0 * weights[i];
  kkt.topRightCorner(k, d) = av.transpose();
  kkt.bottomLeftCorner(d, k) = av;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + d);
  rhs.tail(d) = t;
  const Eigen::VectorXd sol = sym_pinv_solve(kkt, rhs);
  out.w = sol.head(k);
  for (Eigen::Index i = 0; i < k; ++i) out.objective += weights[i] * out.w[i] * out.w[i];
  out.residual = (av * out.w - t).norm();
  return out;
}

QuadWitness min_zero_witness(const Eigen::MatrixXd& a, const Eigen::VectorXd& t,
                             std::span<const int> avail,
                             std::span<const int> unavail,
                             std::span<const double> weights, double norm_weight) {
  const Eigen::Index d = t.size();
  QuadWitness out;
  Eigen::MatrixXd basis;  // orthonormal basis of avail^perp
  if (avail.empty()) {
    basis = Eigen::MatrixXd::Identity(d, d);
  } else {
    const Eigen::MatrixXd av = gather(a, avail);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(av, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    int r = 0;
    const double smax = sv.size() ? sv[0] : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) r += smax > 0 && sv[i] > kRankCutoff * smax;
    basis = svd.matrixU().rightCols(d - r);
  }
  const Eigen::Index m = basis.cols();
  const Eigen::VectorXd at = basis.transpose() * t;
  const double an = at.squaredNorm();
  if (m == 0 || an <= 0.0) {
    out.w = Eigen::VectorXd::Zero(d);
    out.residual = 1.0;
    return out;
  }
  const Eigen::VectorXd z0 = at / an;
  Eigen::MatrixXd z;  // orthonormal basis of at^perp in R^m
  if (m > 1) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(at);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
    z = q.rightCols(m - 1);
  } else {
    z = Eigen::MatrixXd::Zero(1, 0);
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(z.cols());
  if (z.cols() > 0) {
    const Eigen::Index rows =
        static_cast<Eigen::Index>(unavail.size()) + (norm_weight > 0 ? m : 0);
    Eigen::MatrixXd mm(rows, z.cols());
    Eigen::VectorXd b(rows);
    for (std::size_t i = 0; i < unavail.size(); ++i) {
      const double sw = std::sqrt(weights[i]);
      const Eigen::RowVectorXd row = a.col(unavail[i]).transpose() * basis;
      mm.row(static_cast<Eigen::Index>(i)) = sw * row * z;
      b[static_cast<Eigen::Index>(i)] = -sw * row.dot(z0);
    }
    if (norm_weight > 0) {
      const double sw = std::sqrt(norm_weight);
      const Eigen::Index o = static_cast<Eigen::Index>(unavail.size());
      mm.block(o, 0, m, z.cols()) = sw * z;
      b.segment(o, m) = -sw * z0;
    }
    if (rows > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(mm, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(kRankCutoff);
      u = svd.solve(b);
    }
  }
  out.w = basis * (z0 + z * u);
  out.objective = norm_weight * out.w.squaredNorm();
  for (std::size_t i = 0; i < unavail.size(); ++i) {
    const double ip = a.col(unavail[i]).dot(out.w);
    out.objective += weights[i] * ip * ip;
  }
  double res = std::abs(t.dot(out.w) - 1.0);
  for (int c : avail) res = std::max(res, std::abs(a.col(c).dot(out.w)));
  out.residual = res;
  return out;
}

}  // namespace solver

// ---------------------------------------------------------------- gadgets

namespace {

void require_positive(double s1, double s2) {
  if (!(s1 > 0.0) || !(s2 > 0.0) || !std::isfinite(s1) || !std::isfinite(s2))
    throw DomainError("span program weights must be positive and finite");
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

SpanProgram make_and(double s1, double s2) {
  require_positive(s1, s2);
  const double sp = s1 + s2;
  const double a1 = std::pow(s1 / sp, 0.25), a2 = std::pow(s2 / sp, 0.25);
  return SpanProgram(2, vec({a1, a2}),
                     {{vec({1.0, 0.0}), InputIndex{0, true}, "i1"},
                      {vec({0.0, 1.0}), InputIndex{1, true}, "i2"}});
}

SpanProgram make_or(double s1, double s2) {
  require_positive(s1, s2);
  const double sp = s1 + s2;
  const double e1 = std::pow(s1 / sp, 0.25), e2 = std::pow(s2 / sp, 0.25);
  return SpanProgram(2, vec({1.0}),
                     {{vec({e1}), InputIndex{0, true}, "i1"},
                      {vec({e2}), InputIndex{1, true}, "i2"}});
}

SpanProgram make_canonical_or2(double s1, double s2) {
  require_positive(s1, s2);
  const double a = std::hypot(s1, s2);
  return SpanProgram(2, vec({1.0}),
                     {{vec({std::sqrt(s1 / a)}), InputIndex{0, true}, "i1"},
                      {vec({std::sqrt(s2 / a)}), InputIndex{1, true}, "i2"}});
}

SpanProgram make_literal(bool value) {
  return SpanProgram(1, vec({1.0}), {{vec({1.0}), InputIndex{0, value}, "i1"}});
}

// ---------------------------------------------------------------- witness

bool eval_span(const SpanProgram& p, const BitString& x) {
  if (static_cast<int>(x.size()) != p.n())
    throw DomainError("input length " + std::to_string(x.size()) +
                      " does not match n = " + std::to_string(p.n()));
  std::vector<int> avail;
  for (int i = 0; i < p.size(); ++i)
    if (p.available(i, x)) avail.push_back(i);
  return solver::in_span(p.matrix(), avail, p.target());
}

namespace {

std::vector<double> unit_or(std::span<const double> s, int n) {
  if (s.empty()) return std::vector<double>(n, 1.0);
  if (static_cast<int>(s.size()) != n)
    throw DomainError("cost vector has " + std::to_string(s.size()) +
                      " entries, expected " + std::to_string(n));
  for (double v : s)
    if (!(v >= 0.0)) throw DomainError("costs must be nonnegative");
  return {s.begin(), s.end()};
}

WitnessResult solve(const SpanProgram& p, const BitString& x,
                    std::span<const double> s_in, bool full) {
  const auto s = unit_or(s_in, p.n());
  WitnessResult r;
  r.value = eval_span(p, x);
  std::vector<int> avail, unavail;
  for (int i = 0; i < p.size(); ++i)
    (p.available(i, x) ? avail : unavail).push_back(i);
  const auto cost = [&](int col) { return p.is_free(col) ? 0.0 : s[p.tag(col)->var]; };
  if (r.value) {
    std::vector<double> w;
    for (int c : avail) w.push_back(p.is_free(c) ? (full ? 1.0 : 0.0) : cost(c));
    const auto q = solver::min_one_witness(p.matrix(), p.target(), avail, w);
    r.witness = Eigen::VectorXd::Zero(p.size());
    double sz = 0.0, fr = 0.0;
    for (std::size_t i = 0; i < avail.size(); ++i) {
      const double wi = q.w[static_cast<Eigen::Index>(i)];
      r.witness[avail[i]] = wi;
      if (p.is_free(avail[i])) fr += wi * wi;
      else sz += cost(avail[i]) * wi * wi;
    }
    r.size = sz;
    r.full_size = 1.0 + sz + fr;
    r.residual = q.residual;
  } else {
    std::vector<double> w;
    for (int c : unavail) w.push_back(cost(c));
    const auto q = solver::min_zero_witness(p.matrix(), p.target(), avail, unavail,
                                            w, full ? 1.0 : 0.0);
    r.witness = q.w;
    double sz = 0.0;
    for (std::size_t i = 0; i < unavail.size(); ++i) {
      const double ip = p.matrix().col(unavail[i]).dot(q.w);
      sz += w[i] * ip * ip;
    }
    r.size = sz;
    r.full_size = q.w.squaredNorm() + sz;
    r.residual = q.residual;
  }
  return r;
}

}  // namespace

WitnessResult witness_size(const SpanProgram& p, const BitString& x,
                           std::span<const double> s) {
  return solve(p, x, s, false);
}

WitnessResult full_witness_size(const SpanProgram& p, const BitString& x,
                                std::span<const double> s) {
  return solve(p, x, s, true);
}

double max_witness_size(const SpanProgram& p, std::span<const double> s,
                        bool full) {
  if (p.n() > kMaxExhaustiveVars)
    throw DomainError("exhaustive maximum limited to n <= " +
                      std::to_string(kMaxExhaustiveVars));
  double best = 0.0;
  const std::uint64_t rows = std::uint64_t{1} << p.n();
  for (std::uint64_t i = 0; i < rows; ++i) {
    const auto x = BitString::from_index(i, p.n());
    const auto r = full ? full_witness_size(p, x, s) : witness_size(p, x, s);
    best = std::max(best, full ? r.full_size : r.size);
  }
  return best;
}

}  // namespace spanforge
