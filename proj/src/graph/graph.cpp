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


#include "spanforge/graph.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "spanforge/errors.hpp"

namespace spanforge {

Eigen::MatrixXd ProgramGraph::adjacency() const {
  const Eigen::Index r = biadj.rows(), c = biadj.cols();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r + c, r + c);
  a.topRightCorner(r, c) = biadj;
  a.bottomLeftCorner(c, r) = biadj.transpose();
  return a;
}

namespace {

ProgramGraph assemble(const SpanProgram& p, const std::vector<int>& partners) {
  ProgramGraph g;
  const int d = p.dim(), m = p.size();
  const int k = static_cast<int>(partners.size());
  g.biadj = Eigen::MatrixXd::Zero(d + k, 1 + m);
  g.biadj.block(0, 0, d, 1) = p.target();
  g.biadj.block(0, 1, d, m) = p.matrix();
  for (int r = 0; r < k; ++r) g.biadj(d + r, 1 + partners[r]) = 1.0;
  for (int i = 0; i < d; ++i) g.row_labels.push_back("V" + std::to_string(i + 1));
  for (int c : partners) g.row_labels.push_back(p.label(c) + "'");
  g.col_labels.push_back("out");
  for (int i = 0; i < m; ++i) g.col_labels.push_back(p.label(i));
  return g;
}

}  // namespace

ProgramGraph biadjacency(const SpanProgram& p) {
  std::vector<int> all(p.size());
  for (int i = 0; i < p.size(); ++i) all[i] = i;
  return assemble(p, all);
}

ProgramGraph input_graph(const SpanProgram& p, const BitString& x) {
  if (static_cast<int>(x.size()) != p.n())
    throw DomainError("input length does not match n");
  std::vector<int> un;
  for (int i = 0; i < p.size(); ++i)
    if (!p.available(i, x)) un.push_back(i);
  return assemble(p, un);
}

bool zero_witness_exists(const SpanProgram& p, const BitString& x) {
  const Eigen::MatrixXd b = input_graph(p, x).biadj;
  // A null vector with nonzero first entry exists iff column 0 lies in the
  // span of the remaining columns.
  const int full = solver::numeric_rank(b);
  const int rest = solver::numeric_rank(b.rightCols(b.cols() - 1));
  return full == rest;
}

AbsNorm abs_norm(const Eigen::MatrixXd& m) {
  AbsNorm out;
  if (m.size() == 0) return out;
  const Eigen::MatrixXd a = m.cwiseAbs();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  out.norm = svd.singularValues()[0];
  out.frobenius = a.norm();
  return out;
}

double query_estimate(const SpanProgram& p) {
  return max_witness_size(p, {}, true) * abs_norm(biadjacency(p).biadj).norm;
}

double max_full_witness(const ComposedProgram& c) {
  const auto m = max_witness_recursion(c);
  if (m.empty()) return max_witness_size(c.program, {}, true);
  double best = 0.0;
  for (double v : m.front().full_size)
    if (!std::isnan(v)) best = std::max(best, v);
  return best;
}

double query_estimate(const ComposedProgram& c) {
  return max_full_witness(c) * abs_norm(biadjacency(c.program).biadj).norm;
}

// ---------------------------------------------------------------- NAND tree

Eigen::MatrixXd NandTree::adjacency(bool include_aux) const {
  const int off = include_aux ? 0 : 1;
  const int n_v = vertex_count() - off;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_v, n_v);
  for (int v = 1; v < vertex_count(); ++v) {
    const int p = parent[v];
    if (p < off) continue;
    a(v - off, p - off) = a(p - off, v - off) = weight[v];
  }
  return a;
}

NandTree build_nand_tree(const Formula& phi, const BitString& x,
                         std::optional<double> w_out) {
  if (phi.is_constant()) throw DomainError("constant formula has no NAND tree");
  if (static_cast<int>(x.size()) != phi.n())
    throw DomainError("input length does not match n");
  const NandForm nf = to_nand_form(phi);
  const auto vals = nf.nand_values(x);
  NandTree t;
  t.n = phi.n();
  t.sigma_root = nf.sigma_minus();
  t.root_positive = nf.root_positive;
  const double wo = w_out.value_or(std::pow(static_cast<double>(phi.n()), -0.25));
  if (!(wo > 0.0)) throw DomainError("output weight must be positive");

  const auto push = [&](int parent, double w, bool nand, NandTree::Kind k,
                        int s, double sig, int fv, std::string label) {
    t.parent.push_back(parent);
    t.weight.push_back(w);
    t.nand.push_back(nand);
    t.kind.push_back(k);
    t.size.push_back(s);
    t.sigma.push_back(sig);
    t.form_vertex.push_back(fv);
    t.labels.push_back(std::move(label));
    return t.vertex_count() - 1;
  };
  push(-1, 0.0, false, NandTree::kAux, phi.n(), t.sigma_root, -1, "r''");

  std::function<void(int, int, double)> walk = [&](int fv, int parent, double w) {
    const NandVertex& nv = nf.vertices[fv];
    const bool leaf = nv.var >= 0;
    std::string label =
        leaf ? (nv.negated ? "~x" : "x") + std::to_string(nv.var + 1)
             : "nand" + std::to_string(fv);
    const int me = push(parent, w, vals[fv] != 0,
                        leaf ? NandTree::kLeaf : NandTree::kGate, nv.size,
                        nv.sigma_minus, fv, label);
    if (leaf) {
      if (vals[fv]) push(me, 1.0, false, NandTree::kPendant, 1, 1.0, -1, label + "/p");
      return;
    }
    for (int c : nv.children)
      walk(c, me,
           std::pow(static_cast<double>(nf.vertices[c].size) / nv.size, 0.25));
  };
  walk(nf.root, 0, wo);
  return t;
}

double gap_energy_bound(double sigma_root, int n) {
  return 1.0 / std::sqrt(8.0 * sigma_root * sigma_root * sigma_root * n);
}

std::vector<double> y_values(const NandTree& t, double e) {
  const double emax = gap_energy_bound(t.sigma_root, t.n);
  if (!(e >= 0.0) || e > emax * (1.0 + 1e-12))
    throw DomainError("energy outside [0, " + std::to_string(emax) + "]");
  std::vector<double> y(t.vertex_count(), std::numeric_limits<double>::quiet_NaN());
  for (int v = 1; v < t.vertex_count(); ++v) {
    const double gamma = 4.0 * t.sigma_root * t.sigma_root * t.size[v] * t.sigma[v];
    const double den = 1.0 - gamma * e * e;
    if (!(den > 0.0)) throw DomainError("gamma_v E^2 >= 1");
    y[v] = std::sqrt(static_cast<double>(t.size[v])) * t.sigma[v] / den;
  }
  return y;
}

bool root_zero_mode(const NandTree& t) {
  const Eigen::MatrixXd a = t.adjacency(false);
  Eigen::MatrixXd aug(a.rows(), a.cols() + 1);
  aug << a, Eigen::VectorXd::Unit(a.rows(), 0);
  return solver::numeric_rank(aug) > solver::numeric_rank(a);
}

SpectralReport spectrum(const Eigen::MatrixXd& a) {
  SpectralReport r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  r.eigenvalues = es.eigenvalues();
  r.eigenvectors = es.eigenvectors();
  const double norm = r.eigenvalues.size() ? r.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double zero = 1e-9 * std::max(norm, 1.0);
  r.gap = 0.0;
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
    const double l = r.eigenvalues[i];
    if (std::abs(l) <= zero) ++r.zero_dim;
    else if (l > 0 && (r.gap == 0.0 || l < r.gap)) r.gap = l;
    const double res = (a * r.eigenvectors.col(i) - l * r.eigenvectors.col(i)).norm();
    r.max_residual = std::max(r.max_residual, norm > 0 ? res / norm : res);
  }
  return r;
}

// ---------------------------------------------------------------- DOT

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_dot(const ProgramGraph& g, const std::string& name) {
  std::ostringstream os;
  os << "graph " << quoted(name) << " {\n";
  const auto r = g.biadj.rows(), c = g.biadj.cols();
  for (Eigen::Index i = 0; i < r; ++i)
    os << "  r" << i << " [label=" << quoted(g.row_labels[i]) << "];\n";
  for (Eigen::Index j = 0; j < c; ++j)
    os << "  c" << j << " [label=" << quoted(g.col_labels[j])
       << (j == 0 ? ", shape=doublecircle" : "") << "];\n";
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      if (g.biadj(i, j) != 0.0)
        os << "  r" << i << " -- c" << j << " [weight=" << num(g.biadj(i, j)) << "];\n";
  os << "}\n";
  return os.str();
}

std::string to_dot(const NandTree& t, const std::string& name) {
  std::ostringstream os;
  os << "graph " << quoted(name) << " {\n";
  for (int v = 0; v < t.vertex_count(); ++v)
    os << "  t" << v << " [label=" << quoted(t.labels[v] + " nand=" + std::to_string(t.nand[v]))
       << "];\n";
  for (int v = 1; v < t.vertex_count(); ++v)
    os << "  t" << t.parent[v] << " -- t" << v << " [weight=" << num(t.weight[v]) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace spanforge
