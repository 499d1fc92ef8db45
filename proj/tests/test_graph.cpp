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


#include <cmath>

#include <doctest.h>

#include "corpus.hpp"
#include "spanforge/errors.hpp"
#include "spanforge/graph.hpp"

using namespace spanforge;

namespace {

BitString bits(const char* s) { return BitString::parse(s); }

const double kQ = std::pow(2.0, -0.25);

Formula parse(const char* s) {
  static const GateRegistry r = GateRegistry::builtin();
  return parse_formula(s, r);
}

}  // namespace

TEST_CASE("biadjacency blocks") {
  Eigen::MatrixXd expect(3, 3);
  expect << 1, kQ, kQ, 0, 1, 0, 0, 0, 1;
  const ProgramGraph g = biadjacency(make_or(1, 1));
  CHECK(g.biadj.isApprox(expect, 1e-15));
  CHECK(g.row_labels.size() == 3);
  CHECK(g.col_labels.size() == 3);

  const ProgramGraph a = biadjacency(make_and(1, 1));
  CHECK(a.biadj.rows() == 4);
  CHECK(a.biadj.cols() == 3);
  CHECK(a.biadj(0, 0) == doctest::Approx(kQ));
  CHECK(a.biadj(1, 0) == doctest::Approx(kQ));
  CHECK(a.biadj(2, 0) == 0.0);
  CHECK(a.biadj(3, 0) == 0.0);

  Eigen::VectorXd t(1);
  t << 0.5;
  const ProgramGraph e = biadjacency(SpanProgram(0, t, {}));
  CHECK(e.biadj.rows() == 1);
  CHECK(e.biadj.cols() == 1);
  CHECK(e.biadj(0, 0) == 0.5);

  const Eigen::MatrixXd adj = g.adjacency();
  CHECK(adj.rows() == 6);
  CHECK(adj.isApprox(adj.transpose()));
  const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(adj).eigenvalues().cwiseAbs().maxCoeff();
  CHECK(top == doctest::Approx(Eigen::JacobiSVD<Eigen::MatrixXd>(g.biadj).singularValues()(0)).epsilon(1e-12));
}

TEST_CASE("input graphs") {
  CHECK(input_graph(make_or(1, 1), bits("11")).biadj.rows() == 1);
  CHECK(input_graph(make_or(1, 1), bits("00")).biadj.rows() == 3);
  const ProgramGraph g = input_graph(make_and(1, 1), bits("10"));
  CHECK(g.biadj.rows() == 3);
  CHECK(g.biadj(2, 2) == 1.0);
}

TEST_CASE("zero witnesses") {
  CHECK(zero_witness_exists(make_or(1, 1), bits("10")));
  CHECK_FALSE(zero_witness_exists(make_and(1, 1), bits("01")));
  const Formula psi = parse("OR(AND(OR(AND(x1,x2),x3),x4),AND(x5,OR(x6,x7)))");
  const auto cp = compose_formula(psi);
  CHECK(zero_witness_exists(cp->program, bits("0011000")));
  CHECK_FALSE(zero_witness_exists(cp->program, bits("0010000")));
}

TEST_CASE("absolute norms") {
  const AbsNorm i = abs_norm(Eigen::MatrixXd::Identity(5, 5));
  CHECK(i.norm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(abs_norm(Eigen::MatrixXd::Ones(2, 2)).norm == doctest::Approx(2.0).epsilon(1e-14));
  Eigen::MatrixXd m(2, 2);
  m << 1, -1, -1, 1;
  CHECK(abs_norm(m).norm == doctest::Approx(2.0).epsilon(1e-14));

  // sigma^2 = 1 + a^2 + sqrt(a^4 + 2 a^2), a = 2^{-1/4}
  const double a2 = kQ * kQ;
  const double exact = std::sqrt(1 + a2 + std::sqrt(a2 * a2 + 2 * a2));
  const AbsNorm o = abs_norm(biadjacency(make_or(1, 1)).biadj);
  CHECK(o.norm == doctest::Approx(exact).epsilon(1e-12));
  CHECK(o.norm == doctest::Approx(1.758027).epsilon(1e-6));
  CHECK(o.frobenius * o.frobenius == doctest::Approx(3 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(o.norm * o.norm <= o.frobenius * o.frobenius);
}

TEST_CASE("query estimates") {
  const double t = query_estimate(make_or(1, 1));
  CHECK(t == doctest::Approx((1 + std::sqrt(2.0)) * 1.758027).epsilon(1e-6));
  CHECK(t == doctest::Approx(4.244252).epsilon(1e-6));
  const auto cp = compose_formula(parse("OR(x1,x2)"));
  CHECK(query_estimate(*cp) == doctest::Approx(t).epsilon(1e-12));

  const auto b4 = compose_formula(balanced_andor(4));
  CHECK(max_full_witness(*b4) == doctest::Approx(max_witness_size(b4->program, {}, true)).epsilon(1e-9));
  CHECK(std::isfinite(query_estimate(*compose_formula(Formula::single_leaf()))));
}

TEST_CASE("NAND trees") {
  const NandTree a = build_nand_tree(parse("AND(x1,x2)"), bits("11"));
  CHECK(a.vertex_count() == 6);
  CHECK(a.parent[0] == -1);
  CHECK(a.parent[1] == 0);
  int pend = 0;
  for (int v = 0; v < a.vertex_count(); ++v) {
    if (a.kind[v] == NandTree::kPendant) {
      ++pend;
      CHECK(a.nand[v] == 0);
      CHECK(a.weight[v] == 1.0);
    }
    if (v > 0) CHECK(a.weight[v] > 0.0);
  }
  CHECK(pend == 2);
  CHECK(a.weight[1] == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-15));

  const Formula orf = parse("OR(x1,x2)");
  CHECK(build_nand_tree(orf, bits("00")).vertex_count() == 6);
  const NandTree o11 = build_nand_tree(orf, bits("11"));
  CHECK(o11.vertex_count() == 4);
  for (int v = 2; v < o11.vertex_count(); ++v)
    CHECK(o11.weight[v] == doctest::Approx(std::pow(0.5, 0.25)).epsilon(1e-15));

  CHECK(build_nand_tree(orf, bits("00"), 0.3).weight[1] == 0.3);
  CHECK_THROWS_AS(build_nand_tree(parse("MAJ3(x1,x2,x3)"), bits("000")), DomainError);
  CHECK_THROWS_AS(build_nand_tree(orf, bits("0")), DomainError);

  const Eigen::MatrixXd full = o11.adjacency(true), inner = o11.adjacency(false);
  CHECK(full.rows() == 4);
  CHECK(inner.rows() == 3);
  CHECK(inner.isApprox(full.bottomRightCorner(3, 3)));
}

TEST_CASE("zero mode tracks the root value") {
  for (const char* s : {"OR(x1,x2)", "AND(x1,x2)", "OR(AND(x1,x2),AND(x3,x4))",
                        "AND(OR(AND(x1,x2),x3),x4)"}) {
    const Formula phi = parse(s);
    const NandForm nf = to_nand_form(phi);
    for (std::uint64_t i = 0; i < (1u << phi.n()); ++i) {
      const auto x = BitString::from_index(i, phi.n());
      CHECK(root_zero_mode(build_nand_tree(phi, x)) == (nf.nand_values(x)[nf.root] == 0));
    }
  }
}

TEST_CASE("energy bound and y values") {
  const Formula b4 = balanced_andor(4);
  const NandTree t = build_nand_tree(b4, bits("1111"));
  const double emax = gap_energy_bound(t.sigma_root, t.n);
  CHECK(emax == doctest::Approx(1.0 / std::sqrt(8.0 * std::pow(t.sigma_root, 3) * 4)).epsilon(1e-15));
  CHECK(emax == doctest::Approx(0.0539).epsilon(2e-3));

  const auto y0 = y_values(t, 0.0);
  const auto ym = y_values(t, emax);
  for (int v = 1; v < t.vertex_count(); ++v) {
    CHECK(y0[v] == doctest::Approx(std::sqrt(double(t.size[v])) * t.sigma[v]).epsilon(1e-15));
    CHECK(std::isfinite(ym[v]));
    CHECK(ym[v] >= y0[v]);
    const double gamma = 4 * t.sigma_root * t.sigma_root * t.size[v] * t.sigma[v];
    CHECK(gamma * emax * emax <= 0.5 + 1e-12);
    if (t.kind[v] == NandTree::kLeaf && t.sigma[v] == 1.0 && t.size[v] == 1)
      CHECK(ym[v] == doctest::Approx(1.0 / (1 - 4 * t.sigma_root * t.sigma_root * emax * emax)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(y_values(t, 2 * emax), DomainError);
  CHECK_THROWS_AS(y_values(t, -1e-3), DomainError);
}

TEST_CASE("spectra") {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  const SpectralReport r = spectrum(m);
  CHECK(r.zero_dim == 1);
  CHECK(r.gap == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.max_residual < 1e-12);
  const SpectralReport e = spectrum(Eigen::MatrixXd::Zero(2, 2));
  CHECK(e.zero_dim == 2);
  CHECK(e.gap == 0.0);
}

TEST_CASE("norm invariants on the corpus") {
  const double gate_max = std::max(abs_norm(biadjacency(make_and(1, 1)).biadj).norm,
                                   abs_norm(biadjacency(make_or(1, 1)).biadj).norm);
  for (const Formula& phi : corpus::andor_corpus()) {
    const auto cp = compose_formula(phi);
    const ProgramGraph g = biadjacency(cp->program);
    const AbsNorm b = abs_norm(g.biadj);
    const AbsNorm a = abs_norm(g.adjacency());
    CHECK(b.norm <= b.frobenius + 1e-12);
    CHECK(a.norm == doctest::Approx(b.norm).epsilon(1e-10));
    if (b.norm >= 1) CHECK(a.norm <= b.norm * b.norm + 1e-12);
    // Gate programs are built for unequal weights too; the bound uses the
    // worst gate of this formula.
    double worst = gate_max;
    for (const Node& nd : phi.nodes()) {
      if (nd.is_leaf()) continue;
      const double s1 = phi.size(nd.children[0]), s2 = phi.size(nd.children[1]);
      const bool is_and = nd.gate->family == GateFamily::kAnd;
      worst = std::max(worst, abs_norm(biadjacency(is_and ? make_and(s1, s2) : make_or(s1, s2)).biadj).norm);
    }
    CHECK(b.norm <= 2 * worst + 1e-9);
  }
}

TEST_CASE("DOT export") {
  const std::string d = to_dot(biadjacency(make_or(1, 1)));
  CHECK(d.find("graph \"G\" {") != std::string::npos);
  CHECK(d.find("weight=0.840896415254") != std::string::npos);
  const std::string t = to_dot(build_nand_tree(parse("OR(x1,x2)"), bits("00")), "T");
  CHECK(t.find("graph \"T\" {") != std::string::npos);
}
