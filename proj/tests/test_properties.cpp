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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "corpus.hpp"
#include "spanforge/adversary.hpp"
#include "spanforge/formula.hpp"
#include "spanforge/graph.hpp"
#include "spanforge/span_program.hpp"
#include "spanforge/verification.hpp"

using namespace spanforge;

namespace {

const GateRegistry& reg() {
  static const GateRegistry r = [] {
    GateRegistry g = GateRegistry::builtin();
    g.add(GateSpec::make("XOR", {0, 1, 1, 0}));
    return g;
  }();
  return r;
}

std::string failures(const VerificationReport& r) {
  std::string s;
  for (const auto& it : r.items)
    if (!it.pass) s += it.what + " lhs=" + std::to_string(it.lhs) + " rhs=" + std::to_string(it.rhs) + "\n";
  return s;
}

// Binary OR tree over 2^d leaves.
Formula complete_or(int d) {
  std::vector<std::string> cur;
  for (int i = 1; i <= (1 << d); ++i) cur.push_back("x" + std::to_string(i));
  while (cur.size() > 1) {
    std::vector<std::string> next;
    for (std::size_t i = 0; i < cur.size(); i += 2) next.push_back("OR(" + cur[i] + "," + cur[i + 1] + ")");
    cur = next;
  }
  return parse_formula(cur[0], reg());
}

// Random read-once formula over the builtin gates, with NOTs and constants.
std::string random_text(std::mt19937_64& rng, int& next_var, int budget) {
  if (budget <= 1) {
    const std::string lit = "x" + std::to_string(next_var++);
    return uniform_below(rng, 4) == 0 ? "NOT(" + lit + ")" : lit;
  }
  static const char* names[] = {"AND", "OR", "NAND", "NOR", "XOR", "MAJ3"};
  const std::string g = names[uniform_below(rng, 6)];
  const int k = g == "MAJ3" ? 3 : g == "XOR" ? 2 : 2 + static_cast<int>(uniform_below(rng, 2));
  std::string s = g + "(";
  int left = budget;
  for (int c = 0; c < k; ++c) {
    const int share = c + 1 == k ? left : std::max(1, left / (k - c));
    s += (c ? "," : "") + random_text(rng, next_var, share);
    left -= share;
    if (left < 1) left = 1;
  }
  s += ")";
  if (uniform_below(rng, 5) == 0) s = "NOT(" + s + ")";
  if (uniform_below(rng, 8) == 0) s = "AND(" + s + ",CONST1())";
  return s;
}

}  // namespace

TEST_CASE("normalize preserves the function") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    int v = 1;
    const std::string text = random_text(rng, v, 2 + static_cast<int>(uniform_below(rng, 7)));
    const Formula phi = parse_formula(text, reg());
    const Formula norm = normalize(phi);
    INFO(text);
    CHECK(norm.n() == phi.n());
    CHECK(norm.truth_table() == phi.truth_table());
    CHECK(normalize(norm).to_string() == norm.to_string());
    const Formula wide = expand_fanin2(norm);
    CHECK(wide.truth_table() == phi.truth_table());
  }
}

TEST_CASE("span program, formula and graph evaluations agree on the corpus") {
  for (const Formula& phi : corpus::andor_corpus()) {
    if (phi.n() > 9) continue;
    const auto c = compose_formula(phi);
    const NandForm nf = to_nand_form(phi);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << phi.n()); ++k) {
      const auto x = BitString::from_index(k, phi.n());
      const bool f = phi.evaluate(x);
      INFO(phi.to_string() << " x=" << x.str());
      CHECK(eval_span(c->program, x) == f);
      CHECK(zero_witness_exists(c->program, x) == f);
      CHECK(nf.evaluate(x) == f);
    }
  }
}

TEST_CASE("composition lemmas hold on the corpus") {
  const auto all = corpus::andor_corpus();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const Formula& phi = all[i];
    if (phi.n() > 7) continue;
    const auto c = compose_formula(phi);
    INFO(phi.to_string());
    const auto ds = check_directsum_norm(*c);
    CHECK_MESSAGE(ds.pass, failures(ds));
    for (const auto& x : check_inputs(phi.n(), i, 8)) {
      const auto cl = check_compose_lemma(*c, x);
      CHECK_MESSAGE(cl.pass, x.str() << "\n" << failures(cl));
      const auto wb = check_witness_bounds(*c, x);
      CHECK_MESSAGE(wb.pass, x.str() << "\n" << failures(wb));
    }
  }
}

TEST_CASE("gap lemma and calibration on the corpus") {
  const auto all = corpus::andor_corpus();
  for (std::size_t i = 0; i < all.size(); i += 2) {
    const Formula& phi = all[i];
    if (phi.n() > 10) continue;
    INFO(phi.to_string());
    const auto cal = calibrate_nand_tree(phi);
    CHECK_MESSAGE(cal.pass, failures(cal));
    for (const auto& x : check_inputs(phi.n(), i, 4)) {
      if (phi.n() > 6 && x != BitString::ones(phi.n()) && x != BitString(phi.n())) continue;
      const auto gap = check_gap_lemma(phi, x);
      CHECK_MESSAGE(gap.pass, x.str() << "\n" << failures(gap));
    }
  }
}

TEST_CASE("balance lemma on random formulas") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 2 + static_cast<int>(seed * 37 % 63);
    const Formula phi = expand_fanin2(random_andor(n, seed, 2 + static_cast<int>(seed % 3)));
    const auto r = check_balance_lemma(phi);
    INFO(phi.to_string());
    CHECK_MESSAGE(r.pass, failures(r));
  }
}

TEST_CASE("balance lemma is tight on complete OR trees") {
  for (int d = 1; d <= 5; ++d) {
    const Formula phi = complete_or(d);
    const FormulaMetrics m = metrics(phi);
    CHECK(m.beta == doctest::Approx(1.0).epsilon(1e-12));
    const auto r = check_balance_lemma(phi);
    CHECK(r.pass);
    for (const auto& it : r.items)
      if (it.what.find("ADV(v)") != std::string::npos)
        CHECK(it.lhs == doctest::Approx(it.rhs).epsilon(1e-12));
  }
}

TEST_CASE("fan-in expansion grows sigma_minus by at most a factor 10") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 4 + static_cast<int>(seed % 20);
    const Formula wide = normalize(random_andor(n, 500 + seed, 8));
    const Formula bin = expand_fanin2(wide);
    CHECK(bin.max_fanin() <= 2);
    CHECK(bin.truth_table() == wide.truth_table());
    const double a = metrics(wide).root_sigma_minus();
    const double b = metrics(bin).root_sigma_minus();
    INFO(wide.to_string());
    CHECK(b <= 10.0 * a + 1e-9);
    CHECK(metrics(bin).root_adv() == doctest::Approx(std::sqrt(double(n))).epsilon(1e-9));
  }
}

TEST_CASE("y-values stay bounded below the gap energy") {
  for (const Formula& phi : corpus::andor_corpus()) {
    if (phi.n() > 10) continue;
    const auto t = build_nand_tree(phi, BitString::ones(phi.n()));
    const double emax = gap_energy_bound(t.sigma_root, phi.n());
    for (int k = 1; k <= 4; ++k) {
      const double e = emax * k / 4;
      const auto y = y_values(t, e);
      for (int v = 1; v < t.vertex_count(); ++v) {
        CHECK(y[v] > 0.0);
        CHECK(y[v] * e * e <= 0.5 + 1e-12);
      }
    }
  }
}

TEST_CASE("solver certificates never exceed the solver value") {
  std::mt19937_64 rng(77);
  const char* gates[] = {"AND", "OR", "XOR", "MAJ3", "NAND"};
  for (int trial = 0; trial < 20; ++trial) {
    const std::string name = gates[trial % 5];
    const int k = name == "MAJ3" ? 3 : 2;
    const GatePtr g = reg().lookup(name, k);
    std::vector<double> s(k);
    for (auto& v : s) v = 0.5 + 2.5 * uniform_unit(rng);
    const MinimaxResult r = adv_minimax_solve(*g, s);
    const double lb = validate_adversary_matrix(*g, r.gamma, s);
    INFO(name << " trial " << trial);
    CHECK(lb <= r.value + 1e-3 * *std::max_element(s.begin(), s.end()));
    CHECK(r.lower <= r.upper + 1e-12);
  }
}
