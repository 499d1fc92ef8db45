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

#include <doctest.h>

#include "spanforge/errors.hpp"
#include "spanforge/verification.hpp"

using namespace spanforge;

namespace {

Formula parse(const char* s) {
  static const GateRegistry r = GateRegistry::builtin();
  return parse_formula(s, r);
}

ProgramPtr ptr(SpanProgram p) { return std::make_shared<const SpanProgram>(std::move(p)); }

const CheckItem& item(const VerificationReport& r, const std::string& prefix) {
  for (const CheckItem& it : r.items)
    if (it.what.rfind(prefix, 0) == 0) return it;
  FAIL("no item " << prefix);
  return r.items.front();
}

bool has_note(const VerificationReport& r, const std::string& text) {
  return std::any_of(r.notes.begin(), r.notes.end(),
                     [&](const std::string& n) { return n.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("report plumbing") {
  VerificationReport r;
  CHECK(r.bound("a", 1.0, 1.0 + 0.5e-8).pass);
  CHECK(r.pass);
  CHECK_FALSE(r.bound("b", 1.0 + 2e-8, 1.0).pass);
  CHECK_FALSE(r.pass);
  VerificationReport e;
  CHECK(e.equal("c", 1.0, 1.05, 0.1).pass);
  CHECK_FALSE(e.equal("d", 1.0, 1.2, 0.1).pass);
  VerificationReport m;
  m.notes = {"x"};
  VerificationReport o;
  o.notes = {"x", "y"};
  m.merge(o);
  CHECK(m.notes.size() == 2);
  const auto j = report_to_json(r);
  CHECK(j["pass"] == false);
  CHECK(j["items"].size() == 2);
}

TEST_CASE("canonical premise") {
  CHECK(check_canonical_premise(make_or(1, 1)).pass);
  CHECK_THROWS_AS(check_canonical_premise(make_and(1, 1)), NotCanonical);
  const double s[] = {4, 1};
  CHECK(check_canonical_premise(make_canonical_or2(4, 1), s).pass);
}

TEST_CASE("norm lemma") {
  const VerificationReport r = check_norm_lemma(make_or(1, 1));
  CHECK(r.pass);
  const CheckItem& it = item(r, "||abs(A_G)||");
  CHECK(it.lhs == doctest::Approx(1.758027).epsilon(1e-6));
  CHECK(it.rhs == doctest::Approx(4 * (1 + std::sqrt(2.0)) + 2).epsilon(1e-9));

  const double s[] = {4, 1};
  const VerificationReport c = check_norm_lemma(make_canonical_or2(4, 1), s);
  CHECK(c.pass);
  const double w = max_witness_size(make_canonical_or2(4, 1), s);
  CHECK(item(c, "||abs(A_G)||").rhs == doctest::Approx(4 * (1 + w / 1.0) + 2).epsilon(1e-12));

  // Constant-false program: no inputs, a single zero input string.
  Eigen::VectorXd t(1);
  t << 1;
  const VerificationReport z = check_norm_lemma(SpanProgram(0, t, {}));
  CHECK(item(z, "||abs(A_G)||").rhs == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("composition lemma") {
  const auto pa = as_composed(ptr(make_and(1, 1)));
  const ComposedProgram c =
      direct_sum_compose(ptr(make_or(2, 2)), {{0, {nullptr, pa}}, {1, {nullptr, pa}}});
  const VerificationReport one = check_compose_lemma(c, BitString::parse("1111"));
  CHECK(one.pass);
  // Both inner inputs are at their worst case, so the bound is attained.
  for (const CheckItem& it : one.items)
    if (it.what.find("sigma") != std::string::npos)
      CHECK(it.lhs == doctest::Approx(it.rhs).epsilon(1e-10));
  for (const CheckItem& it : check_compose_lemma(c, BitString::parse("1110")).items)
    if (it.what.find("sigma") != std::string::npos) CHECK(it.lhs <= it.rhs + 1e-12);
  CHECK(check_compose_lemma(c, BitString::parse("0101")).pass);

  const ComposedProgram e = direct_sum_compose(ptr(make_or(1, 1)), {});
  CHECK(check_compose_lemma(e, BitString::parse("10")).pass);
  CHECK(check_compose_lemma(e, BitString::parse("00")).pass);
}

TEST_CASE("direct-sum norm") {
  for (const Formula& phi : {balanced_andor(4), skew_andor(4)})
    CHECK(check_directsum_norm(*compose_formula(phi)).pass);
  const VerificationReport g = check_directsum_norm(*compose_formula(parse("OR(x1,x2)")));
  CHECK(g.pass);
  for (const CheckItem& it : g.items)
    if (it.what.find("2 max gate norm") != std::string::npos)
      CHECK(it.lhs == doctest::Approx(it.rhs / 2).epsilon(1e-12));
}

TEST_CASE("witness bounds") {
  const auto a = compose_formula(parse("AND(x1,x2)"));
  const VerificationReport r = check_witness_bounds(*a, BitString::parse("11"));
  CHECK(r.pass);
  const CheckItem& it = item(r, "v");
  CHECK(it.lhs == doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(it.lhs - it.rhs) < 1e-12);

  const auto b = compose_formula(balanced_andor(4));
  for (std::uint64_t i = 0; i < 16; ++i)
    CHECK(check_witness_bounds(*b, BitString::from_index(i, 4)).pass);
  CHECK_THROWS_AS(check_witness_bounds(direct_sum_compose(ptr(make_or(1, 1)), {}),
                                       BitString::parse("00")),
                  DomainError);
}

TEST_CASE("balance lemma") {
  for (int n : {2, 4, 8, 16, 32}) {
    const VerificationReport r = check_balance_lemma(balanced_andor(n));
    CHECK(r.pass);
    for (const CheckItem& it : r.items)
      if (it.what.find("ADV(v)/max child") != std::string::npos)
        CHECK(it.rhs == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  }
  const VerificationReport s = check_balance_lemma(parse("AND(x1,x2)"));
  CHECK(s.pass);
  CHECK(item(s, "sigma_minus").lhs == doctest::Approx(1 + 1 / std::sqrt(2.0)).epsilon(1e-12));
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    CHECK(check_balance_lemma(random_andor(40, seed)).pass);
}

TEST_CASE("gap lemma") {
  const Formula b4 = balanced_andor(4);
  for (std::uint64_t i = 0; i < 16; ++i) {
    const VerificationReport r = check_gap_lemma(b4, BitString::from_index(i, 4));
    CHECK(r.pass);
    CHECK(has_note(r, "E_max = 0.05"));
  }
  CHECK(has_note(check_gap_lemma(b4, BitString::parse("1111")), "no eigenvalues in range"));
  CHECK(calibrate_nand_tree(b4).pass);
  CHECK(calibrate_nand_tree(skew_andor(5)).pass);
}

TEST_CASE("input selection") {
  CHECK(check_inputs(3, 0).size() == 8);
  const auto big = check_inputs(20, 5);
  CHECK(big.size() == 18);
  CHECK(big[0] == BitString(20));
  CHECK(big[1] == BitString::ones(20));
  CHECK(check_inputs(20, 5)[7] == big[7]);
}
