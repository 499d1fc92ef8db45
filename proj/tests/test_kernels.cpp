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
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "spanforge/kernels.hpp"

using namespace spanforge::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

std::vector<std::uint64_t> random_words(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = rng();
  return v;
}

// Lengths straddle the vector width and the unrolled tails.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1023};

}  // namespace

TEST_CASE("isa selection honours SPANFORGE_ISA") {
  const char* env = std::getenv("SPANFORGE_ISA");
  if (env && std::string(env) == "scalar") CHECK(active().isa == Isa::kScalar);
  else if (avx2_table()) CHECK(active().isa == Isa::kAvx2);
  CHECK(isa_name(Isa::kScalar) == "scalar");
}

TEST_CASE("scalar reference kernels on hand values") {
  const auto& s = scalar_table();
  const double a[] = {1, 2, 3}, b[] = {4, -5, 6}, w[] = {1, 0.5, 2};
  CHECK(s.dot(a, b, 3) == doctest::Approx(12.0));
  CHECK(s.weighted_sq_norm(a, w, 3) == doctest::Approx(1 + 2 + 18));
  double y[] = {1, 1, 1};
  s.axpy(2.0, a, y, 3);
  CHECK(y[2] == 7.0);
  double acc[] = {0, 0, 0};
  s.triple_accumulate(w, a, b, acc, 3);
  CHECK(acc[1] == -5.0);
  CHECK(s.max_abs(b, 3) == 6.0);
  const std::uint64_t p[] = {0b1100}, q[] = {0b1010};
  std::uint64_t o[1];
  s.bit_andnot(p, q, o, 1);
  CHECK(o[0] == 0b0100);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const KernelTable* v = avx2_table();
  if (!v) {
    MESSAGE("AVX2 unavailable; equivalence skipped");
    return;
  }
  const auto& s = scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    const auto a = random_vec(rng, n), b = random_vec(rng, n), c = random_vec(rng, n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::abs(c[i]);
    const double tol = 1e-12 * static_cast<double>(n + 1);
    CHECK(std::abs(s.dot(a.data(), b.data(), n) - v->dot(a.data(), b.data(), n)) <= tol);
    CHECK(std::abs(s.weighted_sq_norm(a.data(), w.data(), n) -
                   v->weighted_sq_norm(a.data(), w.data(), n)) <= tol);
    CHECK(s.max_abs(a.data(), n) == v->max_abs(a.data(), n));

    auto y1 = b, y2 = b;
    s.axpy(0.37, a.data(), y1.data(), n);
    v->axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * 4);

    auto acc1 = c, acc2 = c;
    s.triple_accumulate(w.data(), a.data(), b.data(), acc1.data(), n);
    v->triple_accumulate(w.data(), a.data(), b.data(), acc2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(acc1[i] - acc2[i]) <= 1e-14);

    const auto p = random_words(rng, n), q = random_words(rng, n);
    std::vector<std::uint64_t> o1(n), o2(n);
    s.bit_and(p.data(), q.data(), o1.data(), n);
    v->bit_and(p.data(), q.data(), o2.data(), n);
    CHECK(o1 == o2);
    s.bit_or(p.data(), q.data(), o1.data(), n);
    v->bit_or(p.data(), q.data(), o2.data(), n);
    CHECK(o1 == o2);
    s.bit_xor(p.data(), q.data(), o1.data(), n);
    v->bit_xor(p.data(), q.data(), o2.data(), n);
    CHECK(o1 == o2);
    s.bit_andnot(p.data(), q.data(), o1.data(), n);
    v->bit_andnot(p.data(), q.data(), o2.data(), n);
    CHECK(o1 == o2);
  }
}

TEST_CASE("span wrappers use the active table") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  CHECK(dot(a, b) == doctest::Approx(35.0));
  CHECK(max_abs(b) == 5.0);
  CHECK(weighted_sq_norm(a, b) == doctest::Approx(5 + 16 + 27 + 32 + 25));
  std::vector<double> y(5, 0.0);
  axpy(-1.0, a, y);
  CHECK(y[4] == -5.0);
}
