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

// Brute-force minimax oracles for the adversary bound of small gates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

// max over pairs with g(x) != g(y) of 1 / sum_{x_j != y_j} sqrt(p_x(j) p_y(j)) / s_j.
// p[x][j]; tt[x]; input j of row x is bit (k-1-j).
inline double minimax_objective(const std::vector<std::uint8_t>& tt, int k,
                                const std::vector<std::vector<double>>& p,
                                const std::vector<double>& s) {
  double worst = 0.0;
  const int rows = 1 << k;
  for (int x = 0; x < rows; ++x)
    for (int y = x + 1; y < rows; ++y) {
      if (tt[x] == tt[y]) continue;
      double acc = 0.0;
      for (int j = 0; j < k; ++j) {
        const int bit = 1 << (k - 1 - j);
        if ((x & bit) != (y & bit)) acc += std::sqrt(p[x][j] * p[y][j]) / s[j];
      }
      worst = std::max(worst, acc > 0 ? 1.0 / acc : std::numeric_limits<double>::infinity());
    }
  return worst;
}

// Arity-2 gates: every row's distribution is (a, 1-a), a on a grid.
inline double minimax_grid2(const std::vector<std::uint8_t>& tt, const std::vector<double>& s,
                            int steps) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> p(4, std::vector<double>(2));
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; b <= steps; ++b)
      for (int c = 0; c <= steps; ++c)
        for (int d = 0; d <= steps; ++d) {
          const int v[4] = {a, b, c, d};
          for (int r = 0; r < 4; ++r) {
            p[r][0] = static_cast<double>(v[r]) / steps;
            p[r][1] = 1.0 - p[r][0];
          }
          best = std::min(best, minimax_objective(tt, 2, p, s));
        }
  return best;
}

// MAJ3 with unit costs. By symmetry 000 and 111 are uniform, and every other
// row puts weight a on its minority bit and (1-a)/2 on each majority bit.
inline double maj3_grid(int steps) {
  const std::vector<std::uint8_t> tt{0, 0, 0, 1, 0, 1, 1, 1};
  const std::vector<double> s(3, 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double a = static_cast<double>(i) / steps;
    std::vector<std::vector<double>> p(8, std::vector<double>(3, 1.0 / 3.0));
    for (int x = 1; x < 7; ++x) {
      const int ones = __builtin_popcount(static_cast<unsigned>(x));
      const int minority = ones == 1 ? 1 : 0;
      for (int j = 0; j < 3; ++j) {
        const int bit = (x >> (2 - j)) & 1;
        p[x][j] = bit == minority ? a : (1.0 - a) / 2.0;
      }
    }
    best = std::min(best, minimax_objective(tt, 3, p, s));
  }
  return best;
}

}  // namespace oracle
