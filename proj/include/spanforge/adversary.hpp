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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spanforge/formula.hpp"

namespace spanforge {

// sqrt(sum_j s_j^2): ADV_s of AND_k and OR_k.
double adv_closed_form_andor(std::span<const double> s);

struct MinimaxOptions {
  int restarts = 64;
  int iterations = 1500;
  double tolerance = 1e-3;  // absolute, on the s / max(s) scale
  std::uint64_t seed = 0;
};

struct MinimaxResult {
  double value = 0.0;  // upper bound attained by `p`
  double lower = 0.0;  // certified by `gamma`
  double upper = 0.0;
  // p[x][j]: distribution over inputs for each domain string x.
  std::vector<std::vector<double>> p;
  Eigen::MatrixXd gamma;
  int restarts_used = 0;
};

// ADV_s(g) = min_p max_{g(x) != g(y)} 1 / sum_{j: x_j != y_j}
// sqrt(p_x(j) p_y(j)) / s_j. Projected gradient ascent in sqrt(p)
// coordinates with smoothed minimum and restarts, bracketed by an explicit
// adversary matrix. Throws SolverError if the bracket stays wider than the
// tolerance.
MinimaxResult adv_minimax_solve(const GateSpec& g, std::span<const double> s,
                                const MinimaxOptions& opts = {});
double adv_minimax(const GateSpec& g, std::span<const double> s,
                   const MinimaxOptions& opts = {});

// Closed form for AND/OR-type gates, s_1 for one-input gates, minimax for
// other gates of arity <= 4. Throws DomainError past that.
CostMap default_cost_map(const MinimaxOptions& opts = {});

double adv_formula(const Formula& phi, const CostMap& costs);
double adv_formula(const Formula& phi);

// Returns ||Gamma|| after checking the zero pattern and
// ||Gamma o Delta_j|| <= s_j + slack. Throws InfeasibleCertificate listing
// every violated constraint.
double validate_adversary_matrix(const GateSpec& g, const Eigen::MatrixXd& gamma,
                                 std::span<const double> s,
                                 double slack = 1e-9);

// ||Gamma o Delta_j|| for each input j.
std::vector<double> masked_norms(const GateSpec& g, const Eigen::MatrixXd& gamma);

}  // namespace spanforge
