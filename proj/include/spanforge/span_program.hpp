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

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spanforge/formula.hpp"

namespace spanforge {

inline constexpr double kRankCutoff = 1e-10;

// Input index (j, b): the column is available when x_j == b. j is 0-based.
struct InputIndex {
  int var = 0;
  bool value = true;

  bool operator==(const InputIndex&) const = default;
};

struct SpanColumn {
  Eigen::VectorXd vector;
  std::optional<InputIndex> input;  // nullopt for free columns
  std::string label;
};

// Real span program. Columns are kept in canonical order: free columns
// first, then grouped by (j, b) with j ascending and b = 0 before b = 1.
class SpanProgram {
 public:
  SpanProgram(int n, Eigen::VectorXd target, std::vector<SpanColumn> columns);

  int n() const { return n_; }
  int dim() const { return static_cast<int>(target_.size()); }
  const Eigen::VectorXd& target() const { return target_; }
  // dim x size()
  const Eigen::MatrixXd& matrix() const { return a_; }
  int size() const { return static_cast<int>(tags_.size()); }
  const std::optional<InputIndex>& tag(int col) const { return tags_[col]; }
  const std::string& label(int col) const { return labels_[col]; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool is_free(int col) const { return !tags_[col].has_value(); }
  int free_count() const;
  bool strict() const { return free_count() == 0; }
  bool monotone() const;
  bool available(int col, const BitString& x) const;
  std::vector<int> columns_for(int var, bool value) const;

 private:
  int n_;
  Eigen::VectorXd target_;
  Eigen::MatrixXd a_;
  std::vector<std::optional<InputIndex>> tags_;
  std::vector<std::string> labels_;
};

using ProgramPtr = std::shared_ptr<const SpanProgram>;

// Weighted witness problems on explicit column sets. These are the kernels
// behind witness_size and the per-gate recursion.
namespace solver {

struct QuadWitness {
  Eigen::VectorXd w;       // coefficients over `avail` (1-case) or w' (0-case)
  double objective = 0.0;  // weighted part only
  double residual = 0.0;
};

int numeric_rank(const Eigen::MatrixXd& m);
bool in_span(const Eigen::MatrixXd& a, std::span<const int> cols,
             const Eigen::VectorXd& t);

// min sum_i weights[i] w_i^2 subject to sum_i w_i a_{cols[i]} = t.
QuadWitness min_one_witness(const Eigen::MatrixXd& a, const Eigen::VectorXd& t,
                            std::span<const int> cols,
                            std::span<const double> weights);

// min norm_weight |w'|^2 + sum_i weights[i] <a_{unavail[i]}, w'>^2 subject to
// <t, w'> = 1 and w' orthogonal to every column in avail.
QuadWitness min_zero_witness(const Eigen::MatrixXd& a, const Eigen::VectorXd& t,
                             std::span<const int> avail,
                             std::span<const int> unavail,
                             std::span<const double> weights, double norm_weight);

}  // namespace solver

enum class WitnessCase { kZero, kOne };

struct WitnessResult {
  bool value = false;
  double size = 0.0;
  double full_size = 0.0;
  // 1-case: coefficients over all columns (zero off I(x)). 0-case: w' in V.
  Eigen::VectorXd witness;
  double residual = 0.0;

  WitnessCase witness_case() const {
    return value ? WitnessCase::kOne : WitnessCase::kZero;
  }
};

// P_AND(s1, s2) and P_OR(s1, s2) with alpha_j = eps_j = (s_j/(s1+s2))^(1/4).
SpanProgram make_and(double s1, double s2);
SpanProgram make_or(double s1, double s2);
// Canonical-form OR_2 program optimal for costs (s1, s2).
SpanProgram make_canonical_or2(double s1, double s2);
// One input read directly: t = 1, v = 1 in I_{1,value}.
SpanProgram make_literal(bool value = true);

bool eval_span(const SpanProgram& p, const BitString& x);

// Empty `s` means unit costs.
WitnessResult witness_size(const SpanProgram& p, const BitString& x,
                           std::span<const double> s = {});
WitnessResult full_witness_size(const SpanProgram& p, const BitString& x,
                                std::span<const double> s = {});

// max over all inputs, exhaustive.
double max_witness_size(const SpanProgram& p, std::span<const double> s = {},
                        bool full = false);

// Where a column of a composed program came from.
struct ColumnOrigin {
  enum Family { kOuterFree, kLink, kInnerFree, kOuterInput, kInnerInput };
  Family family = kOuterFree;
  int outer_col = -1;
  int inner_col = -1;  // column of the inner program, -1 otherwise
};

struct ComposedProgram;
using ComposedPtr = std::shared_ptr<const ComposedProgram>;

struct Provenance {
  ProgramPtr outer;
  std::vector<int> subset;  // S, 0-based outer inputs
  // inner[j][c] for j in S; null when unused.
  std::map<int, std::array<ComposedPtr, 2>> inners;
  // First composed input of outer input j, and its block length.
  std::vector<int> offset;
  std::vector<int> width;
  std::vector<ColumnOrigin> origin;  // per composed column
  // Design weights r_j (inner witness sizes); empty when not recorded.
  std::vector<double> r;
  int formula_node = -1;
};

struct ComposedProgram {
  SpanProgram program;
  Provenance prov;
  std::shared_ptr<const Formula> formula;  // set by compose_formula
  // Composed input position -> variable index, when remapped.
  std::vector<int> var_of_input;
};

// Treats a plain program as a composition with S empty.
ComposedPtr as_composed(ProgramPtr p);

ComposedProgram direct_sum_compose(
    ProgramPtr outer, const std::map<int, std::array<ComposedPtr, 2>>& inners);

// Recursive direct-sum composition along a normalized fan-in-2 AND-OR
// formula, gate weights equal to subtree sizes. Generic gates use their
// attached positive program.
ComposedPtr compose_formula(const Formula& phi);

// Per-provenance-node witness sizes obtained by solving only the gate-level
// problems, with children's sizes as costs.
struct GateSolve {
  bool value = false;
  double size = 0.0;
  double full_size = 0.0;
  int formula_node = -1;
  int width = 0;  // inputs under this node
};

// Preorder over the provenance tree, root first.
std::vector<GateSolve> witness_recursion(const ComposedProgram& c,
                                         const BitString& x,
                                         std::span<const double> s = {});

struct CaseMaxima {
  // Indexed by output value; NaN when the value is unreachable.
  double size[2];
  double full_size[2];
};

// Exact max over inputs of the recursion above, per output value, using
// monotonicity of the gate problems in their costs. Preorder like
// witness_recursion.
std::vector<CaseMaxima> max_witness_recursion(const ComposedProgram& c);

}  // namespace spanforge
