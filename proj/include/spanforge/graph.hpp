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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spanforge/formula.hpp"
#include "spanforge/span_program.hpp"

namespace spanforge {

// Bipartite graph of a span program. Rows are the V basis followed by one
// partner vertex per column; columns are the output vertex followed by the
// program's columns.
struct ProgramGraph {
  Eigen::MatrixXd biadj;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  // [[0, B], [B^T, 0]], row vertices first.
  Eigen::MatrixXd adjacency() const;
};

// B = [[t, A], [0, I]].
ProgramGraph biadjacency(const SpanProgram& p);
// Partner rows kept only for columns unavailable on x.
ProgramGraph input_graph(const SpanProgram& p, const BitString& x);
// A null vector of B(x) with nonzero output coordinate.
bool zero_witness_exists(const SpanProgram& p, const BitString& x);

struct AbsNorm {
  double norm = 0.0;       // sigma_max(|M|)
  double frobenius = 0.0;
};
AbsNorm abs_norm(const Eigen::MatrixXd& m);

// max_x wsizef times sigma_max(|B|). The composed overload takes the
// maximum from the gate-level recursion and scales to any n.
double query_estimate(const SpanProgram& p);
double query_estimate(const ComposedProgram& c);
double max_full_witness(const ComposedProgram& c);

// Weighted tree over the NAND form of an AND-OR formula on a fixed input.
// Vertex 0 is the auxiliary vertex above the root; vertex 1 is the root.
struct NandTree {
  enum Kind { kAux, kGate, kLeaf, kPendant };

  std::vector<int> parent;      // -1 for vertex 0
  std::vector<double> weight;   // edge weight to the parent
  std::vector<std::uint8_t> nand;
  std::vector<Kind> kind;
  std::vector<int> size;        // leaf count s_v
  std::vector<double> sigma;    // sigma_minus(v)
  std::vector<int> form_vertex; // NandForm index, -1 for aux and pendants
  std::vector<std::string> labels;
  double sigma_root = 1.0;      // sigma_minus of the formula
  int n = 0;
  bool root_positive = true;

  int vertex_count() const { return static_cast<int>(parent.size()); }
  // Without vertex 0 when include_aux is false; indices then shift by one.
  Eigen::MatrixXd adjacency(bool include_aux = true) const;
};

// Default w_out is n^(-1/4).
NandTree build_nand_tree(const Formula& phi, const BitString& x,
                         std::optional<double> w_out = std::nullopt);

// (8 sigma^3 n)^(-1/2).
double gap_energy_bound(double sigma_root, int n);
// y_v for every tree vertex (vertex 0 gets NaN). Throws DomainError for E
// outside [0, gap_energy_bound].
std::vector<double> y_values(const NandTree& t, double e);

// Zero eigenvector of the tree without vertex 0 with nonzero root entry.
bool root_zero_mode(const NandTree& t);

struct SpectralReport {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double gap = 0.0;       // smallest positive eigenvalue, 0 if none
  int zero_dim = 0;
  double max_residual = 0.0;  // max ||A u - lambda u|| / ||A||
  double t_est = 0.0;
};

// Eigenvalues within 1e-9 ||A|| of zero count as zero.
SpectralReport spectrum(const Eigen::MatrixXd& symmetric);

std::string to_dot(const ProgramGraph& g, const std::string& name = "G");
std::string to_dot(const NandTree& t, const std::string& name = "T");

}  // namespace spanforge
