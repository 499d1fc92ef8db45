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

#include <string>
#include <vector>

#include "spanforge/formula.hpp"
#include "spanforge/graph.hpp"
#include "spanforge/io.hpp"
#include "spanforge/span_program.hpp"

namespace spanforge {

inline constexpr double kLemmaTolerance = 1e-8;
inline constexpr double kZeroAmplitude = 1e-10;

// One measured inequality. `pass` means lhs <= rhs + tolerance unless the
// check states otherwise in `what`.
struct CheckItem {
  std::string what;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
  std::vector<double> data;  // witness vector or eigenvector on failure
};

struct VerificationReport {
  std::string lemma;
  std::string instance;
  double tolerance = kLemmaTolerance;
  bool pass = true;
  std::vector<CheckItem> items;
  std::vector<std::string> notes;

  // Appends an upper-bound item lhs <= rhs + tolerance.
  CheckItem& bound(std::string what, double lhs, double rhs);
  // Appends an item that passes when |lhs - rhs| <= tol.
  CheckItem& equal(std::string what, double lhs, double rhs, double tol);
  void merge(const VerificationReport& other);
};

io::Json report_to_json(const VerificationReport& r);

// P must be indexed so that V has one basis vector per false input, in
// lexicographic order. Throws NotCanonical otherwise. Empty s means unit
// costs.
VerificationReport check_canonical_premise(const SpanProgram& p,
                                           std::span<const double> s = {});
VerificationReport check_norm_lemma(const SpanProgram& p,
                                    std::span<const double> s = {});
// Every direct-sum node of the provenance tree on input x.
VerificationReport check_compose_lemma(const ComposedProgram& c, const BitString& x);
VerificationReport check_directsum_norm(const ComposedProgram& c);
// AND-OR compositions only.
VerificationReport check_witness_bounds(const ComposedProgram& c, const BitString& x);
VerificationReport check_balance_lemma(const Formula& phi);
VerificationReport check_gap_lemma(const Formula& phi, const BitString& x);
// Zero mode at the root iff NAND(root) = 0, for every input (n <= 10).
VerificationReport calibrate_nand_tree(const Formula& phi);

// Inputs a formula-level checker visits: every x for n <= 12, otherwise
// 0^n, 1^n and `extra` seeded random strings.
std::vector<BitString> check_inputs(int n, std::uint64_t seed, int extra = 16);

}  // namespace spanforge
