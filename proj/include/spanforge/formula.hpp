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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spanforge {

class SpanProgram;

inline constexpr int kMaxArity = 8;
inline constexpr int kMaxExhaustiveVars = 24;

// Fixed-length input string. Position 0 is x1.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : bits_(n, 0) {}
  explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

  // Accepts '0'/'1' characters only.
  static BitString parse(std::string_view text);
  // Index in lexicographic order: x1 is the most significant bit.
  static BitString from_index(std::uint64_t index, std::size_t n);
  static BitString ones(std::size_t n) {
    return BitString(std::vector<std::uint8_t>(n, 1));
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  std::uint64_t index() const;
  BitString slice(std::size_t first, std::size_t count) const;
  BitString complement() const;
  std::string str() const;

  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Maps a per-input cost vector to ADV_s of a gate.
using CostFn = std::function<double(std::span<const double>)>;

struct ProgramPair {
  std::shared_ptr<const SpanProgram> positive;
  std::shared_ptr<const SpanProgram> dual;
};

enum class GateFamily { kAnd, kOr, kNand, kNor, kNot, kConst, kGeneric };

struct GateSpec {
  std::string name;
  int arity = 0;
  // 2^arity entries; row r has input j (0-based) at bit (arity-1-j).
  std::vector<std::uint8_t> truth_table;
  GateFamily family = GateFamily::kGeneric;
  std::optional<CostFn> cost_bound;
  std::optional<ProgramPair> programs;

  bool eval(std::uint32_t row) const { return truth_table[row] != 0; }
  bool depends_on(int input) const;
  int relevant_count() const;
  bool is_constant() const;
  // Exactly one 0 or exactly one 1 row: an AND or OR of literals.
  bool is_andor_type() const;
  std::string tt_string() const;

  static GateSpec make(std::string name, std::vector<std::uint8_t> tt);
};

using GatePtr = std::shared_ptr<const GateSpec>;

// Named gates. AND, OR, NAND and NOR are variadic (arity 2..8) and resolve
// to an arity-specific spec on lookup; the remaining builtins are NOT,
// CONST0, CONST1 and MAJ3.
class GateRegistry {
 public:
  static GateRegistry builtin();

  // Parses `gate NAME arity=K tt=BITS` lines. Blank lines and lines starting
  // with '#' are skipped. Optional `program=PATH dual=PATH` attach span
  // programs (JSON) resolved relative to `base_dir`.
  static GateRegistry parse(std::string_view text,
                            const std::string& base_dir = ".");
  void merge(const GateRegistry& other);

  void add(GateSpec spec);
  bool contains(const std::string& name) const;
  // Throws RegistryError for unknown names and ArityError on mismatch.
  GatePtr lookup(const std::string& name, int arity) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, GatePtr> fixed_;
  std::map<std::string, GateFamily> variadic_;
  mutable std::map<std::pair<std::string, int>, GatePtr> variadic_cache_;
};

GatePtr make_family_gate(GateFamily family, int arity);

struct Node {
  // -1 for gate nodes; 0-based input index for leaves.
  int var = -1;
  GatePtr gate;
  std::vector<int> children;

  bool is_leaf() const { return var >= 0; }
};

// Immutable read-once formula. Nodes are stored children-before-parents.
// A normalized formula can degenerate to a constant; such a formula has no
// nodes and reports is_constant().
class Formula {
 public:
  Formula(int n, std::vector<Node> nodes, int root);
  static Formula constant(int n, bool value);
  static Formula single_leaf(int n = 1, int var = 0);

  int n() const { return n_; }
  int root() const { return root_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_[id]; }
  bool is_constant() const { return constant_.has_value(); }
  bool constant_value() const { return constant_.value_or(false); }

  // -1 for the root.
  int parent(int id) const { return parents_[id]; }
  // Leaf count of the subtree rooted at id.
  int size(int id) const { return sizes_[id]; }
  int depth() const;
  int max_fanin() const;
  // Input indices read inside the subtree, left to right.
  std::vector<int> leaves(int id) const;

  bool evaluate(const BitString& x) const;
  bool evaluate_index(std::uint64_t index) const;
  // Value of every node on x (leaves included).
  std::vector<std::uint8_t> node_values(const BitString& x) const;
  // Packed truth table over all 2^n inputs, bit i of word i/64 is input i.
  std::vector<std::uint64_t> truth_table() const;

  bool is_andor() const;
  std::string to_string() const;

 private:
  Formula() = default;

  int n_ = 0;
  std::vector<Node> nodes_;
  int root_ = -1;
  std::optional<bool> constant_;
  std::vector<int> parents_;
  std::vector<int> sizes_;
};

// Recursive-descent parser for the formula DSL.
Formula parse_formula(std::string_view text, const GateRegistry& registry);

// Folds constants, single-input gates and NOT into neighbouring truth tables.
Formula normalize(const Formula& phi);

struct CostResult {
  double value = 0.0;
  std::string method;
};

using CostMap =
    std::function<CostResult(const GateSpec&, std::span<const double>)>;

struct FormulaMetrics {
  std::vector<int> size;
  std::vector<double> adv;
  std::vector<double> sigma_minus;
  std::vector<double> sigma_plus;
  std::vector<std::string> method;  // empty for leaves
  double beta = 1.0;
  int k_max = 0;
  int depth = 0;
  int n = 0;
  int root = -1;

  double root_adv() const { return adv[root]; }
  double root_sigma_minus() const { return sigma_minus[root]; }
  double root_sigma_plus() const { return sigma_plus[root]; }
};

FormulaMetrics metrics(const Formula& phi, const CostMap& costs);
// Uses default_cost_map() from the adversary module.
FormulaMetrics metrics(const Formula& phi);

// Replaces each AND/OR/NAND/NOR gate of fan-in k > 2 by a balanced binary
// tree, left half ceil(k/2). Other gates are kept.
Formula expand_fanin2(const Formula& phi);

// NAND representation of an AND-OR formula. Same-type chains are merged,
// so vertices may have more than two children.
struct NandVertex {
  int parent = -1;
  std::vector<int> children;
  int var = -1;          // input index for leaves
  bool negated = false;  // leaf reads the complemented input
  int size = 1;          // leaf count
  double sigma_minus = 1.0;
};

struct NandForm {
  int n = 0;
  std::vector<NandVertex> vertices;  // children before parents
  int root = -1;
  // f(x) = NAND(root) when true, else !NAND(root).
  bool root_positive = true;

  std::vector<std::uint8_t> nand_values(const BitString& x) const;
  bool evaluate(const BitString& x) const;
  double sigma_minus() const { return vertices[root].sigma_minus; }
  // The same tree over NAND_k gates, with NOT around complemented leaves
  // and, for negative root polarity, around the root.
  Formula as_formula() const;
};

NandForm to_nand_form(const Formula& phi);

// Formula families on n inputs.
Formula balanced_andor(int n);
Formula skew_andor(int n);
Formula random_andor(int n, std::uint64_t seed, int max_fanin = 2);

// Deterministic helpers over mt19937_64, independent of the standard
// library's distribution implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);
double uniform_unit(std::mt19937_64& rng);

}  // namespace spanforge
