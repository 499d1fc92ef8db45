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
#include <bit>
#include <cassert>
#include <cctype>
#include <cmath>
#include <sstream>

#include "spanforge/errors.hpp"
#include "spanforge/formula.hpp"
#include "spanforge/kernels.hpp"

namespace spanforge {

// ---------------------------------------------------------------- BitString

BitString BitString::parse(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      throw DomainError("input string must contain only 0 and 1, got '" +
                        std::string(text) + "'");
    bits.push_back(c == '1' ? 1 : 0);
  }
  return BitString(std::move(bits));
}

BitString BitString::from_index(std::uint64_t index, std::size_t n) {
  BitString x(n);
  for (std::size_t i = 0; i < n; ++i) x.bits_[i] = (index >> (n - 1 - i)) & 1U;
  return x;
}

std::uint64_t BitString::index() const {
  std::uint64_t r = 0;
  for (auto b : bits_) r = (r << 1) | b;
  return r;
}

BitString BitString::slice(std::size_t first, std::size_t count) const {
  return BitString(std::vector<std::uint8_t>(bits_.begin() + first,
                                             bits_.begin() + first + count));
}

BitString BitString::complement() const {
  BitString r = *this;
  for (auto& b : r.bits_) b ^= 1U;
  return r;
}

std::string BitString::str() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

// ---------------------------------------------------------------- GateSpec

bool GateSpec::depends_on(int input) const {
  const std::uint32_t mask = 1U << (arity - 1 - input);
  for (std::uint32_t r = 0; r < truth_table.size(); ++r)
    if ((r & mask) == 0 && truth_table[r] != truth_table[r | mask]) return true;
  return false;
}

int GateSpec::relevant_count() const {
  int c = 0;
  for (int j = 0; j < arity; ++j) c += depends_on(j) ? 1 : 0;
  return c;
}

bool GateSpec::is_constant() const { return relevant_count() == 0; }

bool GateSpec::is_andor_type() const {
  if (arity < 2) return false;
  const auto ones = std::count(truth_table.begin(), truth_table.end(), 1);
  return ones == 1 || ones == static_cast<long>(truth_table.size()) - 1;
}

std::string GateSpec::tt_string() const {
  std::string s;
  for (auto b : truth_table) s.push_back(b ? '1' : '0');
  return s;
}

GateSpec GateSpec::make(std::string name, std::vector<std::uint8_t> tt) {
  const auto len = tt.size();
  if (len == 0 || !std::has_single_bit(len))
    throw RegistryError("truth table length must be a power of two");
  GateSpec g;
  g.name = std::move(name);
  g.arity = std::countr_zero(len);
  if (g.arity > kMaxArity)
    throw RegistryError("gate " + g.name + ": arity above " +
                        std::to_string(kMaxArity));
  g.truth_table = std::move(tt);
  return g;
}

namespace {

double andor_cost(std::span<const double> s) {
  double acc = 0.0;
  for (double v : s) acc += v * v;
  return std::sqrt(acc);
}

std::vector<std::uint8_t> family_table(GateFamily family, int arity) {
  const std::size_t rows = std::size_t{1} << arity;
  std::vector<std::uint8_t> tt(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const bool all = r == rows - 1;
    const bool any = r != 0;
    switch (family) {
      case GateFamily::kAnd: tt[r] = all; break;
      case GateFamily::kOr: tt[r] = any; break;
      case GateFamily::kNand: tt[r] = !all; break;
      case GateFamily::kNor: tt[r] = !any; break;
      default: break;
    }
  }
  return tt;
}

std::string family_name(GateFamily f) {
  switch (f) {
    case GateFamily::kAnd: return "AND";
    case GateFamily::kOr: return "OR";
    case GateFamily::kNand: return "NAND";
    case GateFamily::kNor: return "NOR";
    case GateFamily::kNot: return "NOT";
    case GateFamily::kConst: return "CONST";
    case GateFamily::kGeneric: return "GATE";
  }
  return "GATE";
}

std::optional<GateFamily> recognize_family(const std::vector<std::uint8_t>& tt,
                                           int arity) {
  if (arity < 2) return std::nullopt;
  for (auto f : {GateFamily::kAnd, GateFamily::kOr, GateFamily::kNand,
                 GateFamily::kNor})
    if (family_table(f, arity) == tt) return f;
  return std::nullopt;
}

}  // namespace

GatePtr make_family_gate(GateFamily family, int arity) {
  if (arity < 2 || arity > kMaxArity)
    throw ArityError(family_name(family) + " takes 2.." +
                     std::to_string(kMaxArity) + " inputs, got " +
                     std::to_string(arity));
  GateSpec g = GateSpec::make(family_name(family), family_table(family, arity));
  g.family = family;
  g.cost_bound = CostFn(andor_cost);
  return std::make_shared<const GateSpec>(std::move(g));
}

// ---------------------------------------------------------------- registry

GateRegistry GateRegistry::builtin() {
  GateRegistry r;
  for (auto f : {GateFamily::kAnd, GateFamily::kOr, GateFamily::kNand,
                 GateFamily::kNor})
    r.variadic_[family_name(f)] = f;
  GateSpec not_gate = GateSpec::make("NOT", {1, 0});
  not_gate.family = GateFamily::kNot;
  not_gate.cost_bound = CostFn([](std::span<const double> s) { return s[0]; });
  r.add(std::move(not_gate));
  for (int v = 0; v < 2; ++v) {
    GateSpec c = GateSpec::make("CONST" + std::to_string(v),
                                {static_cast<std::uint8_t>(v)});
    c.family = GateFamily::kConst;
    r.add(std::move(c));
  }
  r.add(GateSpec::make("MAJ3", {0, 0, 0, 1, 0, 1, 1, 1}));
  return r;
}

void GateRegistry::add(GateSpec spec) {
  if (variadic_.count(spec.name))
    throw RegistryError("gate " + spec.name + " shadows a builtin family");
  const std::string name = spec.name;
  fixed_[name] = std::make_shared<const GateSpec>(std::move(spec));
}

void GateRegistry::merge(const GateRegistry& other) {
  for (const auto& [name, g] : other.fixed_) fixed_[name] = g;
  for (const auto& [name, f] : other.variadic_) variadic_[name] = f;
}

bool GateRegistry::contains(const std::string& name) const {
  return fixed_.count(name) || variadic_.count(name);
}

GatePtr GateRegistry::lookup(const std::string& name, int arity) const {
  if (auto it = variadic_.find(name); it != variadic_.end()) {
    auto key = std::make_pair(name, arity);
    if (auto c = variadic_cache_.find(key); c != variadic_cache_.end())
      return c->second;
    GatePtr g = make_family_gate(it->second, arity);
    variadic_cache_[key] = g;
    return g;
  }
  auto it = fixed_.find(name);
  if (it == fixed_.end()) throw RegistryError("unknown gate '" + name + "'");
  if (it->second->arity != arity)
    throw ArityError("gate " + name + " takes " +
                     std::to_string(it->second->arity) + " inputs, got " +
                     std::to_string(arity));
  return it->second;
}

std::vector<std::string> GateRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [n, f] : variadic_) out.push_back(n);
  for (const auto& [n, g] : fixed_) out.push_back(n);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- Formula

Formula::Formula(int n, std::vector<Node> nodes, int root)
    : n_(n), nodes_(std::move(nodes)), root_(root) {
  if (n_ < 0) throw DomainError("negative input count");
  if (nodes_.empty() || root_ < 0 || root_ >= static_cast<int>(nodes_.size()))
    throw DomainError("formula has no root");
  parents_.assign(nodes_.size(), -1);
  sizes_.assign(nodes_.size(), 0);
  std::vector<char> seen(n_, 0);
  std::vector<char> has_parent(nodes_.size(), 0);
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) {
    const Node& nd = nodes_[id];
    if (nd.is_leaf()) {
      if (nd.var >= n_) throw DomainError("leaf index out of range");
      if (seen[nd.var])
        throw ReadOnceError("variable x" + std::to_string(nd.var + 1) +
                            " appears more than once");
      seen[nd.var] = 1;
      sizes_[id] = 1;
      continue;
    }
    if (!nd.gate) throw DomainError("gate node without gate");
    if (static_cast<int>(nd.children.size()) != nd.gate->arity)
      throw ArityError("gate " + nd.gate->name + " arity mismatch");
    for (int c : nd.children) {
      if (c < 0 || c >= id) throw DomainError("children must precede parents");
      if (has_parent[c]) throw DomainError("node shared by two parents");
      has_parent[c] = 1;
      parents_[c] = id;
      sizes_[id] += sizes_[c];
    }
  }
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id)
    if (id != root_ && !has_parent[id])
      throw DomainError("unreachable formula node");
}

Formula Formula::constant(int n, bool value) {
  Formula f;
  f.n_ = n;
  f.constant_ = value;
  return f;
}

Formula Formula::single_leaf(int n, int var) {
  return Formula(n, {Node{var, nullptr, {}}}, 0);
}

int Formula::depth() const {
  if (is_constant()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  for (int id = 0; id < static_cast<int>(nodes_.size()); ++id)
    for (int c : nodes_[id].children) d[id] = std::max(d[id], d[c] + 1);
  return d[root_];
}

int Formula::max_fanin() const {
  int k = 0;
  for (const auto& nd : nodes_)
    k = std::max(k, static_cast<int>(nd.children.size()));
  return k;
}

std::vector<int> Formula::leaves(int id) const {
  std::vector<int> out;
  std::vector<int> stack{id};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    const Node& nd = nodes_[v];
    if (nd.is_leaf()) {
      out.push_back(nd.var);
      continue;
    }
    for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it)
      stack.push_back(*it);
  }
  return out;
}

std::vector<std::uint8_t> Formula::node_values(const BitString& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw DomainError("input length " + std::to_string(x.size()) +
                      " does not match n = " + std::to_string(n_));
  std::vector<std::uint8_t> val(nodes_.size(), 0);
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& nd = nodes_[id];
    if (nd.is_leaf()) {
      val[id] = x[nd.var];
      continue;
    }
    std::uint32_t row = 0;
    for (int c : nd.children) row = (row << 1) | val[c];
    val[id] = nd.gate->eval(row);
  }
  return val;
}

bool Formula::evaluate(const BitString& x) const {
  if (static_cast<int>(x.size()) != n_)
    throw DomainError("input length " + std::to_string(x.size()) +
                      " does not match n = " + std::to_string(n_));
  if (is_constant()) return *constant_;
  return node_values(x)[root_] != 0;
}

bool Formula::evaluate_index(std::uint64_t index) const {
  return evaluate(BitString::from_index(index, n_));
}

std::vector<std::uint64_t> Formula::truth_table() const {
  if (n_ > kMaxExhaustiveVars)
    throw DomainError("truth table limited to n <= " +
                      std::to_string(kMaxExhaustiveVars));
  const std::uint64_t rows = std::uint64_t{1} << n_;
  const std::size_t words = (rows + 63) / 64;
  const std::uint64_t tail =
      rows % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rows) - 1;
  std::vector<std::uint64_t> ones(words, ~std::uint64_t{0});
  ones.back() = tail;
  if (is_constant()) {
    if (*constant_) return ones;
    return std::vector<std::uint64_t>(words, 0);
  }
  const auto& k = kernels::active();
  std::vector<std::vector<std::uint64_t>> tab(nodes_.size());
  std::vector<std::uint64_t> lit(words), term(words);
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& nd = nodes_[id];
    auto& out = tab[id];
    out.assign(words, 0);
    if (nd.is_leaf()) {
      const int shift = n_ - 1 - nd.var;
      for (std::uint64_t i = 0; i < rows; ++i)
        if ((i >> shift) & 1U) out[i / 64] |= std::uint64_t{1} << (i % 64);
      continue;
    }
    const GateSpec& g = *nd.gate;
    const auto fold = [&](bool conj) {
      out = tab[nd.children[0]];
      for (std::size_t j = 1; j < nd.children.size(); ++j)
        (conj ? k.bit_and : k.bit_or)(out.data(), tab[nd.children[j]].data(),
                                      out.data(), words);
    };
    switch (g.family) {
      case GateFamily::kAnd: fold(true); continue;
      case GateFamily::kOr: fold(false); continue;
      case GateFamily::kNand:
        fold(true);
        k.bit_xor(out.data(), ones.data(), out.data(), words);
        continue;
      case GateFamily::kNor:
        fold(false);
        k.bit_xor(out.data(), ones.data(), out.data(), words);
        continue;
      default: break;
    }
    // Sum of minterms.
    for (std::uint32_t r = 0; r < g.truth_table.size(); ++r) {
      if (!g.eval(r)) continue;
      term = ones;
      for (int j = 0; j < g.arity; ++j) {
        const auto& in = tab[nd.children[j]];
        if ((r >> (g.arity - 1 - j)) & 1U)
          k.bit_and(term.data(), in.data(), term.data(), words);
        else
          k.bit_andnot(term.data(), in.data(), term.data(), words);
      }
      k.bit_or(out.data(), term.data(), out.data(), words);
    }
  }
  return tab[root_];
}

bool Formula::is_andor() const {
  if (is_constant()) return false;
  for (const auto& nd : nodes_)
    if (!nd.is_leaf() && nd.gate->family != GateFamily::kAnd &&
        nd.gate->family != GateFamily::kOr)
      return false;
  return true;
}

std::string Formula::to_string() const {
  if (is_constant()) return *constant_ ? "CONST1()" : "CONST0()";
  std::vector<std::string> text(nodes_.size());
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& nd = nodes_[id];
    if (nd.is_leaf()) {
      text[id] = "x" + std::to_string(nd.var + 1);
      continue;
    }
    std::string s = nd.gate->name + "(";
    for (std::size_t j = 0; j < nd.children.size(); ++j) {
      if (j) s += ",";
      s += text[nd.children[j]];
    }
    text[id] = s + ")";
  }
  return text[root_];
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const GateRegistry& reg)
      : text_(text), reg_(reg) {}

  Formula run() {
    skip_ws();
    const int root = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    int n = 0;
    for (const auto& nd : nodes_) n = std::max(n, nd.var + 1);
    std::vector<char> seen(n, 0);
    for (const auto& nd : nodes_)
      if (nd.is_leaf()) seen[nd.var] = 1;
    for (int j = 0; j < n; ++j)
      if (!seen[j])
        throw ReadOnceError("variable indices are not contiguous: x" +
                            std::to_string(j + 1) + " is missing");
    return Formula(n, nodes_, root);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_), pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  int expr() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == 'x') return var();
    if (c >= 'A' && c <= 'Z') return gate();
    fail(std::string("unexpected character '") + c + "'");
  }

  int var() {
    const std::size_t start = pos_;
    ++pos_;
    if (pos_ >= text_.size() || text_[pos_] < '1' || text_[pos_] > '9')
      fail("variable index must start with a digit 1-9");
    long long idx = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      idx = idx * 10 + (text_[pos_] - '0');
      if (idx > (1 << 20)) fail("variable index too large");
      ++pos_;
    }
    const int v = static_cast<int>(idx) - 1;
    if (used_.count(v)) {
      throw ReadOnceError("read-once violation: x" + std::to_string(idx) +
                          " repeated at offset " + std::to_string(start));
    }
    used_.insert({v, 0});
    nodes_.push_back(Node{v, nullptr, {}});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int gate() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isupper(static_cast<unsigned char>(text_[pos_])) ||
            std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (!reg_.contains(name)) {
      pos_ = start;
      throw RegistryError("unknown gate '" + name + "' at offset " +
                          std::to_string(start));
    }
    expect('(');
    std::vector<int> kids;
    if (!peek(')')) {
      kids.push_back(expr());
      while (peek(',')) {
        ++pos_;
        kids.push_back(expr());
      }
    }
    expect(')');
    GatePtr g = reg_.lookup(name, static_cast<int>(kids.size()));
    nodes_.push_back(Node{-1, std::move(g), std::move(kids)});
    return static_cast<int>(nodes_.size()) - 1;
  }

  std::string_view text_;
  const GateRegistry& reg_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
  std::map<int, int> used_;
};

}  // namespace

Formula parse_formula(std::string_view text, const GateRegistry& registry) {
  return Parser(text, registry).run();
}

// ---------------------------------------------------------------- normalize

namespace {

std::string hex_table(const std::vector<std::uint8_t>& tt) {
  std::string bits;
  for (auto b : tt) bits.push_back(b ? '1' : '0');
  while (bits.size() % 4) bits.insert(bits.begin(), '0');
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int v = std::stoi(bits.substr(i, 4), nullptr, 2);
    out.push_back("0123456789ABCDEF"[v]);
  }
  return out;
}

GatePtr complement_gate(const GatePtr& g) {
  std::vector<std::uint8_t> tt = g->truth_table;
  for (auto& b : tt) b ^= 1U;
  if (auto f = recognize_family(tt, g->arity)) return make_family_gate(*f, g->arity);
  GateSpec c = GateSpec::make("NOT_" + g->name, std::move(tt));
  c.cost_bound = g->cost_bound;
  if (g->programs) c.programs = ProgramPair{g->programs->dual, g->programs->positive};
  return std::make_shared<const GateSpec>(std::move(c));
}

struct Folded {
  enum Kind { kConst, kLit, kGate } kind = kConst;
  bool value = false;   // kConst
  int var = -1;         // kLit
  bool negated = false; // kLit
  int node = -1;        // kGate, index into Normalizer::out
};

class Normalizer {
 public:
  explicit Normalizer(const Formula& phi) : phi_(phi) {}

  Formula run() {
    if (phi_.is_constant()) return phi_;
    std::vector<Folded> res(phi_.nodes().size());
    for (std::size_t id = 0; id < phi_.nodes().size(); ++id) {
      const Node& nd = phi_.node(static_cast<int>(id));
      if (nd.is_leaf()) {
        res[id].kind = Folded::kLit;
        res[id].var = nd.var;
        continue;
      }
      std::vector<Folded> kids;
      for (int c : nd.children) kids.push_back(res[c]);
      res[id] = fold_gate(nd.gate, kids);
    }
    const Folded& r = res[phi_.root()];
    switch (r.kind) {
      case Folded::kConst: return Formula::constant(phi_.n(), r.value);
      case Folded::kLit: {
        out_.clear();
        const int leaf = leaf_node(r.var);
        if (!r.negated) return Formula(phi_.n(), out_, leaf);
        GatePtr notg = GateRegistry::builtin().lookup("NOT", 1);
        out_.push_back(Node{-1, notg, {leaf}});
        return Formula(phi_.n(), out_, static_cast<int>(out_.size()) - 1);
      }
      case Folded::kGate: return compact(r.node);
    }
    return phi_;
  }

 private:
  int leaf_node(int var) {
    out_.push_back(Node{var, nullptr, {}});
    return static_cast<int>(out_.size()) - 1;
  }

  Folded fold_gate(const GatePtr& g, const std::vector<Folded>& kids) {
    const int k = g->arity;
    // Inputs that survive constant substitution.
    std::vector<int> live;
    for (int j = 0; j < k; ++j)
      if (kids[j].kind != Folded::kConst) live.push_back(j);
    const int m = static_cast<int>(live.size());
    bool changed = m != k;
    std::vector<std::uint8_t> tt(std::size_t{1} << m);
    for (std::uint32_t r = 0; r < tt.size(); ++r) {
      std::uint32_t row = 0;
      int li = 0;
      for (int j = 0; j < k; ++j) {
        bool bit;
        if (kids[j].kind == Folded::kConst) {
          bit = kids[j].value;
        } else {
          bit = (r >> (m - 1 - li)) & 1U;
          if (kids[j].kind == Folded::kLit && kids[j].negated) bit = !bit;
          ++li;
        }
        row = (row << 1) | (bit ? 1U : 0U);
      }
      tt[r] = g->truth_table[row];
    }
    for (int j : live)
      if (kids[j].kind == Folded::kLit && kids[j].negated) changed = true;
    // Drop inputs the restricted table ignores.
    GateSpec probe = GateSpec::make("probe", tt);
    std::vector<int> keep;
    for (int a = 0; a < m; ++a)
      if (probe.depends_on(a)) keep.push_back(a);
    bool projected = static_cast<int>(keep.size()) != m;
    if (projected) {
      const int q = static_cast<int>(keep.size());
      std::vector<std::uint8_t> red(std::size_t{1} << q);
      for (std::uint32_t r = 0; r < red.size(); ++r) {
        std::uint32_t row = 0;
        for (int b = 0; b < q; ++b)
          if ((r >> (q - 1 - b)) & 1U) row |= 1U << (m - 1 - keep[b]);
        red[r] = tt[row];
      }
      tt = std::move(red);
    }
    std::vector<Folded> ins;
    for (int a : keep) ins.push_back(kids[live[a]]);
    const int q = static_cast<int>(ins.size());

    if (q == 0) return Folded{Folded::kConst, tt[0] != 0, -1, false, -1};
    if (q == 1) {
      Folded r = ins[0];
      if (tt[0] == 0) return r;  // identity
      if (r.kind == Folded::kLit) {
        r.negated = !r.negated;
        return r;
      }
      out_[r.node].gate = complement_gate(out_[r.node].gate);
      return r;
    }
    GatePtr ng;
    if (auto f = recognize_family(tt, q)) {
      ng = make_family_gate(*f, q);
    } else if (!changed && !projected) {
      ng = g;
    } else {
      GateSpec d = GateSpec::make(g->name + "_T" + hex_table(tt), tt);
      if (!projected && m == k) d.cost_bound = g->cost_bound;
      ng = std::make_shared<const GateSpec>(std::move(d));
    }
    std::vector<int> children;
    for (const Folded& f : ins)
      children.push_back(f.kind == Folded::kLit ? leaf_node(f.var) : f.node);
    out_.push_back(Node{-1, std::move(ng), std::move(children)});
    return Folded{Folded::kGate, false, -1, false,
                  static_cast<int>(out_.size()) - 1};
  }

  Formula compact(int root) {
    std::vector<int> order;
    std::vector<std::pair<int, bool>> stack{{root, false}};
    while (!stack.empty()) {
      auto [v, done] = stack.back();
      stack.pop_back();
      if (done) {
        order.push_back(v);
        continue;
      }
      stack.push_back({v, true});
      const auto& ch = out_[v].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back({*it, false});
    }
    std::map<int, int> remap;
    std::vector<Node> nodes;
    for (int v : order) {
      Node nd = out_[v];
      for (int& c : nd.children) c = remap.at(c);
      remap[v] = static_cast<int>(nodes.size());
      nodes.push_back(std::move(nd));
    }
    return Formula(phi_.n(), std::move(nodes), remap.at(root));
  }

  const Formula& phi_;
  std::vector<Node> out_;
};

}  // namespace

Formula normalize(const Formula& phi) { return Normalizer(phi).run(); }

// ---------------------------------------------------------------- metrics

FormulaMetrics metrics(const Formula& phi, const CostMap& costs) {
  if (phi.is_constant()) throw DomainError("metrics of a constant formula");
  FormulaMetrics m;
  const std::size_t N = phi.nodes().size();
  m.size.assign(N, 1);
  m.adv.assign(N, 1.0);
  m.sigma_minus.assign(N, 1.0);
  m.sigma_plus.assign(N, 1.0);
  m.method.assign(N, "");
  m.n = phi.n();
  m.root = phi.root();
  m.k_max = phi.max_fanin();
  m.depth = phi.depth();
  for (std::size_t id = 0; id < N; ++id) {
    const Node& nd = phi.node(static_cast<int>(id));
    if (nd.is_leaf()) continue;
    std::vector<double> s;
    double smax = 0.0, smin = HUGE_VAL, sig_m = 0.0, sig_p = 0.0;
    int size = 0;
    for (int c : nd.children) {
      s.push_back(m.adv[c]);
      smax = std::max(smax, m.adv[c]);
      smin = std::min(smin, m.adv[c]);
      sig_m = std::max(sig_m, m.sigma_minus[c]);
      sig_p = std::max(sig_p, m.sigma_plus[c]);
      size += m.size[c];
    }
    CostResult cr = costs(*nd.gate, s);
    m.adv[id] = cr.value;
    m.method[id] = cr.method;
    m.size[id] = size;
    m.sigma_minus[id] = 1.0 / cr.value + sig_m;
    m.sigma_plus[id] = cr.value * cr.value + sig_p;
    if (nd.children.size() >= 2) m.beta = std::max(m.beta, smax / smin);
  }
  return m;
}

// ---------------------------------------------------------------- fan-in 2

Formula expand_fanin2(const Formula& phi) {
  if (phi.is_constant()) return phi;
  std::vector<Node> out;
  std::vector<int> map(phi.nodes().size(), -1);
  const auto push = [&](Node nd) {
    out.push_back(std::move(nd));
    return static_cast<int>(out.size()) - 1;
  };
  for (std::size_t id = 0; id < phi.nodes().size(); ++id) {
    const Node& nd = phi.node(static_cast<int>(id));
    if (nd.is_leaf()) {
      map[id] = push(nd);
      continue;
    }
    const GateFamily fam = nd.gate->family;
    const bool andor = fam == GateFamily::kAnd || fam == GateFamily::kOr ||
                       fam == GateFamily::kNand || fam == GateFamily::kNor;
    std::vector<int> kids;
    for (int c : nd.children) kids.push_back(map[c]);
    if (!andor || kids.size() <= 2) {
      map[id] = push(Node{-1, nd.gate, kids});
      continue;
    }
    const GateFamily inner =
        fam == GateFamily::kNand ? GateFamily::kAnd
        : fam == GateFamily::kNor ? GateFamily::kOr
                                  : fam;
    // Balanced split, left half ceil(k/2).
    std::function<int(std::size_t, std::size_t)> build =
        [&](std::size_t lo, std::size_t hi) -> int {
      if (hi - lo == 1) return kids[lo];
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      const int l = build(lo, mid);
      const int r = build(mid, hi);
      return push(Node{-1, make_family_gate(inner, 2), {l, r}});
    };
    const std::size_t mid = (kids.size() + 1) / 2;
    const int l = build(0, mid);
    const int r = build(mid, kids.size());
    map[id] = push(Node{-1, make_family_gate(fam, 2), {l, r}});
  }
  return Formula(phi.n(), std::move(out), map[phi.root()]);
}

// ---------------------------------------------------------------- NAND form

NandForm to_nand_form(const Formula& phi) {
  if (!phi.is_andor() && !(phi.nodes().size() == 1 && phi.node(0).is_leaf()))
    throw DomainError("to_nand_form needs an AND/OR formula");
  NandForm nf;
  nf.n = phi.n();
  // Polarity: OR vertices are positive (NAND(v) = f_v), AND vertices are
  // negative (NAND(v) = !f_v). A child whose polarity differs from the one
  // its parent needs is spliced into the parent.
  const auto positive = [&](int id) {
    return phi.node(id).gate->family == GateFamily::kOr;
  };
  std::function<int(int, bool)> emit = [&](int id, bool want_positive) -> int {
    const Node& nd = phi.node(id);
    if (nd.is_leaf()) {
      NandVertex v;
      v.var = nd.var;
      v.negated = !want_positive;
      nf.vertices.push_back(v);
      return static_cast<int>(nf.vertices.size()) - 1;
    }
    const bool pos = positive(id);
    const bool child_pos = !pos;
    std::vector<int> kids;
    std::function<void(int)> gather = [&](int c) {
      const Node& cn = phi.node(c);
      if (!cn.is_leaf() && positive(c) != child_pos) {
        for (int g : cn.children) gather(g);
        return;
      }
      kids.push_back(emit(c, child_pos));
    };
    for (int c : nd.children) gather(c);
    NandVertex v;
    v.children = kids;
    v.size = 0;
    double sig = 0.0;
    for (int c : kids) {
      v.size += nf.vertices[c].size;
      sig = std::max(sig, nf.vertices[c].sigma_minus);
    }
    v.sigma_minus = 1.0 / std::sqrt(static_cast<double>(v.size)) + sig;
    nf.vertices.push_back(v);
    const int me = static_cast<int>(nf.vertices.size()) - 1;
    for (int c : kids) nf.vertices[c].parent = me;
    (void)want_positive;
    return me;
  };
  const int r = phi.root();
  if (phi.node(r).is_leaf()) {
    nf.root = emit(r, true);
    nf.root_positive = true;
  } else {
    nf.root_positive = positive(r);
    nf.root = emit(r, nf.root_positive);
  }
  return nf;
}

std::vector<std::uint8_t> NandForm::nand_values(const BitString& x) const {
  std::vector<std::uint8_t> val(vertices.size(), 0);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const NandVertex& v = vertices[i];
    if (v.var >= 0) {
      val[i] = x[v.var] != v.negated;
      continue;
    }
    bool all = true;
    for (int c : v.children) all = all && val[c];
    val[i] = !all;
  }
  return val;
}

bool NandForm::evaluate(const BitString& x) const {
  const bool r = nand_values(x)[root] != 0;
  return root_positive ? r : !r;
}

Formula NandForm::as_formula() const {
  const GateRegistry reg = GateRegistry::builtin();
  const GatePtr notg = reg.lookup("NOT", 1);
  std::vector<Node> out;
  std::vector<int> map(vertices.size(), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const NandVertex& v = vertices[i];
    if (v.var >= 0) {
      out.push_back(Node{v.var, nullptr, {}});
      if (v.negated) {
        out.push_back(
            Node{-1, notg, {static_cast<int>(out.size()) - 1}});
      }
      map[i] = static_cast<int>(out.size()) - 1;
      continue;
    }
    std::vector<int> kids;
    for (int c : v.children) kids.push_back(map[c]);
    if (kids.size() == 1) {
      out.push_back(Node{-1, notg, kids});
    } else {
      out.push_back(Node{-1, make_family_gate(GateFamily::kNand,
                                              static_cast<int>(kids.size())),
                         kids});
    }
    map[i] = static_cast<int>(out.size()) - 1;
  }
  int root_id = map[root];
  if (!root_positive) {
    out.push_back(Node{-1, notg, {root_id}});
    root_id = static_cast<int>(out.size()) - 1;
  }
  return Formula(n, std::move(out), root_id);
}

// ---------------------------------------------------------------- families

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t v = rng();
    if (v < limit) return v % bound;
  }
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

class TreeBuilder {
 public:
  int leaf() {
    nodes_.push_back(Node{next_var_++, nullptr, {}});
    return static_cast<int>(nodes_.size()) - 1;
  }
  int gate(GateFamily f, std::vector<int> kids) {
    nodes_.push_back(Node{-1, make_family_gate(f, static_cast<int>(kids.size())),
                          std::move(kids)});
    return static_cast<int>(nodes_.size()) - 1;
  }
  Formula finish(int root) {
    return Formula(next_var_, std::move(nodes_), root);
  }

 private:
  std::vector<Node> nodes_;
  int next_var_ = 0;
};

void require_size(int n) {
  if (n < 1) throw DomainError("formula size must be at least 1");
}

}  // namespace

Formula balanced_andor(int n) {
  require_size(n);
  TreeBuilder b;
  std::function<int(int, bool)> rec = [&](int m, bool is_or) -> int {
    if (m == 1) return b.leaf();
    const int left = (m + 1) / 2;
    const int l = rec(left, !is_or);
    const int r = rec(m - left, !is_or);
    return b.gate(is_or ? GateFamily::kOr : GateFamily::kAnd, {l, r});
  };
  return b.finish(rec(n, true));
}

Formula skew_andor(int n) {
  require_size(n);
  TreeBuilder b;
  int cur = b.leaf();
  bool is_and = true;
  for (int i = 1; i < n; ++i) {
    const int l = b.leaf();
    cur = b.gate(is_and ? GateFamily::kAnd : GateFamily::kOr, {cur, l});
    is_and = !is_and;
  }
  return b.finish(cur);
}

Formula random_andor(int n, std::uint64_t seed, int max_fanin) {
  require_size(n);
  if (max_fanin < 2 || max_fanin > kMaxArity)
    throw DomainError("max_fanin must lie in 2..8");
  std::mt19937_64 rng(seed);
  TreeBuilder b;
  std::function<int(int)> rec = [&](int m) -> int {
    if (m == 1) return b.leaf();
    const int kmax = std::min(max_fanin, m);
    const int k = 2 + static_cast<int>(uniform_below(rng, kmax - 1));
    // Uniform composition of m into k positive parts: k-1 distinct cuts.
    std::vector<int> cuts(m - 1);
    for (int i = 0; i < m - 1; ++i) cuts[i] = i + 1;
    for (int i = 0; i < k - 1; ++i)
      std::swap(cuts[i], cuts[i + uniform_below(rng, m - 1 - i)]);
    cuts.resize(k - 1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> parts;
    int prev = 0;
    for (int c : cuts) {
      parts.push_back(c - prev);
      prev = c;
    }
    parts.push_back(m - prev);
    const bool is_or = uniform_below(rng, 2) == 1;
    std::vector<int> kids;
    for (int p : parts) kids.push_back(rec(p));
    return b.gate(is_or ? GateFamily::kOr : GateFamily::kAnd, std::move(kids));
  };
  return b.finish(rec(n));
}

}  // namespace spanforge
