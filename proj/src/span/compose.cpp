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
#include <limits>
#include <numeric>

#include "spanforge/errors.hpp"
#include "spanforge/span_program.hpp"

namespace spanforge {
namespace {

int sort_key(const SpanColumn& c) {
  return c.input ? 2 * c.input->var + (c.input->value ? 1 : 0) : -1;
}

// Sorts columns the way SpanProgram does, carrying origins along.
ComposedProgram build(int n, Eigen::VectorXd t, std::vector<SpanColumn> cols,
                      std::vector<ColumnOrigin> origin, Provenance prov) {
  std::vector<std::size_t> perm(cols.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return sort_key(cols[a]) < sort_key(cols[b]);
  });
  std::vector<SpanColumn> sc;
  std::vector<ColumnOrigin> so;
  sc.reserve(cols.size());
  so.reserve(cols.size());
  for (std::size_t i : perm) {
    sc.push_back(std::move(cols[i]));
    so.push_back(origin[i]);
  }
  prov.origin = std::move(so);
  return ComposedProgram{SpanProgram(n, std::move(t), std::move(sc)),
                         std::move(prov), nullptr, {}};
}

std::vector<SpanColumn> columns_of(const SpanProgram& p) {
  std::vector<SpanColumn> out;
  for (int i = 0; i < p.size(); ++i)
    out.push_back({p.matrix().col(i), p.tag(i), p.label(i)});
  return out;
}

SpanProgram relabel(const SpanProgram& p, const std::string& prefix) {
  auto cols = columns_of(p);
  for (auto& c : cols) c.label = prefix + c.label;
  return SpanProgram(p.n(), p.target(), std::move(cols));
}

SpanProgram flip_tags(const SpanProgram& p) {
  auto cols = columns_of(p);
  for (auto& c : cols)
    if (c.input) c.input->value = !c.input->value;
  return SpanProgram(p.n(), p.target(), std::move(cols));
}

}  // namespace

ComposedPtr as_composed(ProgramPtr p) {
  Provenance prov;
  prov.outer = p;
  prov.offset.resize(p->n());
  std::iota(prov.offset.begin(), prov.offset.end(), 0);
  prov.width.assign(p->n(), 1);
  for (int i = 0; i < p->size(); ++i)
    prov.origin.push_back({p->is_free(i) ? ColumnOrigin::kOuterFree
                                         : ColumnOrigin::kOuterInput,
                           i, -1});
  return std::make_shared<const ComposedProgram>(
      ComposedProgram{*p, std::move(prov), nullptr, {}});
}

ComposedProgram direct_sum_compose(
    ProgramPtr outer, const std::map<int, std::array<ComposedPtr, 2>>& inners) {
  const SpanProgram& p = *outer;
  Provenance prov;
  prov.outer = outer;
  prov.offset.assign(p.n(), 0);
  prov.width.assign(p.n(), 1);
  for (const auto& [j, pair] : inners) {
    if (j < 0 || j >= p.n())
      throw DomainError("inner program for input " + std::to_string(j + 1) +
                        " outside 1.." + std::to_string(p.n()));
    if (!pair[0] && !pair[1]) continue;
    if (pair[0] && pair[1] && pair[0]->program.n() != pair[1]->program.n())
      throw DomainError("inner programs for input " + std::to_string(j + 1) +
                        " disagree on input count");
    for (int c = 0; c < 2; ++c)
      if (!pair[c] && !p.columns_for(j, c == 1).empty())
        throw DomainError(std::string(c == 0 ? "missing dual program"
                                             : "missing inner program") +
                          " for input " + std::to_string(j + 1));
    prov.subset.push_back(j);
    prov.inners[j] = pair;
    prov.width[j] = (pair[1] ? pair[1] : pair[0])->program.n();
  }
  int total = 0;
  for (int j = 0; j < p.n(); ++j) {
    prov.offset[j] = total;
    total += prov.width[j];
  }
  const auto linked = [&](int j) { return prov.inners.count(j) > 0; };

  // V first, then one block per link column in column order.
  std::vector<int> block(p.size(), -1);
  int dim = p.dim();
  for (int i = 0; i < p.size(); ++i) {
    const auto& tag = p.tag(i);
    if (tag && linked(tag->var)) {
      block[i] = dim;
      dim += prov.inners[tag->var][tag->value ? 1 : 0]->program.dim();
    }
  }
  Eigen::VectorXd t = Eigen::VectorXd::Zero(dim);
  t.head(p.dim()) = p.target();

  std::vector<SpanColumn> cols;
  std::vector<ColumnOrigin> origin;
  for (int i = 0; i < p.size(); ++i) {
    const auto& tag = p.tag(i);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v.head(p.dim()) = p.matrix().col(i);
    if (!tag) {
      cols.push_back({v, std::nullopt, p.label(i)});
      origin.push_back({ColumnOrigin::kOuterFree, i, -1});
      continue;
    }
    if (!linked(tag->var)) {
      cols.push_back({v, InputIndex{prov.offset[tag->var], tag->value}, p.label(i)});
      origin.push_back({ColumnOrigin::kOuterInput, i, -1});
      continue;
    }
    const SpanProgram& q = prov.inners[tag->var][tag->value ? 1 : 0]->program;
    v.segment(block[i], q.dim()) = -q.target();
    cols.push_back({v, std::nullopt, p.label(i)});
    origin.push_back({ColumnOrigin::kLink, i, -1});
    for (int k = 0; k < q.size(); ++k) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
      u.segment(block[i], q.dim()) = q.matrix().col(k);
      std::optional<InputIndex> in;
      if (q.tag(k))
        in = InputIndex{prov.offset[tag->var] + q.tag(k)->var, q.tag(k)->value};
      cols.push_back({u, in, p.label(i) + "/" + q.label(k)});
      origin.push_back({in ? ColumnOrigin::kInnerInput : ColumnOrigin::kInnerFree,
                        i, k});
    }
  }
  return build(total, std::move(t), std::move(cols), std::move(origin),
               std::move(prov));
}

// ---------------------------------------------------------------- formulas

namespace {

// Registry gates with an AND/OR-family truth table and no attached programs
// use the builtin gadgets.
GateFamily effective_family(const GateSpec& g) {
  if (g.family != GateFamily::kGeneric || g.programs || g.arity < 2) return g.family;
  for (auto f : {GateFamily::kAnd, GateFamily::kOr, GateFamily::kNand, GateFamily::kNor})
    if (make_family_gate(f, g.arity)->truth_table == g.truth_table) return f;
  return g.family;
}

class FormulaComposer {
 public:
  explicit FormulaComposer(const Formula& phi) : phi_(phi) {}

  ComposedPtr get(int id, int c) {
    auto& slot = memo_[{id, c}];
    if (!slot) slot = make(id, c);
    return slot;
  }

 private:
  ProgramPtr gate_program(int id, int c) {
    const Node& nd = phi_.node(id);
    const GateSpec& g = *nd.gate;
    const auto& ch = nd.children;
    const std::string prefix = "v" + std::to_string(id) + "/";
    const auto sz = [&](int k) { return static_cast<double>(phi_.size(ch[k])); };
    std::optional<SpanProgram> p;
    switch (effective_family(g)) {
      case GateFamily::kAnd:
      case GateFamily::kOr:
      case GateFamily::kNand:
      case GateFamily::kNor: {
        if (g.arity != 2)
          throw DomainError("gate " + g.name + " has fan-in " +
                            std::to_string(g.arity) +
                            "; composition needs fan-in 2");
        const bool and_like = g.family == GateFamily::kAnd || g.family == GateFamily::kNand;
        const bool negated = g.family == GateFamily::kNand || g.family == GateFamily::kNor;
        // The complement of AND is OR over complemented inputs, and vice versa.
        const bool use_and = (c == 1) != negated ? and_like : !and_like;
        SpanProgram base = use_and ? make_and(sz(0), sz(1)) : make_or(sz(0), sz(1));
        p = ((c == 1) != negated) ? base : flip_tags(base);
        break;
      }
      case GateFamily::kNot:
        p = make_literal(c == 0);
        break;
      default: {
        if (!g.programs || !(c == 1 ? g.programs->positive : g.programs->dual))
          throw DomainError(std::string(c == 1 ? "no span program" : "missing dual program") +
                            " attached to gate " + g.name);
        p = *(c == 1 ? g.programs->positive : g.programs->dual);
        if (p->n() != g.arity)
          throw DomainError("span program for gate " + g.name + " has " +
                            std::to_string(p->n()) + " inputs, expected " +
                            std::to_string(g.arity));
      }
    }
    return std::make_shared<const SpanProgram>(relabel(*p, prefix));
  }

  ComposedPtr make(int id, int c) {
    const Node& nd = phi_.node(id);
    if (nd.is_leaf()) {
      auto lit = std::make_shared<const SpanProgram>(make_literal(c == 1));
      return as_composed(lit);
    }
    ProgramPtr outer = gate_program(id, c);
    std::map<int, std::array<ComposedPtr, 2>> inners;
    for (std::size_t k = 0; k < nd.children.size(); ++k) {
      const int ch = nd.children[k];
      if (phi_.node(ch).is_leaf()) continue;
      std::array<ComposedPtr, 2> pair;
      for (int b = 0; b < 2; ++b)
        if (!outer->columns_for(static_cast<int>(k), b == 1).empty())
          pair[b] = get(ch, b);
      inners[static_cast<int>(k)] = pair;
    }
    ComposedProgram cp = direct_sum_compose(outer, inners);
    cp.prov.formula_node = id;
    for (int ch : nd.children) cp.prov.r.push_back(phi_.size(ch));
    return std::make_shared<const ComposedProgram>(std::move(cp));
  }

  const Formula& phi_;
  std::map<std::pair<int, int>, ComposedPtr> memo_;
};

}  // namespace

ComposedPtr compose_formula(const Formula& phi) {
  auto shared = std::make_shared<const Formula>(phi);
  if (phi.is_constant()) {
    Eigen::VectorXd t(1);
    t[0] = phi.constant_value() ? 0.0 : 1.0;
    auto p = std::make_shared<const SpanProgram>(phi.n(), t, std::vector<SpanColumn>{});
    Provenance prov;
    prov.outer = p;
    return std::make_shared<const ComposedProgram>(
        ComposedProgram{*p, std::move(prov), shared, {}});
  }
  FormulaComposer fc(phi);
  ComposedPtr local = fc.get(phi.root(), 1);
  const std::vector<int> vars = phi.leaves(phi.root());

  // Rename composed input positions to formula variables.
  const SpanProgram& lp = local->program;
  std::vector<SpanColumn> cols = columns_of(lp);
  for (auto& col : cols)
    if (col.input) col.input->var = vars[col.input->var];
  ComposedProgram out = build(phi.n(), lp.target(), std::move(cols),
                              local->prov.origin, local->prov);
  out.formula = shared;
  out.var_of_input = vars;
  return std::make_shared<const ComposedProgram>(std::move(out));
}

// ---------------------------------------------------------------- recursion

namespace {

struct ColumnData {
  std::vector<std::uint8_t> avail;
  std::vector<double> plain;
  std::vector<double> full;
};

struct GateValue {
  bool value = false;
  double size = 0.0;
  double full_size = 0.0;
};

GateValue gate_solve(const SpanProgram& p, const ColumnData& d) {
  std::vector<int> av, un;
  for (int i = 0; i < p.size(); ++i) (d.avail[i] ? av : un).push_back(i);
  GateValue g;
  g.value = solver::in_span(p.matrix(), av, p.target());
  const auto pick = [](const std::vector<int>& idx, const std::vector<double>& w) {
    std::vector<double> out;
    for (int i : idx) out.push_back(w[i]);
    return out;
  };
  if (g.value) {
    g.size = solver::min_one_witness(p.matrix(), p.target(), av, pick(av, d.plain))
                 .objective;
    g.full_size = 1.0 + solver::min_one_witness(p.matrix(), p.target(), av,
                                                pick(av, d.full))
                            .objective;
  } else {
    g.size = solver::min_zero_witness(p.matrix(), p.target(), av, un,
                                      pick(un, d.plain), 0.0)
                 .objective;
    g.full_size = solver::min_zero_witness(p.matrix(), p.target(), av, un,
                                           pick(un, d.full), 1.0)
                      .objective;
  }
  return g;
}

// Fills the free and unlinked input columns; link columns are left to the
// caller.
ColumnData base_columns(const Provenance& prov, const SpanProgram& p,
                        const BitString& y, std::span<const double> s) {
  ColumnData d;
  d.avail.resize(p.size());
  d.plain.resize(p.size());
  d.full.resize(p.size());
  for (int i = 0; i < p.size(); ++i) {
    const auto& tag = p.tag(i);
    if (!tag) {
      d.avail[i] = 1;
      d.plain[i] = 0.0;
      d.full[i] = 1.0;
    } else if (!prov.inners.count(tag->var)) {
      d.avail[i] = y[tag->var] == tag->value;
      d.plain[i] = d.full[i] = s[prov.offset[tag->var]];
    }
  }
  return d;
}

GateValue recurse(const ComposedProgram& c, const BitString& x,
                  std::span<const double> s, std::vector<GateSolve>& out) {
  const Provenance& prov = c.prov;
  const SpanProgram& p = *prov.outer;
  const std::size_t slot = out.size();
  out.emplace_back();
  BitString y(p.n());
  for (int j = 0; j < p.n(); ++j)
    if (!prov.inners.count(j)) y.set(j, x[prov.offset[j]]);
  ColumnData d = base_columns(prov, p, y, s);
  for (const auto& [j, pair] : prov.inners) {
    const BitString xb = x.slice(prov.offset[j], prov.width[j]);
    const std::span<const double> sb = s.subspan(prov.offset[j], prov.width[j]);
    for (int b = 0; b < 2; ++b) {
      if (!pair[b]) continue;
      const GateValue g = recurse(*pair[b], xb, sb, out);
      for (int i : p.columns_for(j, b == 1)) {
        d.avail[i] = g.value;
        d.plain[i] = g.size;
        d.full[i] = g.full_size;
      }
    }
  }
  const GateValue g = gate_solve(p, d);
  out[slot] = {g.value, g.size, g.full_size, prov.formula_node, c.program.n()};
  return g;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CaseMaxima max_recurse(const ComposedProgram& c, std::vector<CaseMaxima>& out) {
  const Provenance& prov = c.prov;
  const SpanProgram& p = *prov.outer;
  const std::size_t slot = out.size();
  out.emplace_back();
  std::map<std::pair<int, int>, CaseMaxima> inner;
  for (const auto& [j, pair] : prov.inners)
    for (int b = 0; b < 2; ++b)
      if (pair[b]) inner[{j, b}] = max_recurse(*pair[b], out);

  CaseMaxima m{{kNaN, kNaN}, {kNaN, kNaN}};
  const std::vector<double> unit(c.program.n(), 1.0);
  if (p.n() > kMaxArity + 8)
    throw DomainError("gate-level enumeration limited to " +
                      std::to_string(kMaxArity + 8) + " inputs");
  const std::uint64_t rows = std::uint64_t{1} << p.n();
  for (std::uint64_t r = 0; r < rows; ++r) {
    const BitString y = BitString::from_index(r, p.n());
    ColumnData d = base_columns(prov, p, y, unit);
    bool reachable = true;
    for (int i = 0; i < p.size() && reachable; ++i) {
      const auto& tag = p.tag(i);
      if (!tag || !prov.inners.count(tag->var)) continue;
      const int b = tag->value ? 1 : 0;
      const bool v = (b == 1) == y[tag->var];
      const CaseMaxima& im = inner.at({tag->var, b});
      if (std::isnan(im.size[v])) {
        reachable = false;
        break;
      }
      d.avail[i] = v;
      d.plain[i] = im.size[v];
      d.full[i] = im.full_size[v];
    }
    if (!reachable) continue;
    const GateValue g = gate_solve(p, d);
    const int v = g.value ? 1 : 0;
    if (std::isnan(m.size[v]) || g.size > m.size[v]) m.size[v] = g.size;
    if (std::isnan(m.full_size[v]) || g.full_size > m.full_size[v])
      m.full_size[v] = g.full_size;
  }
  out[slot] = m;
  return m;
}

}  // namespace

std::vector<GateSolve> witness_recursion(const ComposedProgram& c,
                                         const BitString& x,
                                         std::span<const double> s) {
  const int n = c.program.n();
  if (static_cast<int>(x.size()) != n)
    throw DomainError("input length " + std::to_string(x.size()) +
                      " does not match n = " + std::to_string(n));
  if (!s.empty() && static_cast<int>(s.size()) != n)
    throw DomainError("cost vector length does not match n");
  const int local_n = c.var_of_input.empty()
                          ? n
                          : static_cast<int>(c.var_of_input.size());
  BitString xl(local_n);
  std::vector<double> sl(local_n, 1.0);
  for (int p = 0; p < local_n; ++p) {
    const int v = c.var_of_input.empty() ? p : c.var_of_input[p];
    xl.set(p, x[v]);
    if (!s.empty()) sl[p] = s[v];
  }
  std::vector<GateSolve> out;
  if (!c.prov.outer) return out;
  if (c.prov.outer->n() == 0 || c.prov.outer->size() == 0) {
    // Constant program.
    const WitnessResult r = witness_size(c.program, x, s);
    out.push_back({r.value, r.size, r.full_size, -1, n});
    return out;
  }
  recurse(c, xl, sl, out);
  out.front().width = n;
  return out;
}

std::vector<CaseMaxima> max_witness_recursion(const ComposedProgram& c) {
  std::vector<CaseMaxima> out;
  if (!c.prov.outer) return out;
  max_recurse(c, out);
  return out;
}

}  // namespace spanforge
