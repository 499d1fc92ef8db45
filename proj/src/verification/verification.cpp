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


#include "spanforge/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>

#include "spanforge/adversary.hpp"
#include "spanforge/errors.hpp"

namespace spanforge {

CheckItem& VerificationReport::bound(std::string what, double lhs, double rhs) {
  CheckItem it{std::move(what), lhs, rhs, lhs <= rhs + tolerance, {}};
  pass = pass && it.pass;
  items.push_back(std::move(it));
  return items.back();
}

CheckItem& VerificationReport::equal(std::string what, double lhs, double rhs,
                                     double tol) {
  CheckItem it{std::move(what), lhs, rhs, std::abs(lhs - rhs) <= tol, {}};
  pass = pass && it.pass;
  items.push_back(std::move(it));
  return items.back();
}

void VerificationReport::merge(const VerificationReport& other) {
  pass = pass && other.pass;
  for (const auto& it : other.items) items.push_back(it);
  for (const auto& n : other.notes)
    if (std::find(notes.begin(), notes.end(), n) == notes.end()) notes.push_back(n);
}

io::Json report_to_json(const VerificationReport& r) {
  io::Json items = io::Json::array();
  for (const auto& it : r.items) {
    io::Json j{{"what", it.what}, {"lhs", it.lhs}, {"rhs", it.rhs}, {"pass", it.pass}};
    if (!it.data.empty()) j["witness"] = it.data;
    items.push_back(std::move(j));
  }
  return io::Json{{"lemma", r.lemma},         {"instance", r.instance},
                  {"tolerance", r.tolerance}, {"pass", r.pass},
                  {"items", std::move(items)}, {"notes", r.notes}};
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

std::vector<double> unit_costs(std::span<const double> s, int n) {
  if (s.empty()) return std::vector<double>(n, 1.0);
  if (static_cast<int>(s.size()) != n) throw DomainError("cost vector length does not match n");
  return {s.begin(), s.end()};
}

}  // namespace

// ---------------------------------------------------------------- canonical

VerificationReport check_canonical_premise(const SpanProgram& p,
                                           std::span<const double> s_in) {
  const auto s = unit_costs(s_in, p.n());
  if (p.n() > kMaxExhaustiveVars) throw DomainError("too many inputs for canonical check");
  std::vector<BitString> zeros;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << p.n()); ++i) {
    const auto x = BitString::from_index(i, p.n());
    if (!eval_span(p, x)) zeros.push_back(x);
  }
  if (p.dim() != static_cast<int>(zeros.size()))
    throw NotCanonical("not canonical-shaped: dim V = " + std::to_string(p.dim()) +
                       ", false inputs = " + std::to_string(zeros.size()));
  for (int c = 0; c < p.size(); ++c) {
    if (p.is_free(c))
      throw NotCanonical("not canonical-shaped: free column '" + p.label(c) + "'");
    for (int r = 0; r < p.dim(); ++r)
      if (p.matrix()(r, c) != 0.0 && p.available(c, zeros[r]))
        throw NotCanonical("not canonical-shaped: column '" + p.label(c) +
                           "' touches |" + zeros[r].str() + ">, where it is available");
  }
  VerificationReport rep;
  rep.lemma = "canonical";
  rep.instance = "program n=" + std::to_string(p.n()) + " dim=" + std::to_string(p.dim());
  rep.equal("target = sum of false-input basis vectors", (p.target().array() - 1.0).abs().maxCoeff(),
            0.0, 1e-12);
  for (int r = 0; r < p.dim(); ++r) {
    const BitString& x = zeros[r];
    double at_basis = 0.0;
    for (int c = 0; c < p.size(); ++c)
      if (!p.available(c, x)) {
        const double v = p.matrix()(r, c);
        at_basis += s[p.tag(c)->var] * v * v;
      }
    const WitnessResult opt = witness_size(p, x, s);
    auto& it = rep.equal("x=" + x.str() + ": cost of |x> vs optimum", at_basis, opt.size,
                         kLemmaTolerance);
    if (!it.pass) it.data = to_std(opt.witness);
  }
  return rep;
}

VerificationReport check_norm_lemma(const SpanProgram& p, std::span<const double> s_in) {
  const auto s = unit_costs(s_in, p.n());
  VerificationReport rep = check_canonical_premise(p, s);
  rep.lemma = "norm";
  const AbsNorm an = abs_norm(biadjacency(p).biadj);
  const double w = max_witness_size(p, s);
  const double smin = s.empty() ? 1.0 : *std::min_element(s.begin(), s.end());
  const double rhs = std::ldexp(1.0, p.n()) * (1.0 + w / smin) + p.size();
  rep.bound("||abs(A_G)|| <= 2^k (1 + wsize/min s) + |I|", an.norm, rhs);
  rep.bound("||abs(B)|| <= Frobenius", an.norm, an.frobenius);
  rep.bound("Frobenius^2 <= 2^k (1 + wsize/min s) + |I|", an.frobenius * an.frobenius, rhs);
  rep.notes.push_back("wsize_s(P) = " + fmt(w) + ", min s = " + fmt(smin));
  return rep;
}

// ---------------------------------------------------------------- compose

namespace {

class MaximaCache {
 public:
  const CaseMaxima& get(const ComposedProgram& c) {
    auto it = cache_.find(&c);
    if (it != cache_.end()) return it->second;
    return cache_[&c] = max_witness_recursion(c).front();
  }

 private:
  std::map<const ComposedProgram*, CaseMaxima> cache_;
};

double finite_max(const double (&v)[2]) {
  double out = 0.0;
  for (double x : v)
    if (!std::isnan(x)) out = std::max(out, x);
  return out;
}

void compose_node(const ComposedProgram& c, const BitString& xl, const BitString& xp,
                  MaximaCache& maxima, VerificationReport& rep) {
  const Provenance& prov = c.prov;
  const SpanProgram& p = *prov.outer;
  const std::string where = prov.formula_node >= 0
                                ? "v" + std::to_string(prov.formula_node)
                                : std::string("program");
  BitString y(p.n());
  std::vector<double> r(p.n(), 1.0);
  std::map<std::pair<int, int>, double> ratio;
  for (int j = 0; j < p.n(); ++j) {
    const BitString xb = xl.slice(prov.offset[j], prov.width[j]);
    auto it = prov.inners.find(j);
    if (it == prov.inners.end()) {
      y.set(j, xb[0]);
      continue;
    }
    const auto& pair = it->second;
    y.set(j, pair[1] ? eval_span(pair[1]->program, xb) : !eval_span(pair[0]->program, xb));
    double rj = 0.0;
    for (int b = 0; b < 2; ++b)
      if (pair[b]) rj = std::max(rj, finite_max(maxima.get(*pair[b]).size));
    r[j] = rj;
  }
  const WitnessResult q = full_witness_size(c.program, xp);
  const WitnessResult pw = witness_size(p, y, r);
  rep.equal(where + ": f_Q(x) = f_P(y)", q.value, pw.value, 0.0);

  double sigma = 0.0;
  bool any = false;
  const double scale = pw.witness.size() ? pw.witness.cwiseAbs().maxCoeff() : 0.0;
  const double thr = 1e-9 * std::max(scale, 1e-300);
  for (int i = 0; i < p.size(); ++i) {
    if (p.is_free(i)) continue;
    double mag;
    if (pw.value) {
      if (!p.available(i, y)) continue;
      mag = std::abs(pw.witness[i]);
    } else {
      if (p.available(i, y)) continue;
      mag = std::abs(p.matrix().col(i).dot(pw.witness));
    }
    if (mag <= thr) continue;
    const int j = p.tag(i)->var;
    const int b = p.tag(i)->value ? 1 : 0;
    double ratio_j = 1.0;
    if (auto it = prov.inners.find(j); it != prov.inners.end()) {
      const CaseMaxima& m = maxima.get(*it->second[b]);
      const int inner_case = pw.value ? 1 : 0;
      ratio_j = r[j] > 0 ? m.full_size[inner_case] / r[j]
                         : std::numeric_limits<double>::infinity();
    }
    sigma = std::max(sigma, ratio_j);
    any = true;
  }
  if (!any) sigma = 1.0;
  double extra;
  if (pw.value) {
    extra = 1.0;
    for (int i = 0; i < p.size(); ++i)
      if (p.is_free(i)) extra += pw.witness[i] * pw.witness[i];
  } else {
    extra = pw.witness.squaredNorm();
  }
  const std::string tag = where + (pw.value ? " 1-case" : " 0-case");
  if (pw.size > 0) {
    auto& it = rep.bound(tag + ": wsizef(Q)/wsize(P) <= sigma + extra/wsize(P)",
                         q.full_size / pw.size, sigma + extra / pw.size);
    if (!it.pass) it.data = to_std(pw.witness);
  } else {
    auto& it = rep.bound(tag + ": wsizef(Q) <= extra (wsize(P) = 0)", q.full_size, extra);
    if (!it.pass) it.data = to_std(pw.witness);
  }

  for (const auto& [j, pair] : prov.inners) {
    const BitString xb = xl.slice(prov.offset[j], prov.width[j]);
    for (int b = 0; b < 2; ++b)
      if (pair[b] && !pair[b]->prov.inners.empty())
        compose_node(*pair[b], xb, xb, maxima, rep);
  }
}

BitString local_input(const ComposedProgram& c, const BitString& x) {
  if (static_cast<int>(x.size()) != c.program.n())
    throw DomainError("input length does not match n");
  if (c.var_of_input.empty()) return x;
  BitString xl(c.var_of_input.size());
  for (std::size_t p = 0; p < c.var_of_input.size(); ++p) xl.set(p, x[c.var_of_input[p]]);
  return xl;
}

std::string instance_of(const ComposedProgram& c) {
  return c.formula ? c.formula->to_string()
                   : "program n=" + std::to_string(c.program.n());
}

}  // namespace

VerificationReport check_compose_lemma(const ComposedProgram& c, const BitString& x) {
  VerificationReport rep;
  rep.lemma = "compose";
  rep.instance = instance_of(c) + " x=" + x.str();
  if (!c.prov.outer || c.prov.outer->size() == 0) {
    rep.notes.push_back("no gate programs");
    return rep;
  }
  MaximaCache maxima;
  compose_node(c, local_input(c, x), x, maxima, rep);
  return rep;
}

VerificationReport check_directsum_norm(const ComposedProgram& c) {
  VerificationReport rep;
  rep.lemma = "dsnorm";
  rep.instance = instance_of(c);
  // Post-order so each node's gate maximum covers its subtree.
  std::function<double(const ComposedProgram&, bool)> visit =
      [&](const ComposedProgram& node, bool top) -> double {
    double gate_max = node.prov.outer ? abs_norm(biadjacency(*node.prov.outer).biadj).norm : 0.0;
    for (const auto& [j, pair] : node.prov.inners)
      for (const auto& in : pair)
        if (in) gate_max = std::max(gate_max, visit(*in, false));
    if (top || !node.prov.inners.empty()) {
      const std::string where = node.prov.formula_node >= 0
                                    ? "v" + std::to_string(node.prov.formula_node)
                                    : std::string("program");
      rep.bound(where + ": ||abs(A_G)|| <= 2 max gate norm",
                abs_norm(biadjacency(node.program).biadj).norm, 2.0 * gate_max);
    }
    return gate_max;
  };
  if (c.prov.outer) visit(c, true);
  return rep;
}

// ---------------------------------------------------------------- witness

VerificationReport check_witness_bounds(const ComposedProgram& c, const BitString& x) {
  if (!c.formula) throw DomainError("witness bounds need a formula composition");
  const Formula& phi = *c.formula;
  if (!phi.is_andor()) throw DomainError("witness bounds need an AND-OR formula");
  VerificationReport rep;
  rep.lemma = "witness";
  rep.instance = phi.to_string() + " x=" + x.str();
  const FormulaMetrics m = metrics(phi);
  const auto solves = witness_recursion(c, x);
  for (const GateSolve& g : solves) {
    if (g.formula_node < 0) continue;
    const double sig = m.sigma_minus[g.formula_node];
    const double rs = std::sqrt(static_cast<double>(m.size[g.formula_node]));
    const std::string v = "v" + std::to_string(g.formula_node);
    if (g.value)
      rep.bound(v + " 1-case: wsizef <= sigma_minus sqrt(s_v)", g.full_size, sig * rs);
    else
      rep.bound(v + " 0-case: wsizef <= 2 sigma_minus sqrt(s_v) - 1", g.full_size,
                2.0 * sig * rs - 1.0);
  }
  const WitnessResult root = full_witness_size(c.program, x);
  const double n = phi.n();
  rep.bound("root: wsizef <= 2 sigma_minus sqrt(n)", root.full_size,
            2.0 * m.root_sigma_minus() * std::sqrt(n));
  if (!solves.empty())
    rep.equal("root: dense solve = gate recursion", root.full_size, solves.front().full_size,
              1e-8 * std::max(1.0, root.full_size));
  return rep;
}

// ---------------------------------------------------------------- balance

VerificationReport check_balance_lemma(const Formula& phi) {
  VerificationReport rep;
  rep.lemma = "balance";
  rep.instance = phi.to_string();
  if (phi.is_constant()) {
    rep.notes.push_back("constant formula");
    return rep;
  }
  const FormulaMetrics m = metrics(phi);
  const double beta = m.beta;
  const double need = std::sqrt(1.0 + 1.0 / (beta * beta));
  for (std::size_t id = 0; id < phi.nodes().size(); ++id) {
    const Node& nd = phi.node(static_cast<int>(id));
    if (nd.is_leaf() || nd.children.size() < 2) continue;
    double cmax = 0.0;
    for (int c : nd.children) cmax = std::max(cmax, m.adv[c]);
    // Lower bound: pass when need <= ratio.
    rep.bound("v" + std::to_string(id) + ": sqrt(1+1/beta^2) <= ADV(v)/max child ADV", need,
              m.adv[id] / cmax);
  }
  rep.bound("sigma_minus <= (2+sqrt2) beta^2", m.root_sigma_minus(),
            (2.0 + std::sqrt(2.0)) * beta * beta);
  rep.notes.push_back("beta = " + fmt(beta));
  return rep;
}

// ---------------------------------------------------------------- gap

namespace {

struct VertexVerdict {
  bool ok = true;
  double measure = 0.0;  // |ratio| / (y_v E)
  std::string failure;
  bool near_threshold = false;
};

// Sign and ratio conditions at every vertex except 0.
VertexVerdict check_amplitudes(const NandTree& t, const Eigen::VectorXd& a, double e,
                               const std::vector<double>& y, double tol) {
  VertexVerdict out;
  const double norm = a.norm();
  const double zthr = kZeroAmplitude * norm;
  const double near = 1e3 * zthr;
  for (int v = 1; v < t.vertex_count(); ++v) {
    const int p = t.parent[v];
    const double h = t.weight[v], av = a[v], ap = a[p];
    if (std::abs(av) < zthr && std::abs(ap) < zthr) continue;
    const double bound = y[v] * e;
    bool ok;
    double q;
    if (!t.nand[v]) {
      q = std::abs(av) >= zthr ? h * ap / av : std::numeric_limits<double>::infinity();
      ok = q > 0 && q <= bound + tol;
    } else {
      q = std::abs(ap) >= zthr ? av / (h * ap) : -std::numeric_limits<double>::infinity();
      ok = q < 0 && q >= -bound - tol;
    }
    if (ok) {
      out.measure = std::max(out.measure, std::abs(q) / bound);
      continue;
    }
    const std::string msg = t.labels[v] + " (nand=" + std::to_string(t.nand[v]) +
                            ") ratio " + fmt(q) + " vs y_v E = " + fmt(bound);
    if (std::min(std::abs(av), std::abs(ap)) < near) {
      out.near_threshold = true;
      out.failure = msg;
      continue;
    }
    out.ok = false;
    out.failure = msg;
    out.measure = std::numeric_limits<double>::infinity();
    return out;
  }
  return out;
}

// The verdict already applies the tolerance to each ratio; the item only
// records the largest relative measure.
CheckItem& amplitude_item(VerificationReport& rep, std::string what, const VertexVerdict& v) {
  CheckItem it{std::move(what),
               v.ok ? v.measure : std::numeric_limits<double>::infinity(), 1.0, v.ok, {}};
  rep.pass = rep.pass && it.pass;
  rep.items.push_back(std::move(it));
  return rep.items.back();
}

}  // namespace

VerificationReport check_gap_lemma(const Formula& phi, const BitString& x) {
  VerificationReport rep;
  rep.lemma = "gap";
  rep.instance = phi.to_string() + " x=" + x.str();
  const NandTree t = build_nand_tree(phi, x);
  const NandForm nf = to_nand_form(phi);
  const bool root_nand = nf.nand_values(x)[nf.root] != 0;
  auto& cal = rep.equal("calibration: root zero mode iff NAND(root) = 0", root_zero_mode(t),
                        !root_nand, 0.0);
  if (!cal.pass) {
    rep.notes.push_back("calibration failed; checker aborted");
    return rep;
  }
  const double emax = gap_energy_bound(t.sigma_root, t.n);
  rep.notes.push_back("E_max = " + fmt(emax) + " (N read as n)");
  const std::vector<double> y_max = y_values(t, emax);
  for (int v = 1; v < t.vertex_count(); ++v) {
    const double gamma = 4.0 * t.sigma_root * t.sigma_root * t.size[v] * t.sigma[v];
    rep.bound(t.labels[v] + ": gamma_v E_max^2 <= 1/2", gamma * emax * emax, 0.5);
  }

  const Eigen::MatrixXd a = t.adjacency();
  const SpectralReport sp = spectrum(a);
  rep.bound("eigen residual / ||A||", sp.max_residual, 1e-8);
  int in_range = 0;
  const double zero = 1e-9 * std::max(1.0, sp.eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < sp.eigenvalues.size(); ++k) {
    const double e = sp.eigenvalues[k];
    if (e <= zero || e > emax) continue;
    ++in_range;
    const auto y = y_values(t, e);
    const auto verdict = check_amplitudes(t, sp.eigenvectors.col(k), e, y, rep.tolerance);
    auto& it = amplitude_item(rep, "eigenpair E=" + fmt(e) + ": max |ratio|/(y_v E)", verdict);
    if (!verdict.ok) {
      it.what += " [" + verdict.failure + "]";
      it.data = to_std(sp.eigenvectors.col(k));
    }
    if (verdict.near_threshold) rep.notes.push_back("near-threshold: " + verdict.failure);
  }
  if (in_range == 0) rep.notes.push_back("no eigenvalues in range");

  // Solutions of the eigen-equations at every vertex except 0.
  for (int k = 1; k <= 8; ++k) {
    const double e = emax * k / 8.0;
    Eigen::MatrixXd m = a - e * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    const Eigen::MatrixXd rows = m.bottomRows(m.rows() - 1);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv[i] > kRankCutoff * sv[0];
    const Eigen::MatrixXd null = svd.matrixV().rightCols(a.cols() - rank);
    const auto y = y_values(t, e);
    for (Eigen::Index c = 0; c < null.cols(); ++c) {
      const auto verdict = check_amplitudes(t, null.col(c), e, y, rep.tolerance);
      auto& it = amplitude_item(rep,
                                "probe E=" + std::to_string(k) + "/8 E_max, null vector " +
                                    std::to_string(c + 1) + ": max |ratio|/(y_v E)",
                                verdict);
      if (!verdict.ok) {
        it.what += " [" + verdict.failure + "]";
        it.data = to_std(null.col(c));
      }
      if (verdict.near_threshold) rep.notes.push_back("near-threshold: " + verdict.failure);
    }
  }
  return rep;
}

std::vector<BitString> check_inputs(int n, std::uint64_t seed, int extra) {
  std::vector<BitString> out;
  if (n <= 12) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i)
      out.push_back(BitString::from_index(i, n));
    return out;
  }
  out.push_back(BitString(n));
  out.push_back(BitString::ones(n));
  std::mt19937_64 rng(seed);
  for (int k = 0; k < extra; ++k) {
    BitString x(n);
    for (int j = 0; j < n; ++j) x.set(j, uniform_below(rng, 2) == 1);
    out.push_back(x);
  }
  return out;
}

VerificationReport calibrate_nand_tree(const Formula& phi) {
  VerificationReport rep;
  rep.lemma = "gap-calibration";
  rep.instance = phi.to_string();
  const NandForm nf = to_nand_form(phi);
  int mismatches = 0, total = 0;
  const auto inputs = phi.n() <= 10 ? check_inputs(phi.n(), 0) : check_inputs(phi.n(), 0, 64);
  if (phi.n() > 10) rep.notes.push_back("sampled inputs (n > 10)");
  for (const BitString& x : inputs) {
    const NandTree t = build_nand_tree(phi, x);
    const bool root_nand = nf.nand_values(x)[nf.root] != 0;
    if (root_zero_mode(t) == root_nand) {
      ++mismatches;
      if (mismatches <= 4) rep.notes.push_back("mismatch at x=" + x.str());
    }
    ++total;
  }
  rep.equal("inputs where zero mode disagrees with NAND(root) (of " + std::to_string(total) + ")",
            mismatches, 0.0, 0.0);
  return rep;
}

}  // namespace spanforge
