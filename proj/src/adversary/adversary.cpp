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
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>

#include "spanforge/adversary.hpp"
#include "spanforge/errors.hpp"
#include "spanforge/kernels.hpp"

namespace spanforge {

double adv_closed_form_andor(std::span<const double> s) {
  double acc = 0.0;
  for (double v : s) acc += v * v;
  return std::sqrt(acc);
}

namespace {

double spectral_norm_sym(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Pair table for the minimax objective in sqrt(p) coordinates.
class MinimaxProblem {
 public:
  MinimaxProblem(const GateSpec& g, std::span<const double> s_norm)
      : k_(g.arity), rows_(std::size_t{1} << g.arity) {
    for (std::uint32_t x = 0; x < rows_; ++x)
      for (std::uint32_t y = x + 1; y < rows_; ++y)
        if (g.eval(x) != g.eval(y)) {
          xs_.push_back(x);
          ys_.push_back(y);
        }
    const std::size_t P = xs_.size();
    coef_.assign(k_, std::vector<double>(P, 0.0));
    for (int j = 0; j < k_; ++j) {
      relevant_.push_back(g.depends_on(j));
      const std::uint32_t bit = 1U << (k_ - 1 - j);
      for (std::size_t p = 0; p < P; ++p)
        if (relevant_[j] && ((xs_[p] ^ ys_[p]) & bit)) coef_[j][p] = 1.0 / s_norm[j];
    }
    qx_.assign(k_, std::vector<double>(P));
    qy_.assign(k_, std::vector<double>(P));
    f_.assign(P, 0.0);
  }

  std::size_t pairs() const { return xs_.size(); }
  std::size_t rows() const { return rows_; }
  int k() const { return k_; }
  bool relevant(int j) const { return relevant_[j]; }
  std::uint32_t x(std::size_t p) const { return xs_[p]; }
  std::uint32_t y(std::size_t p) const { return ys_[p]; }
  double coef(int j, std::size_t p) const { return coef_[j][p]; }

  // F_p(q) for all pairs; q is rows x k row-major.
  const std::vector<double>& eval(const std::vector<double>& q) {
    const auto& kt = kernels::active();
    const std::size_t P = pairs();
    std::fill(f_.begin(), f_.end(), 0.0);
    for (int j = 0; j < k_; ++j) {
      if (!relevant_[j]) continue;
      for (std::size_t p = 0; p < P; ++p) {
        qx_[j][p] = q[xs_[p] * k_ + j];
        qy_[j][p] = q[ys_[p] * k_ + j];
      }
      kt.triple_accumulate(coef_[j].data(), qx_[j].data(), qy_[j].data(),
                           f_.data(), P);
    }
    return f_;
  }

 private:
  int k_;
  std::size_t rows_;
  std::vector<std::uint32_t> xs_, ys_;
  std::vector<char> relevant_;
  std::vector<std::vector<double>> coef_, qx_, qy_;
  std::vector<double> f_;
};

double softmin(const std::vector<double>& f, double mu, std::vector<double>* w) {
  const double fmin = *std::min_element(f.begin(), f.end());
  double z = 0.0;
  if (w) w->resize(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) {
    const double e = std::exp(-(f[p] - fmin) / mu);
    if (w) (*w)[p] = e;
    z += e;
  }
  if (w)
    for (auto& v : *w) v /= z;
  return fmin - mu * std::log(z);
}

void project(std::vector<double>& q, const MinimaxProblem& pr) {
  const int k = pr.k();
  for (std::size_t x = 0; x < pr.rows(); ++x) {
    double nrm = 0.0;
    for (int j = 0; j < k; ++j) {
      double& v = q[x * k + j];
      if (!pr.relevant(j) || v < 0.0) v = 0.0;
      nrm += v * v;
    }
    if (nrm <= 0.0) {
      int cnt = 0;
      for (int j = 0; j < k; ++j) cnt += pr.relevant(j);
      for (int j = 0; j < k; ++j)
        q[x * k + j] = pr.relevant(j) ? 1.0 / std::sqrt(double(cnt)) : 0.0;
      continue;
    }
    nrm = std::sqrt(nrm);
    for (int j = 0; j < k; ++j) q[x * k + j] /= nrm;
  }
}

Eigen::MatrixXd scale_to_feasible(const MinimaxProblem& pr, Eigen::MatrixXd gamma,
                                  std::span<const double> s_norm) {
  const std::size_t R = pr.rows();
  double worst = 0.0;
  for (int j = 0; j < pr.k(); ++j) {
    if (!pr.relevant(j)) continue;
    const std::uint32_t bit = 1U << (pr.k() - 1 - j);
    Eigen::MatrixXd m = gamma;
    for (std::size_t a = 0; a < R; ++a)
      for (std::size_t b = 0; b < R; ++b)
        if (((a ^ b) & bit) == 0) m(a, b) = 0.0;
    worst = std::max(worst, spectral_norm_sym(m) / s_norm[j]);
  }
  if (worst > 0.0) gamma /= worst;
  return gamma;
}

// Builds Gamma from pair weights and scales it to feasibility.
Eigen::MatrixXd certificate_from_weights(const MinimaxProblem& pr,
                                         const std::vector<double>& lambda,
                                         std::span<const double> s_norm) {
  const std::size_t R = pr.rows();
  std::vector<double> row(R, 0.0);
  for (std::size_t p = 0; p < pr.pairs(); ++p) {
    row[pr.x(p)] += lambda[p];
    row[pr.y(p)] += lambda[p];
  }
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(R, R);
  for (std::size_t p = 0; p < pr.pairs(); ++p) {
    const double d = std::sqrt(row[pr.x(p)] * row[pr.y(p)]);
    if (d <= 0.0) continue;
    gamma(pr.x(p), pr.y(p)) = gamma(pr.y(p), pr.x(p)) = lambda[p] / d;
  }
  return scale_to_feasible(pr, std::move(gamma), s_norm);
}

struct Polished {
  std::vector<double> q;
  std::vector<double> lambda;  // over all pairs
};

// Newton iteration on the stationarity system of the active pairs:
// F_p(q) = t, sum_p lambda_p dF_p/dq_x = mu_x q_x, |q_x| = 1, sum lambda = 1.
Polished polish(MinimaxProblem& pr, const std::vector<double>& q0,
                const std::vector<double>& w0, double active_gap, double zero_cut) {
  const int k = pr.k();
  const std::size_t R = pr.rows();
  const auto f0 = pr.eval(q0);
  const double fmin = *std::min_element(f0.begin(), f0.end());
  std::vector<std::size_t> act;
  for (std::size_t p = 0; p < pr.pairs(); ++p)
    if (f0[p] <= fmin * (1.0 + active_gap)) act.push_back(p);
  std::vector<int> slot(R * k, -1);
  int nq = 0;
  for (std::size_t x = 0; x < R; ++x)
    for (int j = 0; j < k; ++j)
      if (pr.relevant(j) && q0[x * k + j] > zero_cut) slot[x * k + j] = nq++;
  const int na = static_cast<int>(act.size());
  const int nv = nq + na + static_cast<int>(R) + 1;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(nv);
  for (std::size_t i = 0; i < slot.size(); ++i)
    if (slot[i] >= 0) z(slot[i]) = q0[i];
  double wsum = 0.0;
  for (std::size_t p : act) wsum += w0[p];
  for (int a = 0; a < na; ++a)
    z(nq + a) = wsum > 0.0 ? w0[act[a]] / wsum : 1.0 / na;
  for (std::size_t x = 0; x < R; ++x) {
    double m = 0.0;
    for (int a = 0; a < na; ++a)
      if (pr.x(act[a]) == x || pr.y(act[a]) == x) m += z(nq + a) * f0[act[a]];
    z(nq + na + x) = m;
  }
  z(nv - 1) = fmin;

  auto qv = [&](const Eigen::VectorXd& v, std::size_t x, int j) {
    const int i = slot[x * k + j];
    return i >= 0 ? v(i) : 0.0;
  };
  auto residual = [&](const Eigen::VectorXd& v, Eigen::MatrixXd* jac) {
    const int ne = na + nq + static_cast<int>(R) + 1;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(ne);
    if (jac) jac->setZero(ne, nv);
    const double t = v(nv - 1);
    // Stationarity rows are indexed by slot.
    for (int a = 0; a < na; ++a) {
      const std::size_t p = act[a];
      const std::size_t x = pr.x(p), y = pr.y(p);
      const double lam = v(nq + a);
      double f = 0.0;
      for (int j = 0; j < k; ++j) {
        const double c = pr.coef(j, p);
        if (c == 0.0) continue;
        const double qx = qv(v, x, j), qy = qv(v, y, j);
        f += c * qx * qy;
        const int ix = slot[x * k + j], iy = slot[y * k + j];
        if (ix >= 0) {
          r(na + ix) += lam * c * qy;
          if (jac) {
            (*jac)(a, ix) += c * qy;
            (*jac)(na + ix, nq + a) += c * qy;
            if (iy >= 0) (*jac)(na + ix, iy) += lam * c;
          }
        }
        if (iy >= 0) {
          r(na + iy) += lam * c * qx;
          if (jac) {
            (*jac)(a, iy) += c * qx;
            (*jac)(na + iy, nq + a) += c * qx;
            if (ix >= 0) (*jac)(na + iy, ix) += lam * c;
          }
        }
      }
      r(a) = f - t;
      if (jac) (*jac)(a, nv - 1) = -1.0;
    }
    for (std::size_t x = 0; x < R; ++x) {
      const double mu = v(nq + na + x);
      double nrm = 0.0;
      bool any = false;
      for (int j = 0; j < k; ++j) {
        const int i = slot[x * k + j];
        if (i < 0) continue;
        any = true;
        r(na + i) -= mu * v(i);
        nrm += v(i) * v(i);
        if (jac) {
          (*jac)(na + i, i) -= mu;
          (*jac)(na + i, nq + na + x) = -v(i);
          (*jac)(na + nq + x, i) = 2.0 * v(i);
        }
      }
      if (any) r(na + nq + x) = nrm - 1.0;
    }
    double ls = 0.0;
    for (int a = 0; a < na; ++a) {
      ls += v(nq + a);
      if (jac) (*jac)(ne - 1, nq + a) = 1.0;
    }
    r(ne - 1) = ls - 1.0;
    return r;
  };

  Eigen::MatrixXd jac;
  Eigen::VectorXd r = residual(z, &jac);
  for (int it = 0; it < 40 && r.norm() > 1e-14; ++it) {
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-r);
    double alpha = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 20; ++bt, alpha *= 0.5) {
      const Eigen::VectorXd zn = z + alpha * step;
      const Eigen::VectorXd rn = residual(zn, nullptr);
      if (rn.norm() < r.norm()) {
        z = zn;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    r = residual(z, &jac);
  }

  Polished out;
  out.q.assign(R * k, 0.0);
  for (std::size_t i = 0; i < slot.size(); ++i)
    if (slot[i] >= 0) out.q[i] = std::max(0.0, z(slot[i]));
  out.lambda.assign(pr.pairs(), 0.0);
  for (int a = 0; a < na; ++a) out.lambda[act[a]] = std::max(0.0, z(nq + a));
  return out;
}

}  // namespace

MinimaxResult adv_minimax_solve(const GateSpec& g, std::span<const double> s,
                                const MinimaxOptions& opts) {
  if (static_cast<int>(s.size()) != g.arity)
    throw DomainError("cost vector length does not match gate arity");
  if (g.arity > 4)
    throw DomainError("minimax solver limited to arity <= 4, gate " + g.name +
                      " has " + std::to_string(g.arity));
  double smax = 0.0;
  for (int j = 0; j < g.arity; ++j) {
    if (!(s[j] >= 0.0) || !std::isfinite(s[j]))
      throw DomainError("costs must be finite and nonnegative");
    if (g.depends_on(j) && s[j] <= 0.0)
      throw DomainError("cost of a relevant input must be positive");
    smax = std::max(smax, s[j]);
  }
  MinimaxResult res;
  const std::size_t R = std::size_t{1} << g.arity;
  if (g.is_constant() || smax <= 0.0) {
    res.p.assign(R, std::vector<double>(g.arity, g.arity ? 1.0 / g.arity : 0.0));
    res.gamma = Eigen::MatrixXd::Zero(R, R);
    return res;
  }
  std::vector<double> sn(s.begin(), s.end());
  for (auto& v : sn) v = v > 0.0 ? v / smax : 1.0;

  MinimaxProblem pr(g, sn);
  const int k = g.arity;
  std::mt19937_64 rng(opts.seed);
  std::vector<double> best_q;
  double best_g = -1.0;
  double best_lower = 0.0;
  Eigen::MatrixXd best_gamma = Eigen::MatrixXd::Zero(R, R);

  std::vector<double> q(R * k), trial(R * k), grad(R * k), w, wt;
  const int stages = 12;
  const int per_stage = std::max(10, opts.iterations / stages);

  constexpr double kTight = 1e-10;
  constexpr int kTightRestarts = 8;
  auto closed = [&] { return 1.0 / best_g - best_lower <= opts.tolerance; };
  auto tight = [&] { return 1.0 / best_g - best_lower <= std::min(kTight, opts.tolerance); };
  // Newton polish from a point of the smoothed path, twice in a row.
  auto settle = [&](const std::vector<double>& from) {
    std::vector<double> mult;
    for (double gap : {1e-3, 1e-2, 1e-4}) {
      std::vector<double> start = from;
      for (int round = 0; round < 2 && !tight(); ++round) {
        softmin(std::vector<double>(pr.eval(start)), 1e-4, &mult);
        Polished pq = polish(pr, start, mult, gap, 1e-3);
        project(pq.q, pr);
        const auto& f = pr.eval(pq.q);
        const double exact = *std::min_element(f.begin(), f.end());
        if (exact > best_g) {
          best_g = exact;
          best_q = pq.q;
        }
        Eigen::MatrixXd gamma = certificate_from_weights(pr, pq.lambda, sn);
        const double lb = spectral_norm_sym(gamma);
        if (lb > best_lower) {
          best_lower = lb;
          best_gamma = gamma;
        }
        start = std::move(pq.q);
      }
    }
  };

  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = r == 0 ? 1.0 : 0.05 + uniform_unit(rng);
    project(q, pr);
    double mu = 0.1;
    double eta = 0.5;
    double local_best = -1.0;
    std::vector<double> local_q = q;
    for (int st = 0; st < stages; ++st, mu *= 0.35) {
      double cur = softmin(pr.eval(q), mu, &w);
      for (int it = 0; it < per_stage; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t p = 0; p < pr.pairs(); ++p) {
          if (w[p] < 1e-300) continue;
          const std::size_t xo = pr.x(p) * k, yo = pr.y(p) * k;
          for (int j = 0; j < k; ++j) {
            const double c = w[p] * pr.coef(j, p);
            if (c == 0.0) continue;
            grad[xo + j] += c * q[yo + j];
            grad[yo + j] += c * q[xo + j];
          }
        }
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
          for (std::size_t i = 0; i < q.size(); ++i) trial[i] = q[i] + eta * grad[i];
          project(trial, pr);
          const double val = softmin(pr.eval(trial), mu, &wt);
          if (val >= cur) {
            q.swap(trial);
            w.swap(wt);
            cur = val;
            eta *= 1.5;
            moved = true;
            break;
          }
          eta *= 0.5;
        }
        const auto& f = pr.eval(q);
        const double exact = *std::min_element(f.begin(), f.end());
        if (exact > local_best) {
          local_best = exact;
          local_q = q;
        }
        if (!moved) break;
      }
      if (st >= 3 && !tight()) settle(local_q);
      if (tight()) break;
    }
    if (local_best > best_g) {
      best_g = local_best;
      best_q = local_q;
    }
    // The smoothed optimum's softmin weights are its stationarity
    // multipliers, so they seed the certificate.
    const std::vector<double> f_end = pr.eval(q);
    for (double m : {mu / 0.35, 1e-3, 1e-4, 1e-5}) {
      softmin(f_end, m, &w);
      Eigen::MatrixXd gamma = certificate_from_weights(pr, w, sn);
      const double lb = spectral_norm_sym(gamma);
      if (lb > best_lower) {
        best_lower = lb;
        best_gamma = gamma;
      }
    }
    settle(local_q);
    res.restarts_used = r + 1;
    if (tight() || (closed() && r + 1 >= kTightRestarts)) break;
  }

  res.upper = smax / best_g;
  res.lower = smax * best_lower;
  res.value = res.upper;
  res.gamma = best_gamma * smax;
  res.p.assign(R, std::vector<double>(k, 0.0));
  for (std::size_t x = 0; x < R; ++x)
    for (int j = 0; j < k; ++j) res.p[x][j] = best_q[x * k + j] * best_q[x * k + j];
  if (!closed()) {
    std::ostringstream os;
    os.precision(12);
    os << "minimax solver did not converge for gate " << g.name
       << ": bracket [" << res.lower << ", " << res.upper << "] after "
       << res.restarts_used << " restarts";
    throw SolverError(os.str(), res.lower, res.upper);
  }
  return res;
}

double adv_minimax(const GateSpec& g, std::span<const double> s,
                   const MinimaxOptions& opts) {
  return adv_minimax_solve(g, s, opts).value;
}

CostMap default_cost_map(const MinimaxOptions& opts) {
  struct Cache {
    std::mutex mu;
    std::map<std::pair<std::string, std::vector<double>>, double> values;
  };
  auto cache = std::make_shared<Cache>();
  return [cache, opts](const GateSpec& g,
                       std::span<const double> s) -> CostResult {
    if (g.relevant_count() == 1) {
      for (int j = 0; j < g.arity; ++j)
        if (g.depends_on(j)) return {s[j], "closed_form"};
    }
    if (g.is_andor_type()) {
      std::vector<double> rel;
      for (int j = 0; j < g.arity; ++j)
        if (g.depends_on(j)) rel.push_back(s[j]);
      return {adv_closed_form_andor(rel), "closed_form"};
    }
    if (g.cost_bound) return {(*g.cost_bound)(s), "declared"};
    if (g.arity > 4)
      throw DomainError("missing gate bound for " + g.name +
                        " (arity above 4 and no declared cost)");
    auto key = std::make_pair(g.tt_string(), std::vector<double>(s.begin(), s.end()));
    {
      std::lock_guard<std::mutex> lock(cache->mu);
      if (auto it = cache->values.find(key); it != cache->values.end())
        return {it->second, "minimax"};
    }
    const double v = adv_minimax(g, s, opts);
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->values[key] = v;
    return {v, "minimax"};
  };
}

double adv_formula(const Formula& phi, const CostMap& costs) {
  return metrics(phi, costs).root_adv();
}

double adv_formula(const Formula& phi) {
  return adv_formula(phi, default_cost_map());
}

FormulaMetrics metrics(const Formula& phi) {
  return metrics(phi, default_cost_map());
}

std::vector<double> masked_norms(const GateSpec& g, const Eigen::MatrixXd& gamma) {
  const std::size_t R = std::size_t{1} << g.arity;
  std::vector<double> out;
  for (int j = 0; j < g.arity; ++j) {
    const std::uint32_t bit = 1U << (g.arity - 1 - j);
    Eigen::MatrixXd m = gamma;
    for (std::size_t a = 0; a < R; ++a)
      for (std::size_t b = 0; b < R; ++b)
        if (((a ^ b) & bit) == 0) m(a, b) = 0.0;
    out.push_back(spectral_norm_sym(0.5 * (m + m.transpose())));
  }
  return out;
}

double validate_adversary_matrix(const GateSpec& g, const Eigen::MatrixXd& gamma,
                                 std::span<const double> s, double slack) {
  const std::size_t R = std::size_t{1} << g.arity;
  if (static_cast<std::size_t>(gamma.rows()) != R ||
      static_cast<std::size_t>(gamma.cols()) != R)
    throw DomainError("adversary matrix must be " + std::to_string(R) + "x" +
                      std::to_string(R));
  if (static_cast<int>(s.size()) != g.arity)
    throw DomainError("cost vector length does not match gate arity");
  std::vector<std::string> bad;
  const auto label = [&](std::size_t v) {
    return BitString::from_index(v, g.arity).str();
  };
  for (std::size_t a = 0; a < R; ++a)
    for (std::size_t b = a; b < R; ++b) {
      if (std::abs(gamma(a, b) - gamma(b, a)) > slack)
        bad.push_back("not symmetric at (" + label(a) + "," + label(b) + ")");
      if (g.eval(a) == g.eval(b) && (gamma(a, b) != 0.0 || gamma(b, a) != 0.0))
        bad.push_back("nonzero entry at (" + label(a) + "," + label(b) +
                      ") where g agrees");
    }
  const auto norms = masked_norms(g, gamma);
  for (int j = 0; j < g.arity; ++j)
    if (norms[j] > s[j] + slack) {
      std::ostringstream os;
      os.precision(12);
      os << "||Gamma o Delta_" << (j + 1) << "|| = " << norms[j] << " > s_"
         << (j + 1) << " = " << s[j];
      bad.push_back(os.str());
    }
  if (!bad.empty())
    throw InfeasibleCertificate("infeasible adversary matrix", std::move(bad));
  return spectral_norm_sym(0.5 * (gamma + gamma.transpose()));
}

}  // namespace spanforge
