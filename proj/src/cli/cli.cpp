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


#include "spanforge/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "spanforge/adversary.hpp"
#include "spanforge/errors.hpp"
#include "spanforge/graph.hpp"
#include "spanforge/io.hpp"
#include "spanforge/verification.hpp"

namespace spanforge::cli {
namespace {

using io::Json;

struct UsageError : Error {
  using Error::Error;
};

struct VerificationFailed : Error {
  using Error::Error;
};

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::string registry;
  std::string format = "table";
  int jobs = 1;
  MinimaxOptions minimax;

  std::string path;
  std::string out_path;
  std::string input;
  bool all = false;
  bool full = false;
  bool verbose = false;
  std::string dot;
  bool program_graph = false;
  std::string lemma = "all";
  std::string costs;
  std::string family;
  std::string sizes;
  std::string csv;
  std::string gate;
  std::string certificate;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> parse_costs(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size() || !(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad cost '" + tok + "': expected positive numbers");
    }
  }
  return out;
}

BitString parse_input(const std::string& text, int n) {
  BitString x;
  try {
    x = BitString::parse(text);
  } catch (const Error&) {
    throw UsageError("--input expects a 0/1 string, got '" + text + "'");
  }
  if (static_cast<int>(x.size()) != n)
    throw UsageError("--input has " + std::to_string(x.size()) + " bits, expected " +
                     std::to_string(n));
  return x;
}

// ---------------------------------------------------------------- inputs

struct Loaded {
  std::optional<Formula> formula;
  std::optional<SpanProgram> program;
};

GateRegistry registry_for(const Options& o) {
  GateRegistry reg = GateRegistry::builtin();
  if (!o.registry.empty()) reg.merge(io::load_registry(o.registry));
  return reg;
}

Loaded load_any(const Options& o) {
  Loaded l;
  const std::string text = io::read_file(o.path);
  if (io::looks_like_json(text)) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(o.path + ": " + e.what());
    }
    if (j.is_object() && j.contains("dim")) {
      l.program = io::load_program(o.path);
      return l;
    }
  }
  l.formula = io::load_formula(o.path, registry_for(o));
  return l;
}

Formula load_formula_only(const Options& o) {
  Loaded l = load_any(o);
  if (!l.formula) throw UsageError(o.path + ": expected a formula, got a span program");
  return *l.formula;
}

// Normalized, fan-in 2 where AND/OR gates are wider.
Formula prepared(const Formula& phi) { return expand_fanin2(normalize(phi)); }

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else io::write_file(path, text);
}

// ---------------------------------------------------------------- commands

int cmd_parse(const Options& o, std::ostream& out) {
  const Formula phi = load_formula_only(o);
  const Formula norm = normalize(phi);
  if (o.format == "json") {
    emit(out, Json{{"input", phi.to_string()},
                   {"normalized", norm.to_string()},
                   {"n", norm.n()},
                   {"tree", io::formula_to_json(norm)}});
  } else {
    out << "input:      " << phi.to_string() << "\n"
        << "normalized: " << norm.to_string() << "\n"
        << "n:          " << norm.n() << "\n";
  }
  return kExitOk;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  const Formula phi = normalize(load_formula_only(o));
  if (phi.is_constant()) {
    if (o.format == "json") emit(out, io::metrics_to_json(phi, {}));
    else out << "constant " << phi.constant_value() << "\n";
    return kExitOk;
  }
  const FormulaMetrics m = metrics(phi, default_cost_map(o.minimax));
  if (o.format == "json") {
    emit(out, io::metrics_to_json(phi, m));
    return kExitOk;
  }
  std::set<std::string> methods;
  for (const auto& s : m.method)
    if (!s.empty()) methods.insert(s);
  std::string ms;
  for (const auto& s : methods) ms += (ms.empty() ? "" : ",") + s;
  out << "formula      " << phi.to_string() << "\n"
      << "n            " << phi.n() << "\n"
      << "depth        " << m.depth << "\n"
      << "adv          " << num(m.root_adv()) << "\n"
      << "sigma_minus  " << num(m.root_sigma_minus()) << "\n"
      << "sigma_plus   " << num(m.root_sigma_plus()) << "\n"
      << "beta         " << num(m.beta) << "\n"
      << "k_max        " << m.k_max << "\n"
      << "method       " << (ms.empty() ? "none" : ms) << "\n";
  return kExitOk;
}

int cmd_compose(const Options& o, std::ostream& out) {
  const ComposedPtr c = compose_formula(prepared(load_formula_only(o)));
  write_or_print(o.out_path, io::program_to_json(c->program).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_wsize(const Options& o, std::ostream& out) {
  if (o.all == !o.input.empty()) throw UsageError("wsize needs exactly one of --input or --all");
  Loaded l = load_any(o);
  std::shared_ptr<const SpanProgram> p;
  if (l.program) p = std::make_shared<const SpanProgram>(*l.program);
  else p = std::make_shared<const SpanProgram>(compose_formula(prepared(*l.formula))->program);
  if (o.all && p->n() > kMaxExhaustiveVars)
    throw UsageError("--all limited to n <= " + std::to_string(kMaxExhaustiveVars));
  std::vector<BitString> xs;
  if (o.all)
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << p->n()); ++i)
      xs.push_back(BitString::from_index(i, p->n()));
  else
    xs.push_back(parse_input(o.input, p->n()));
  Json arr = Json::array();
  for (const auto& x : xs) {
    const WitnessResult r = o.full ? full_witness_size(*p, x) : witness_size(*p, x);
    if (o.format == "json") {
      arr.push_back(io::witness_to_json(r, x));
    } else {
      out << x.str() << "  case=" << r.value << "  size=" << num(r.size)
          << "  full_size=" << num(r.full_size) << "  residual=" << num(r.residual) << "\n";
    }
  }
  if (o.format == "json") emit(out, arr);
  return kExitOk;
}

Json spectral_json(const SpectralReport& s) {
  Json ev = Json::array();
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) ev.push_back(s.eigenvalues[i]);
  return Json{{"eigenvalues", ev}, {"gap", s.gap}, {"zero_dim", s.zero_dim}, {"T_est", s.t_est}};
}

int cmd_graph(const Options& o, std::ostream& out) {
  Loaded l = load_any(o);
  SpectralReport rep;
  std::string dot;
  if (l.program) {
    const SpanProgram& p = *l.program;
    const ProgramGraph g = o.input.empty() ? biadjacency(p) : input_graph(p, parse_input(o.input, p.n()));
    rep = spectrum(g.adjacency());
    rep.t_est = p.n() <= 16 ? query_estimate(p) : std::numeric_limits<double>::quiet_NaN();
    dot = to_dot(g);
  } else {
    const Formula phi = prepared(*l.formula);
    const ComposedPtr c = compose_formula(phi);
    const BitString x = o.input.empty() ? BitString::ones(phi.n()) : parse_input(o.input, phi.n());
    if (o.program_graph) {
      const ProgramGraph g = o.input.empty() ? biadjacency(c->program) : input_graph(c->program, x);
      rep = spectrum(g.adjacency());
      dot = to_dot(g);
    } else {
      const NandTree t = build_nand_tree(phi, x);
      rep = spectrum(t.adjacency());
      dot = to_dot(t);
    }
    rep.t_est = query_estimate(*c);
  }
  if (!o.dot.empty()) write_or_print(o.dot, dot, out);
  if (o.dot != "-") emit(out, spectral_json(rep));
  return kExitOk;
}

// Failing items plus the tightest passing one.
VerificationReport condense(const VerificationReport& r) {
  VerificationReport c = r;
  c.items.clear();
  const CheckItem* tight = nullptr;
  for (const auto& it : r.items) {
    if (!it.pass) c.items.push_back(it);
    else if (!tight || it.rhs - it.lhs < tight->rhs - tight->lhs) tight = &it;
  }
  if (tight) c.items.push_back(*tight);
  return c;
}

int cmd_check(const Options& o, std::ostream& out) {
  static const std::set<std::string> program_lemmas{"canonical", "norm"};
  static const std::set<std::string> formula_lemmas{"compose", "dsnorm", "witness", "balance", "gap"};
  if (o.lemma != "all" && !program_lemmas.count(o.lemma) && !formula_lemmas.count(o.lemma))
    throw UsageError("unknown lemma '" + o.lemma + "'");
  Loaded l = load_any(o);
  std::vector<VerificationReport> reports;
  if (l.program) {
    if (formula_lemmas.count(o.lemma))
      throw UsageError("--lemma " + o.lemma + " needs a formula file");
    const std::vector<double> s = o.costs.empty() ? std::vector<double>{} : parse_costs(o.costs);
    if (o.lemma == "canonical" || o.lemma == "all") reports.push_back(check_canonical_premise(*l.program, s));
    if (o.lemma == "norm" || o.lemma == "all") reports.push_back(check_norm_lemma(*l.program, s));
  } else {
    if (program_lemmas.count(o.lemma))
      throw UsageError("--lemma " + o.lemma + " needs a span-program file");
    const Formula phi = prepared(*l.formula);
    const bool all = o.lemma == "all";
    const auto want = [&](const char* k) { return all || o.lemma == k; };
    const auto inputs = check_inputs(phi.n(), o.seed);
    ComposedPtr c;
    if (want("compose") || want("dsnorm") || want("witness")) c = compose_formula(phi);
    const auto over_inputs = [&](const char* lemma, auto fn) {
      VerificationReport agg;
      agg.lemma = lemma;
      agg.instance = phi.to_string();
      for (const auto& x : inputs) {
        VerificationReport r = fn(x);
        for (auto& it : r.items) it.what = "x=" + x.str() + " " + it.what;
        agg.merge(o.verbose ? r : condense(r));
      }
      if (phi.n() > 12)
        agg.notes.push_back("sampled " + std::to_string(inputs.size()) + " inputs");
      reports.push_back(std::move(agg));
    };
    if (want("compose"))
      over_inputs("compose", [&](const BitString& x) { return check_compose_lemma(*c, x); });
    if (want("dsnorm")) reports.push_back(check_directsum_norm(*c));
    if (want("witness"))
      over_inputs("witness", [&](const BitString& x) { return check_witness_bounds(*c, x); });
    if (want("balance")) reports.push_back(check_balance_lemma(phi));
    if (want("gap")) {
      VerificationReport cal = calibrate_nand_tree(phi);
      const bool ok = cal.pass;
      reports.push_back(std::move(cal));
      if (ok)
        over_inputs("gap", [&](const BitString& x) { return check_gap_lemma(phi, x); });
    }
  }
  bool pass = true;
  Json arr = Json::array();
  for (const auto& r : reports) {
    pass = pass && r.pass;
    arr.push_back(report_to_json(r));
  }
  if (o.format == "json") {
    emit(out, arr);
  } else {
    for (const auto& r : reports) {
      out << (r.pass ? "PASS " : "FAIL ") << r.lemma << "  " << r.instance << "  ("
          << r.items.size() << " items)\n";
      for (const auto& it : r.items)
        if (!it.pass) out << "    " << it.what << ": " << num(it.lhs) << " vs " << num(it.rhs) << "\n";
      for (const auto& n : r.notes) out << "    note: " << n << "\n";
    }
  }
  return pass ? kExitOk : kExitVerification;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  const auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size() || v < 1) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad size '" + s + "'");
    }
  };
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int a = to_int(text.substr(0, dots)), b = to_int(text.substr(dots + 2));
    for (int n = a; n <= b; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(to_int(tok));
  return out;
}

struct SweepRow {
  int n = 0;
  double adv = 0, sigma = 0, wsize = 0, wsizef = 0, norm = 0, t_est = 0, gap = 0;
};

SweepRow sweep_one(const std::string& family, int n, std::uint64_t seed) {
  Formula phi = family == "balanced-andor" ? balanced_andor(n)
                : family == "skew-andor"   ? skew_andor(n)
                                           : random_andor(n, seed);
  phi = prepared(phi);
  SweepRow row;
  row.n = n;
  const FormulaMetrics m = metrics(phi);
  row.adv = m.root_adv();
  row.sigma = m.root_sigma_minus();
  const ComposedPtr c = compose_formula(phi);
  const auto mx = max_witness_recursion(*c);
  for (int b = 0; b < 2; ++b) {
    if (!std::isnan(mx.front().size[b])) row.wsize = std::max(row.wsize, mx.front().size[b]);
    if (!std::isnan(mx.front().full_size[b])) row.wsizef = std::max(row.wsizef, mx.front().full_size[b]);
  }
  row.norm = abs_norm(biadjacency(c->program).biadj).norm;
  row.t_est = row.wsizef * row.norm;
  row.gap = spectrum(build_nand_tree(phi, BitString::ones(n)).adjacency()).gap;
  return row;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  if (o.family != "balanced-andor" && o.family != "skew-andor" && o.family != "random-andor")
    throw UsageError("unknown family '" + o.family + "'");
  const std::vector<int> sizes = parse_sizes(o.sizes);
  std::vector<SweepRow> rows(sizes.size());
  std::vector<std::string> errors(sizes.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t id; (id = next++) < sizes.size();) {
      try {
        rows[id] = sweep_one(o.family, sizes[id], o.seed + static_cast<std::uint64_t>(id));
      } catch (const std::exception& e) {
        errors[id] = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(o.jobs, static_cast<int>(sizes.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t id = 0; id < sizes.size(); ++id)
    if (!errors[id].empty())
      throw DomainError("n=" + std::to_string(sizes[id]) + ": " + errors[id]);
  std::string csv = "n,adv,sigma_minus,wsize,wsizef,abs_norm,t_est,gap\n";
  for (const auto& r : rows)
    csv += std::to_string(r.n) + "," + num(r.adv) + "," + num(r.sigma) + "," + num(r.wsize) +
           "," + num(r.wsizef) + "," + num(r.norm) + "," + num(r.t_est) + "," + num(r.gap) + "\n";
  write_or_print(o.csv, csv, out);
  return kExitOk;
}

int cmd_adv(const Options& o, std::ostream& out) {
  if (!o.certificate.empty()) {
    const std::string text = io::read_file(o.certificate);
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(o.certificate + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("gate") || !j.contains("costs") || !j.contains("gamma"))
      throw SchemaError(o.certificate + ": certificate needs gate, costs, gamma");
    std::vector<double> s;
    Eigen::MatrixXd gamma;
    try {
      s = j["costs"].get<std::vector<double>>();
      const auto rows = j["gamma"].get<std::vector<std::vector<double>>>();
      gamma.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.size()) throw SchemaError("gamma must be square");
        for (std::size_t c = 0; c < rows.size(); ++c)
          gamma(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(o.certificate + ": " + e.what());
    }
    const GatePtr g = registry_for(o).lookup(j["gate"].get<std::string>(), static_cast<int>(s.size()));
    if (gamma.rows() != (Eigen::Index{1} << g->arity))
      throw SchemaError(o.certificate + ": gamma must be 2^k x 2^k");
    try {
      const double bound = validate_adversary_matrix(*g, gamma, s);
      emit(out, Json{{"bound", bound}, {"method", "certificate"}, {"tolerance", 1e-9}});
      return kExitOk;
    } catch (const InfeasibleCertificate& e) {
      emit(out, Json{{"error", e.what()}, {"violations", e.violations()}});
      return kExitVerification;
    }
  }
  if (o.gate.empty()) throw UsageError("adv needs --gate or --certificate");
  const std::vector<double> s = parse_costs(o.costs);
  const GatePtr g = registry_for(o).lookup(o.gate, static_cast<int>(s.size()));
  const CostResult r = default_cost_map(o.minimax)(*g, s);
  emit(out, Json{{"bound", r.value},
                 {"method", r.method},
                 {"tolerance", r.method == "minimax" ? o.minimax.tolerance : 0.0}});
  return kExitOk;
}

// ---------------------------------------------------------------- config

void apply_config(CLI::App& app, Options& o) {
  if (o.config.empty()) return;
  const std::string text = io::read_file(o.config);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    const std::string where = o.config + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw SchemaError(where + "expected key=value");
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto given = [&](const char* flag) { return app.get_option(flag)->count() > 0; };
    try {
      if (key == "seed") {
        if (!given("--seed")) o.seed = std::stoull(value);
      } else if (key == "registry") {
        if (!given("--registry")) o.registry = value;
      } else if (key == "format") {
        if (value != "json" && value != "table") throw SchemaError(where + "format must be json or table");
        if (!given("--format")) o.format = value;
      } else if (key == "jobs") {
        if (!given("--jobs")) o.jobs = std::stoi(value);
      } else if (key == "minimax_restarts") {
        o.minimax.restarts = std::stoi(value);
      } else if (key == "minimax_iterations") {
        o.minimax.iterations = std::stoi(value);
      } else if (key == "minimax_tolerance") {
        o.minimax.tolerance = std::stod(value);
      } else {
        throw SchemaError(where + "unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw SchemaError(where + "bad value for '" + key + "'");
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Span programs for read-once formulas", "spanforge"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "key=value configuration file");
  app.add_option("--seed", o.seed, "random seed (SPANFORGE_SEED overrides)");
  app.add_option("--registry", o.registry, "extra gate registry file");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "table"}));
  app.add_option("--jobs", o.jobs, "sweep worker threads")->check(CLI::PositiveNumber);

  auto* parse = app.add_subcommand("parse", "parse and normalize a formula");
  parse->add_option("path", o.path)->required();
  auto* met = app.add_subcommand("metrics", "formula metrics");
  met->add_option("path", o.path)->required();
  auto* comp = app.add_subcommand("compose", "compose a span program along a formula");
  comp->add_option("path", o.path)->required();
  comp->add_option("-o,--out", o.out_path, "output file");
  auto* ws = app.add_subcommand("wsize", "witness sizes");
  ws->add_option("path", o.path)->required();
  ws->add_option("--input", o.input, "input bits, x1 first");
  ws->add_flag("--all", o.all, "every input");
  ws->add_flag("--full", o.full, "use the full witness size for the reported witness");
  auto* gr = app.add_subcommand("graph", "spectral report and DOT export");
  gr->add_option("path", o.path)->required();
  gr->add_option("--dot", o.dot, "write DOT to this file ('-' for stdout)");
  gr->add_option("--input", o.input, "input bits");
  gr->add_flag("--program-graph", o.program_graph, "use the span-program graph of a formula");
  auto* ck = app.add_subcommand("check", "run lemma checkers");
  ck->add_option("path", o.path)->required();
  ck->add_option("--lemma", o.lemma, "canonical|norm|compose|dsnorm|witness|balance|gap|all");
  ck->add_option("--costs", o.costs, "comma-separated costs for program checks");
  ck->add_flag("--verbose", o.verbose, "keep every item");
  auto* sw = app.add_subcommand("sweep", "family sweep to CSV");
  sw->add_option("--family", o.family)->required();
  sw->add_option("--sizes", o.sizes, "A..B or a comma list")->required();
  sw->add_option("--csv", o.csv, "output file");
  auto* adv = app.add_subcommand("adv", "adversary bound of one gate");
  adv->add_option("--gate", o.gate);
  adv->add_option("--costs", o.costs);
  adv->add_option("--certificate", o.certificate, "certificate JSON to validate");

  std::vector<std::string> storage{"spanforge"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    apply_config(app, o);
    if (const char* env = std::getenv("SPANFORGE_SEED"); env && *env) {
      try {
        o.seed = std::stoull(env);
      } catch (const std::logic_error&) {
        throw UsageError(std::string("SPANFORGE_SEED is not an integer: ") + env);
      }
    }
    o.minimax.seed = o.seed;
    if (o.jobs < 1) throw UsageError("jobs must be positive");
    if (parse->parsed()) return cmd_parse(o, out);
    if (met->parsed()) return cmd_metrics(o, out);
    if (comp->parsed()) return cmd_compose(o, out);
    if (ws->parsed()) return cmd_wsize(o, out);
    if (gr->parsed()) return cmd_graph(o, out);
    if (ck->parsed()) return cmd_check(o, out);
    if (sw->parsed()) return cmd_sweep(o, out);
    if (adv->parsed()) return cmd_adv(o, out);
  } catch (const UsageError& e) {
    err << "spanforge: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "spanforge: " << e.what() << " (bracket " << num(e.lower()) << ", " << num(e.upper())
        << ")\n";
    return kExitVerification;
  } catch (const Error& e) {
    err << "spanforge: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace spanforge::cli
