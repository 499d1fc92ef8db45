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


#include "spanforge/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spanforge/errors.hpp"

namespace spanforge::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot write");
  out << text;
  if (!out) throw Error(path + ": write failed");
}

bool looks_like_json(std::string_view text) {
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    return c == '{';
  }
  return false;
}

// ---------------------------------------------------------------- formula

Json formula_to_json(const Formula& phi) {
  if (phi.is_constant())
    return Json{{"gate", phi.constant_value() ? "CONST1" : "CONST0"},
                {"truth_table", phi.constant_value() ? "1" : "0"},
                {"children", Json::array()}};
  std::vector<Json> out(phi.nodes().size());
  for (std::size_t id = 0; id < phi.nodes().size(); ++id) {
    const Node& nd = phi.node(static_cast<int>(id));
    if (nd.is_leaf()) {
      out[id] = Json{{"var", nd.var + 1}};
      continue;
    }
    Json ch = Json::array();
    for (int c : nd.children) ch.push_back(std::move(out[c]));
    out[id] = Json{{"gate", nd.gate->name},
                   {"truth_table", nd.gate->tt_string()},
                   {"children", std::move(ch)}};
  }
  return out[phi.root()];
}

namespace {

std::vector<std::uint8_t> parse_bits(const std::string& s, const std::string& what) {
  std::vector<std::uint8_t> out;
  for (char c : s) {
    if (c != '0' && c != '1') throw SchemaError(what + ": expected a 0/1 string");
    out.push_back(c == '1');
  }
  return out;
}

struct FormulaBuilder {
  const GateRegistry& registry;
  std::vector<Node> nodes;
  int max_var = 0;

  int add(const Json& j) {
    if (!j.is_object()) throw SchemaError("formula node must be an object");
    if (j.contains("var")) {
      if (!j["var"].is_number_integer() || j["var"].get<int>() < 1)
        throw SchemaError("'var' must be a positive integer");
      const int v = j["var"].get<int>();
      max_var = std::max(max_var, v);
      nodes.push_back(Node{v - 1, nullptr, {}});
      return static_cast<int>(nodes.size()) - 1;
    }
    if (!j.contains("gate") || !j["gate"].is_string())
      throw SchemaError("formula node needs 'gate' or 'var'");
    const std::string name = j["gate"].get<std::string>();
    std::vector<int> ch;
    if (j.contains("children")) {
      if (!j["children"].is_array()) throw SchemaError("'children' must be an array");
      for (const auto& c : j["children"]) ch.push_back(add(c));
    }
    const int arity = static_cast<int>(ch.size());
    GatePtr g;
    if (registry.contains(name)) {
      g = registry.lookup(name, arity);
      if (j.contains("truth_table") &&
          j["truth_table"].get<std::string>() != g->tt_string())
        throw SchemaError("gate " + name + ": truth_table disagrees with registry");
    } else if (j.contains("truth_table") && j["truth_table"].is_string()) {
      GateSpec spec = GateSpec::make(name, parse_bits(j["truth_table"].get<std::string>(),
                                                      "truth_table"));
      if (spec.arity != arity)
        throw ArityError("gate " + name + " takes " + std::to_string(spec.arity) +
                         " inputs, got " + std::to_string(arity));
      g = std::make_shared<const GateSpec>(std::move(spec));
    } else {
      throw RegistryError("unknown gate '" + name + "'");
    }
    nodes.push_back(Node{-1, g, std::move(ch)});
    return static_cast<int>(nodes.size()) - 1;
  }
};

}  // namespace

Formula formula_from_json(const Json& j, const GateRegistry& registry) {
  FormulaBuilder b{registry, {}, 0};
  const int root = b.add(j);
  if (b.nodes.size() == 1 && !b.nodes[0].is_leaf() && b.nodes[0].gate->arity == 0)
    return Formula::constant(0, b.nodes[0].gate->eval(0));
  return Formula(b.max_var, std::move(b.nodes), root);
}

// ---------------------------------------------------------------- programs

namespace {

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from(const Json& j, int dim, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + " must be an array");
  if (static_cast<int>(j.size()) != dim)
    throw SchemaError(what + " has length " + std::to_string(j.size()) +
                      ", expected " + std::to_string(dim));
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number()) throw SchemaError(what + " must hold numbers");
    v[i] = j[i].get<double>();
    if (!std::isfinite(v[i])) throw SchemaError(what + " must be finite");
  }
  return v;
}

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  return j[key];
}

}  // namespace

Json program_to_json(const SpanProgram& p) {
  Json free = Json::array();
  Json inputs = Json::array();
  Json labels = Json::array();
  for (int i = 0; i < p.size(); ++i)
    if (p.is_free(i)) {
      free.push_back(vec_json(p.matrix().col(i)));
      labels.push_back(p.label(i));
    }
  for (int j = 0; j < p.n(); ++j)
    for (int b = 0; b < 2; ++b) {
      const auto cols = p.columns_for(j, b == 1);
      if (cols.empty()) continue;
      Json vs = Json::array();
      for (int c : cols) {
        vs.push_back(vec_json(p.matrix().col(c)));
        labels.push_back(p.label(c));
      }
      inputs.push_back(Json{{"j", j + 1}, {"b", b}, {"vectors", std::move(vs)}});
    }
  return Json{{"n", p.n()},          {"dim", p.dim()},
              {"target", vec_json(p.target())},
              {"free", std::move(free)}, {"inputs", std::move(inputs)},
              {"labels", std::move(labels)}};
}

SpanProgram program_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("span program must be a JSON object");
  const Json& jn = field(j, "n");
  const Json& jd = field(j, "dim");
  if (!jn.is_number_integer() || jn.get<int>() < 0)
    throw SchemaError("'n' must be a nonnegative integer");
  if (!jd.is_number_integer() || jd.get<int>() < 1)
    throw SchemaError("'dim' must be a positive integer");
  const int n = jn.get<int>(), dim = jd.get<int>();
  Eigen::VectorXd t = vec_from(field(j, "target"), dim, "target");
  std::vector<SpanColumn> cols;
  if (j.contains("free")) {
    if (!j["free"].is_array()) throw SchemaError("'free' must be an array");
    for (const auto& v : j["free"]) cols.push_back({vec_from(v, dim, "free vector"), {}, ""});
  }
  if (j.contains("inputs")) {
    if (!j["inputs"].is_array()) throw SchemaError("'inputs' must be an array");
    for (const auto& in : j["inputs"]) {
      if (!in.is_object()) throw SchemaError("input entry must be an object");
      const Json& jj = field(in, "j");
      const Json& jb = field(in, "b");
      if (!jj.is_number_integer() || jj.get<int>() < 1 || jj.get<int>() > n)
        throw SchemaError("input 'j' must lie in 1..n");
      if (!jb.is_number_integer() || (jb.get<int>() != 0 && jb.get<int>() != 1))
        throw SchemaError("input 'b' must be 0 or 1");
      const Json& vs = field(in, "vectors");
      if (!vs.is_array()) throw SchemaError("'vectors' must be an array");
      for (const auto& v : vs)
        cols.push_back({vec_from(v, dim, "input vector"),
                        InputIndex{jj.get<int>() - 1, jb.get<int>() == 1}, ""});
    }
  }
  if (j.contains("labels")) {
    const Json& lb = j["labels"];
    if (!lb.is_array() || lb.size() != cols.size())
      throw SchemaError("'labels' must list one label per column");
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (!lb[i].is_string()) throw SchemaError("labels must be strings");
      cols[i].label = lb[i].get<std::string>();
    }
  }
  return SpanProgram(n, std::move(t), std::move(cols));
}

Json witness_to_json(const WitnessResult& r, const BitString& x) {
  return Json{{"input", x.str()},
              {"case", r.value ? 1 : 0},
              {"size", r.size},
              {"full_size", r.full_size},
              {"residuals", r.residual},
              {"witness", vec_json(r.witness)}};
}

Json metrics_to_json(const Formula& phi, const FormulaMetrics& m) {
  Json out{{"formula", phi.to_string()}, {"n", phi.n()}};
  if (phi.is_constant()) {
    out["constant"] = phi.constant_value();
    return out;
  }
  out["depth"] = m.depth;
  out["k_max"] = m.k_max;
  out["adv"] = m.root_adv();
  out["sigma_minus"] = m.root_sigma_minus();
  out["sigma_plus"] = m.root_sigma_plus();
  out["beta"] = m.beta;
  Json verts = Json::array();
  for (std::size_t id = 0; id < phi.nodes().size(); ++id) {
    const Node& nd = phi.node(static_cast<int>(id));
    Json v{{"id", id},
           {"label", nd.is_leaf() ? "x" + std::to_string(nd.var + 1) : nd.gate->name},
           {"size", m.size[id]},
           {"adv", m.adv[id]},
           {"sigma_minus", m.sigma_minus[id]},
           {"sigma_plus", m.sigma_plus[id]}};
    if (!m.method[id].empty()) v["method"] = m.method[id];
    verts.push_back(std::move(v));
  }
  out["vertices"] = std::move(verts);
  return out;
}

// ---------------------------------------------------------------- files

namespace {

std::string position(const std::string& path, std::string_view text,
                     std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": ";
}

}  // namespace

Formula load_formula(const std::string& path, const GateRegistry& registry) {
  std::string text = read_file(path);
  if (looks_like_json(text)) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path + ": " + e.what());
    }
    return formula_from_json(j, registry);
  }
  // Blank out comments so offsets stay valid.
  bool comment = false;
  for (char& c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    if (comment) c = ' ';
  }
  try {
    return parse_formula(text, registry);
  } catch (const ParseError& e) {
    throw ParseError(position(path, text, e.offset()) + e.what(), e.offset());
  } catch (const RegistryError& e) {
    throw RegistryError(path + ": " + e.what());
  } catch (const ArityError& e) {
    throw ArityError(path + ": " + e.what());
  } catch (const ReadOnceError& e) {
    throw ReadOnceError(path + ": " + e.what());
  }
}

SpanProgram load_program(const std::string& path) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  try {
    return program_from_json(j);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  } catch (const DomainError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

GateRegistry load_registry(const std::string& path) {
  const std::string text = read_file(path);
  const auto dir = std::filesystem::path(path).parent_path();
  return GateRegistry::parse(text, dir.empty() ? "." : dir.string());
}

}  // namespace spanforge::io

namespace spanforge {

GateRegistry GateRegistry::parse(std::string_view text, const std::string& base_dir) {
  GateRegistry reg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word) || word[0] == '#') continue;
    if (word != "gate") throw RegistryError(where + "expected 'gate'");
    std::string name;
    if (!(ls >> name)) throw RegistryError(where + "missing gate name");
    if (!(name[0] >= 'A' && name[0] <= 'Z') ||
        name.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_") != std::string::npos)
      throw RegistryError(where + "bad gate name '" + name + "'");
    std::map<std::string, std::string> kv;
    while (ls >> word) {
      const auto eq = word.find('=');
      if (eq == std::string::npos) throw RegistryError(where + "expected key=value, got '" + word + "'");
      const std::string key = word.substr(0, eq);
      if (key != "arity" && key != "tt" && key != "program" && key != "dual")
        throw RegistryError(where + "unknown key '" + key + "'");
      if (kv.count(key)) throw RegistryError(where + "duplicate key '" + key + "'");
      kv[key] = word.substr(eq + 1);
    }
    if (!kv.count("arity") || !kv.count("tt"))
      throw RegistryError(where + "gate needs arity= and tt=");
    int arity = -1;
    try {
      std::size_t used = 0;
      arity = std::stoi(kv["arity"], &used);
      if (used != kv["arity"].size()) arity = -1;
    } catch (const std::exception&) {
    }
    if (arity < 0 || arity > kMaxArity)
      throw RegistryError(where + "arity must be an integer in 0.." + std::to_string(kMaxArity));
    const std::string& tt = kv["tt"];
    if (tt.size() != (std::size_t{1} << arity) ||
        tt.find_first_not_of("01") != std::string::npos)
      throw RegistryError(where + "tt must be " + std::to_string(1 << arity) +
                          " characters of 0/1");
    std::vector<std::uint8_t> bits;
    for (char c : tt) bits.push_back(c == '1');
    GateSpec spec = GateSpec::make(name, std::move(bits));
    const auto load = [&](const std::string& key) -> ProgramPtr {
      if (!kv.count(key)) return nullptr;
      std::filesystem::path p(kv[key]);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      auto prog = std::make_shared<const SpanProgram>(io::load_program(p.string()));
      if (prog->n() != arity)
        throw RegistryError(where + key + " program has " + std::to_string(prog->n()) +
                            " inputs, gate has " + std::to_string(arity));
      for (std::uint32_t r = 0; r < (1u << arity); ++r) {
        const BitString x = BitString::from_index(r, arity);
        const bool want = spec.eval(r) == (key == "program");
        if (eval_span(*prog, x) != want)
          throw RegistryError(where + key + " program disagrees with tt on input " + x.str());
      }
      return prog;
    };
    if (kv.count("program") || kv.count("dual"))
      spec.programs = ProgramPair{load("program"), load("dual")};
    try {
      reg.add(std::move(spec));
    } catch (const RegistryError& e) {
      throw RegistryError(where + e.what());
    }
  }
  return reg;
}

}  // namespace spanforge
