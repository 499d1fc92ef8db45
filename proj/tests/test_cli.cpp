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

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "spanforge/cli.hpp"
#include "spanforge/io.hpp"

namespace cli = spanforge::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch() {
  const char* env = std::getenv("SPANFORGE_TEST_TMP");
  fs::path p = fs::path(env ? env : fs::temp_directory_path().string()) / "cli_scratch";
  fs::create_directories(p);
  return p;
}

std::string put(const std::string& name, const std::string& text) {
  const auto p = (scratch() / name).string();
  spanforge::io::write_file(p, text);
  return p;
}

// Unsets SPANFORGE_SEED for the lifetime of the guard.
struct SeedEnv {
  explicit SeedEnv(const char* value) {
    if (value) ::setenv("SPANFORGE_SEED", value, 1);
    else ::unsetenv("SPANFORGE_SEED");
  }
  ~SeedEnv() { ::unsetenv("SPANFORGE_SEED"); }
};

}  // namespace

TEST_CASE("usage errors exit with 1") {
  SeedEnv env(nullptr);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"parse"}).code == cli::kExitUsage);
  CHECK(run({"--format", "xml", "parse", "x"}).code == cli::kExitUsage);
  CHECK(run({"--jobs", "0", "sweep", "--family", "balanced-andor", "--sizes", "2"}).code ==
        cli::kExitUsage);
  const Run r = run({"sweep", "--family", "pyramid", "--sizes", "2"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("unknown family") != std::string::npos);
  CHECK(run({"check", put("l.txt", "AND(x1,x2)\n"), "--lemma", "nope"}).code == cli::kExitUsage);
}

TEST_CASE("help exits with 0") {
  const Run r = run({"--help"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("sweep") != std::string::npos);
}

TEST_CASE("parse and metrics") {
  SeedEnv env(nullptr);
  const auto f = put("not.txt", "NOT(OR(x1,x2))\n");
  Run r = run({"--format", "table", "parse", f});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("normalized: NOR(x1,x2)") != std::string::npos);

  r = run({"--format", "json", "metrics", put("or.txt", "OR(x1,x2)\n")});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["n"] == 2);
  CHECK(j["adv"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(j["sigma_minus"].get<double>() == doctest::Approx(1 + 1 / std::sqrt(2.0)).epsilon(1e-12));

  CHECK(run({"parse", put("bad.txt", "AND(x1,x1)\n")}).code == cli::kExitInput);
  CHECK(run({"parse", (scratch() / "missing.txt").string()}).code == cli::kExitInput);
}

TEST_CASE("compose writes a loadable program") {
  SeedEnv env(nullptr);
  const auto f = put("or2.txt", "OR(x1,x2)\n");
  Run r = run({"compose", f});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["n"] == 2);
  CHECK(j["dim"] == 1);
  CHECK(j["inputs"].size() == 2);
  CHECK(j["inputs"][0]["vectors"][0][0].get<double>() ==
        doctest::Approx(std::pow(0.5, 0.25)).epsilon(1e-12));

  const auto path = (scratch() / "or2.json").string();
  REQUIRE(run({"compose", f, "-o", path}).code == cli::kExitOk);
  r = run({"--format", "json", "wsize", path, "--input", "10"});
  REQUIRE(r.code == cli::kExitOk);
  const auto w = nlohmann::json::parse(r.out);
  REQUIRE(w.size() == 1);
  CHECK(w[0]["size"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("corrupted program JSON exits with 2") {
  SeedEnv env(nullptr);
  CHECK(run({"wsize", put("trunc.json", "{\"n\": 2, \"dim\": 1, \"target\": [1.0"), "--all"}).code ==
        cli::kExitInput);
  CHECK(run({"wsize", put("schema.json", "{\"n\": 2, \"dim\": 1, \"target\": [1.0, 2.0]}"), "--all"})
            .code == cli::kExitInput);
}

TEST_CASE("wsize over all inputs") {
  SeedEnv env(nullptr);
  const Run r = run({"--format", "json", "wsize", put("and.txt", "AND(x1,x2)\n"), "--all"});
  REQUIRE(r.code == cli::kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.size() == 4);
}

TEST_CASE("check exits 0 on sound formulas") {
  SeedEnv env(nullptr);
  const auto f = put("bal4.txt", "OR(AND(x1,x2),AND(x3,x4))\n");
  Run r = run({"check", f, "--lemma", "gap"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = run({"check", f, "--lemma", "all"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("PASS compose") != std::string::npos);
}

TEST_CASE("sweep CSV") {
  SeedEnv env(nullptr);
  const std::string header = "n,adv,sigma_minus,wsize,wsizef,abs_norm,t_est,gap\n";
  Run r = run({"sweep", "--family", "balanced-andor", "--sizes", "5..4"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == header);

  r = run({"sweep", "--family", "balanced-andor", "--sizes", "2,4"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind(header, 0) == 0);
  CHECK(r.out.find("\n4,2,") != std::string::npos);

  const auto csv = (scratch() / "sweep.csv").string();
  REQUIRE(run({"sweep", "--family", "skew-andor", "--sizes", "3", "--csv", csv}).code ==
          cli::kExitOk);
  CHECK(spanforge::io::read_file(csv).rfind(header, 0) == 0);
}

TEST_CASE("sweep output is independent of --jobs") {
  SeedEnv env(nullptr);
  const std::vector<std::string> base = {"sweep", "--family", "random-andor", "--sizes", "2..9"};
  auto with = [&](const char* jobs) {
    std::vector<std::string> a = {"--seed", "11", "--jobs", jobs};
    a.insert(a.end(), base.begin(), base.end());
    return run(a);
  };
  const Run one = with("1");
  const Run four = with("4");
  REQUIRE(one.code == cli::kExitOk);
  CHECK(one.out == four.out);
  CHECK(one.out == with("1").out);
}

TEST_CASE("seed precedence") {
  const std::vector<std::string> sweep = {"sweep", "--family", "random-andor", "--sizes", "6..8"};
  auto with_seed = [&](const char* seed) {
    std::vector<std::string> a = {"--seed", seed};
    a.insert(a.end(), sweep.begin(), sweep.end());
    return run(a).out;
  };
  std::string s5, s9;
  {
    SeedEnv env(nullptr);
    s5 = with_seed("5");
    s9 = with_seed("9");
  }
  {
    SeedEnv env("5");
    CHECK(with_seed("9") == s5);
  }
  {
    SeedEnv env("");
    CHECK(with_seed("9") == s9);
  }
  {
    SeedEnv env("abc");
    CHECK(run({"parse", put("or.txt", "OR(x1,x2)\n")}).code == cli::kExitUsage);
  }
}

TEST_CASE("config file") {
  SeedEnv env(nullptr);
  const auto f = put("cfgf.txt", "AND(x1,x2)\n");
  const auto good = put("good.cfg", "# comment\nformat = table\nseed=3\n\n");
  const Run r = run({"--config", good, "parse", f});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("normalized:") != std::string::npos);
  CHECK(run({"--config", put("unknown.cfg", "colour=blue\n"), "parse", f}).code == cli::kExitInput);
  CHECK(run({"--config", put("badval.cfg", "jobs=many\n"), "parse", f}).code == cli::kExitInput);
  CHECK(run({"--config", put("badfmt.cfg", "format=xml\n"), "parse", f}).code == cli::kExitInput);
  // Command line beats the file.
  const Run j = run({"--config", good, "--format", "json", "parse", f});
  CHECK(j.code == cli::kExitOk);
  CHECK(nlohmann::json::parse(j.out).contains("normalized"));
}

TEST_CASE("adv") {
  SeedEnv env(nullptr);
  Run r = run({"adv", "--gate", "OR", "--costs", "3,4"});
  REQUIRE(r.code == cli::kExitOk);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["bound"].get<double>() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(j["method"] == "closed_form");

  r = run({"adv", "--gate", "MAJ3", "--costs", "1,1,1"});
  REQUIRE(r.code == cli::kExitOk);
  j = nlohmann::json::parse(r.out);
  CHECK(j["bound"].get<double>() == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(j["method"] == "minimax");

  CHECK(run({"adv", "--gate", "MAJ", "--costs", "1,1,1"}).code == cli::kExitInput);
  CHECK(run({"adv", "--gate", "OR", "--costs", "1,-1"}).code == cli::kExitUsage);

  const auto cert = put("cert.json",
                        R"({"gate":"OR","costs":[1,1],"gamma":[[0,1,1,0],[1,0,0,0],[1,0,0,0],[0,0,0,0]]})");
  r = run({"adv", "--certificate", cert});
  CHECK(r.code == cli::kExitOk);
  CHECK(run({"adv", "--certificate", put("cert_bad.json", R"({"gate":"OR"})")}).code ==
        cli::kExitInput);
}

TEST_CASE("graph DOT output") {
  SeedEnv env(nullptr);
  const Run r = run({"graph", put("g.txt", "OR(x1,x2)\n"), "--input", "11", "--dot", "-"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.rfind("graph \"T\" {", 0) == 0);
}
