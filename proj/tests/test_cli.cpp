// Copyright 2026 The sgwl Authors
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

// End-to-end tests of the command-line tool: spawn the binary, inspect its
// exit code and output.

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sgwl/io.hpp"

namespace fs = std::filesystem;
using sgwl::CMatrix;
using sgwl::Json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" SGWL_CLI_PATH "' " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string spec(const std::string& name) { return "'" SGWL_SPEC_DIR "/" + name + "'"; }

const std::string kPair = spec("depolarizing.json") + " " + spec("positive-not-cp.json");

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string cell;
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::stringstream s(text);
  std::string line;
  std::getline(s, line);
  csv.header = split(line);
  while (std::getline(s, line))
    if (!line.empty()) csv.rows.push_back(split(line));
  return csv;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sgwl-cli-test-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("check verdicts", "[cli]") {
  const Run cp = run("check " + spec("depolarizing.json"));
  REQUIRE(cp.code == 0);
  const Json j = Json::parse(cp.out);
  CHECK(j["cp"] == true);
  CHECK(j["positivity"] == "CompletelyPositive");
  CHECK(j["kossakowski_min_eig"].get<double>() == Catch::Approx(1.0));

  const Run pos = run("check " + spec("positive-not-cp.json") + " --at-time 0.5");
  REQUIRE(pos.code == 0);
  const Json p = Json::parse(pos.out);
  CHECK(p["cp"] == false);
  CHECK(p["positivity"] == "PositiveNotCP");
  CHECK(p["kossakowski_min_eig"].get<double>() == Catch::Approx(-1.0));

  const Run bad = run("check " + spec("not-positive.json"));
  REQUIRE(bad.code == 0);
  const Json b = Json::parse(bad.out);
  CHECK(b["positivity"] == "NotPositive");
  CHECK(b["verdict"]["violation"]["value"].get<double>() < 0.0);
}

TEST_CASE("the seed comes from the environment", "[cli]") {
  const Run a = run("check " + spec("positive-not-cp.json"), "SGWL_SEED=12345");
  REQUIRE(a.code == 0);
  CHECK(Json::parse(a.out)["seed"] == 12345);
  CHECK(Json::parse(run("check " + spec("positive-not-cp.json")).out)["seed"] == sgwl::kDefaultSeed);
  CHECK(run("check " + spec("positive-not-cp.json"), "SGWL_SEED=12x").code == 2);
}

TEST_CASE("input errors exit with code 2", "[cli]") {
  CHECK(run("check " + spec("malformed.json")).code == 2);
  CHECK(run("check /nonexistent/spec.json").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("check " + spec("depolarizing.json") + " --at-time -1").code == 2);
  CHECK(run("scan " + kPair + " --t0 1 --t1 0.5").code == 2);
  CHECK(run("scan " + kPair + " --steps 1").code == 2);
  CHECK(run("scan " + kPair + " --criteria bogus").code == 2);
  CHECK(run("scan " + spec("depolarizing.json") + " --criteria pairing-rhobe").code == 2);
}

TEST_CASE("threshold scan", "[cli][scan]") {
  const Run r = run("scan " + kPair + " --t0 0.1 --t1 2 --steps 40 --criteria choi-min,pairing-rhobe");
  REQUIRE(r.code == 0);
  const Csv csv = parse_csv(r.out);
  CHECK(csv.header == std::vector<std::string>{"t", "alpha", "choi_min", "pairing_rhobe"});
  REQUIRE(csv.rows.size() == 40);
  CHECK(std::stod(csv.rows.front()[0]) == 0.1);
  CHECK(std::stod(csv.rows.back()[0]) == 2.0);
  CHECK(std::stod(csv.rows.front()[3]) < 0.0);

  int sign_changes = 0;
  double crossing = NAN;
  for (std::size_t i = 1; i < csv.rows.size(); ++i) {
    const double t0 = std::stod(csv.rows[i - 1][0]), t1 = std::stod(csv.rows[i][0]);
    CHECK(t1 > t0);
    CHECK(std::stod(csv.rows[i][1]) == Catch::Approx(std::exp(-2 * t1)).epsilon(1e-14));
    const double p0 = std::stod(csv.rows[i - 1][3]), p1 = std::stod(csv.rows[i][3]);
    if ((p0 < 0) != (p1 < 0)) {
      ++sign_changes;
      crossing = t0 - p0 * (t1 - t0) / (p1 - p0);
    }
  }
  CHECK(sign_changes == 1);
  CHECK(std::abs(crossing - std::log(3.0) / 2) < 0.05);

  const Csv two = parse_csv(run("scan " + kPair + " --steps 2").out);
  CHECK(two.rows.size() == 2);

  // deterministic output; a non-reference pair leaves alpha empty
  CHECK(run("scan " + kPair + " --steps 7").out == run("scan " + kPair + " --steps 7").out);
  const Csv other = parse_csv(run("scan " + spec("depolarizing.json") + " " + spec("depolarizing.json") +
                                  " --steps 3 --criteria pairing-rhobe").out);
  CHECK(other.header == std::vector<std::string>{"t", "alpha", "pairing_rhobe"});
  REQUIRE(other.rows.size() == 3);
  CHECK(other.rows[0][1].empty());
}

TEST_CASE("scan writes to a file", "[cli][scan]") {
  const fs::path dir = scratch_dir("scan");
  fs::create_directories(dir);
  const fs::path out = dir / "scan.csv";
  REQUIRE(run("scan " + kPair + " --steps 5 --out '" + out.string() + "'").code == 0);
  std::ifstream f(out);
  std::stringstream s;
  s << f.rdbuf();
  CHECK(parse_csv(s.str()).rows.size() == 5);
  CHECK(run("scan " + kPair + " --steps 5 --out '" + (dir / "missing" / "x.csv").string() + "'").code == 3);
  fs::remove_all(dir);
}

TEST_CASE("decomposition certificates", "[cli][decompose]") {
  const Run feas = run("decompose " + kPair + " --at-time 1.0");
  REQUIRE(feas.code == 0);
  const Json f = Json::parse(feas.out);
  CHECK(f["status"] == "feasible");
  CHECK(f["residual"].get<double>() <= 1e-8);
  REQUIRE(f["J1"]["rows"] == 16);
  const CMatrix j1 = sgwl::matrix_from_base64(f["J1"]["data"].get<std::string>(), 16, 16);
  const CMatrix j2 = sgwl::matrix_from_base64(f["J2"]["data"].get<std::string>(), 16, 16);
  CHECK(sgwl::min_eigenvalue(j1) >= -1e-8);
  CHECK(sgwl::min_eigenvalue(j2) >= -1e-8);

  for (const char* cmd : {"decompose ", "witness "}) {
    const Run inf = run(cmd + kPair + " --at-time 0.2");
    REQUIRE(inf.code == 0);
    const Json i = Json::parse(inf.out);
    CHECK(i["status"] == "infeasible");
    CHECK(i["witness_trace"].get<double>() == Catch::Approx(1.0).margin(1e-12));
    CHECK(i["pairing"].get<double>() < 0.0);
    const CMatrix w = sgwl::matrix_from_base64(i["witness"]["data"].get<std::string>(), 16, 16);
    CHECK(sgwl::min_eigenvalue(w) >= -1e-12);
  }

  const Run cp = run("decompose " + spec("depolarizing.json") + " --at-time 0.7");
  REQUIRE(cp.code == 0);
  const Json c = Json::parse(cp.out);
  CHECK(c["status"] == "feasible");
  const CMatrix zero = sgwl::matrix_from_base64(c["J2"]["data"].get<std::string>(), 4, 4);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("an exhausted iteration budget is inconclusive", "[cli][decompose]") {
  const Run r = run("decompose " + kPair + " --at-time 0.56 --max-iterations 3");
  REQUIRE(r.code == 4);
  const Json j = Json::parse(r.out);
  CHECK(j["status"] == "max-iterations");
  CHECK(j["gap"].get<double>() > 0.0);
}

TEST_CASE("reproduce-paper", "[cli][reproduce]") {
  const fs::path dir = scratch_dir("reports");
  const Run r = run("reproduce-paper --out-dir '" + dir.string() + "'");
  REQUIRE(r.code == 0);
  for (const char* name : {"product-semigroup", "decomposability-threshold", "two-rate-qubit", "trace-and-transposition"}) {
    INFO(name);
    std::ifstream f(dir / (std::string(name) + ".json"));
    REQUIRE(f.good());
    CHECK(Json::parse(f)["status"] == "pass");
  }
  std::ifstream s(dir / "summary.json");
  const Json summary = Json::parse(s);
  CHECK(summary["status"] == "pass");
  CHECK(summary["scenarios"].size() == 4);
  CHECK(summary["t_star"]["choi_error"].get<double>() <= 1e-8);
  CHECK(summary["t_star"]["pairing_error"].get<double>() <= 1e-8);
  CHECK(r.out.find("t* = ln(3)/2") != std::string::npos);

  // a regular file in the way makes the directory impossible to create
  const fs::path blocker = scratch_dir("blocker");
  std::ofstream(blocker) << "x";
  CHECK(run("reproduce-paper --out-dir '" + (blocker / "reports").string() + "'").code == 3);
  fs::remove_all(blocker);
  fs::remove_all(dir);
}
