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

// sgwl command-line front end: verdicts, threshold scans, decomposability
// certificates and the packaged reproductions.

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sgwl/decomp.hpp"
#include "sgwl/detail/parallel.hpp"
#include "sgwl/io.hpp"
#include "sgwl/scenarios.hpp"

namespace {

using namespace sgwl;
namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kParse = 2, kNumerical = 3, kInconclusive = 4, kScenarioFailure = 5 };

/// Failure to write output files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t optimizer_seed() {
  const char* env = std::getenv("SGWL_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) throw ParseError("$SGWL_SEED", "expected a decimal integer", env);
  return seed;
}

PairSearchOptions search_options() {
  PairSearchOptions opt;
  opt.seed = optimizer_seed();
  return opt;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot open " + out + " for writing");
  f << text;
  if (!f) throw IoError("write to " + out + " failed");
}

std::vector<Generator> load_generators(const std::vector<std::string>& files) {
  std::vector<Generator> out;
  for (const std::string& file : files) out.push_back(build_generator(load_spec(file).spec));
  return out;
}

/// exp(tL) for one generator, the tensor product of the factor semigroups
/// for several.
Superoperator evolved_map(const std::vector<Generator>& gens, double t) {
  Superoperator map = evolve(gens.front(), t);
  for (std::size_t i = 1; i < gens.size(); ++i) map = tensor(map, evolve(gens[i], t));
  return map;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  std::string spec;
  std::optional<double> at_time;
  std::string out;
};

int run_check(const CheckArgs& a) {
  const SpecFile file = load_spec(a.spec);
  const Generator g = build_generator(file.spec);
  const PairSearchOptions opt = search_options();
  Json j;
  if (!file.label.empty()) j["label"] = file.label;
  PositivityVerdict v;
  if (a.at_time) {
    j["scope"] = "map";
    j["at_time"] = *a.at_time;
    v = is_completely_positive(evolve(g, *a.at_time), opt);
  } else {
    j["scope"] = "semigroup";
    v = kossakowski_positivity_check(g, opt);
  }
  j["cp"] = v.status == PositivityStatus::CompletelyPositive;
  j["positivity"] = to_string(v.status);
  j["kossakowski_min_eig"] = number_json(min_eigenvalue(file.spec.kossakowski.mat()));
  j["seed"] = opt.seed;
  j["verdict"] = to_json(v);
  emit(j.dump(2) + "\n", a.out);
  return v.status == PositivityStatus::Undetermined ? kInconclusive : kOk;
}

// ----------------------------------------------------------------- scan

struct ScanArgs {
  std::vector<std::string> specs;
  double t0 = 0.1, t1 = 2.0;
  int steps = 40;
  std::vector<std::string> criteria{"choi-min", "pairing-rhobe"};
  std::string out;
};

std::string csv_number(double x) {
  if (!std::isfinite(x)) return "nan";
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(17);
  s << x;
  return s.str();
}

int run_scan(const ScanArgs& a) {
  if (!(a.t0 < a.t1)) throw ParseError("--t0", "t0 must be smaller than t1");
  if (a.t0 < 0.0) throw ParseError("--t0", "times must be nonnegative");
  if (a.steps < 2) throw ParseError("--steps", "at least 2 grid points are required");
  bool want_choi = false, want_pair = false;
  for (const std::string& c : a.criteria) {
    if (c == "choi-min")
      want_choi = true;
    else if (c == "pairing-rhobe")
      want_pair = true;
    else
      throw ParseError("--criteria", "unknown criterion '" + c + "' (expected choi-min or pairing-rhobe)");
  }
  const std::vector<Generator> gens = load_generators(a.specs);
  int dim = 1;
  for (const Generator& g : gens) dim *= g.dim();
  if (want_pair && dim != 4) throw ParseError("--criteria", "pairing-rhobe needs a two-qubit map (total dimension 4)");
  const bool reference = gens.size() == 2 && is_reference_pair(gens[0], gens[1]);
  const CMatrix witness = want_pair ? CMatrix(rho_be().mat.mat()) : CMatrix();

  const auto n = static_cast<std::size_t>(a.steps);
  std::vector<double> ts(n), choi_min(n, NAN), pair(n, NAN);
  for (std::size_t i = 0; i < n; ++i) ts[i] = a.t0 + (a.t1 - a.t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  ts.back() = a.t1;
  detail::parallel_for(n, [&](std::size_t i) {
    const Superoperator map = evolved_map(gens, ts[i]);
    if (want_choi) choi_min[i] = criterion_choi_min()(map);
    if (want_pair) pair[i] = criterion_pairing(witness)(map);
  });

  std::string csv = "t,alpha";
  if (want_choi) csv += ",choi_min";
  if (want_pair) csv += ",pairing_rhobe";
  csv += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv += csv_number(ts[i]) + "," + (reference ? csv_number(decay_alpha(ts[i])) : "");
    if (want_choi) csv += "," + csv_number(choi_min[i]);
    if (want_pair) csv += "," + csv_number(pair[i]);
    csv += "\n";
  }
  emit(csv, a.out);
  return kOk;
}

// ------------------------------------------------------ decompose/witness

struct DecomposeArgs {
  std::vector<std::string> specs;
  double at_time = 1.0;
  long max_iterations = FeasibilityOptions{}.max_iterations;
  double tolerance = FeasibilityOptions{}.tolerance;
  std::string out;
};

int run_decompose(const DecomposeArgs& a, bool witness_mode) {
  const std::vector<Generator> gens = load_generators(a.specs);
  const Superoperator map = evolved_map(gens, a.at_time);
  FeasibilityOptions opt;
  opt.max_iterations = a.max_iterations;
  opt.tolerance = a.tolerance;
  if (witness_mode && map.dim == 4) opt.candidate_witnesses.push_back(rho_be().mat.mat());
  const FeasibilityResult r = decomposability_feasibility(choi(map), opt);
  Json j;
  j["at_time"] = a.at_time;
  j["dim"] = map.dim;
  Json body = to_json(r);
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  emit(j.dump(2) + "\n", a.out);
  return r.status == FeasibilityStatus::MaxIterations ? kInconclusive : kOk;
}

// ------------------------------------------------------ reproduce-paper

struct ReproduceArgs {
  std::string out_dir = "sgwl-reports";
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw IoError("write to " + path.string() + " failed");
}

int run_reproduce(const ReproduceArgs& a) {
  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  // fail before the (comparatively slow) computations if the directory is read-only
  write_file(dir / "summary.txt", "");

  const std::vector<ScenarioReport> reports = all_scenarios();
  Json summary;
  summary["scenarios"] = Json::array();
  std::ostringstream table;
  table << "scenario                        checks  failed  status\n";
  bool all_pass = true;
  for (const ScenarioReport& r : reports) {
    write_file(dir / (r.name + ".json"), to_json(r).dump(2) + "\n");
    std::size_t failed = 0;
    for (const ScenarioCheck& c : r.checks) failed += c.pass ? 0 : 1;
    all_pass = all_pass && r.passed();
    char line[160];
    std::snprintf(line, sizeof line, "%-31s %6zu  %6zu  %s\n", r.name.c_str(), r.checks.size(), failed,
                  r.passed() ? "pass" : "FAIL");
    table << line;
    summary["scenarios"].push_back(
        {{"name", r.name}, {"checks", r.checks.size()}, {"failed", failed}, {"status", r.passed() ? "pass" : "fail"}});
    if (r.name == "decomposability-threshold") {
      char est[200];
      std::snprintf(est, sizeof est,
                    "t* = ln(3)/2 = %.12f; Choi estimate %.12f (|error| %.2e); pairing estimate %.12f (|error| %.2e)\n",
                    r.value("t_star"), r.value("t_star_choi"), r.value("t_star_choi_error"), r.value("t_star_pairing"),
                    r.value("t_star_pairing_error"));
      summary["t_star"] = {{"exact", r.value("t_star")},
                           {"choi_estimate", r.value("t_star_choi")},
                           {"choi_error", r.value("t_star_choi_error")},
                           {"pairing_estimate", r.value("t_star_pairing")},
                           {"pairing_error", r.value("t_star_pairing_error")}};
      summary["t_star_line"] = est;
    }
  }
  std::string text = table.str();
  if (summary.contains("t_star_line")) {
    text += "\n" + summary["t_star_line"].get<std::string>();
    summary.erase("t_star_line");
  }
  summary["status"] = all_pass ? "pass" : "fail";
  write_file(dir / "summary.txt", text);
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::cout << text;
  return all_pass ? kOk : kScenarioFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sgwl: positive dynamical semigroups, decomposability and bound entanglement"};
  app.require_subcommand(1);

  CheckArgs check;
  CLI::App* c = app.add_subcommand("check", "Positivity / complete positivity verdict for a generator spec");
  c->add_option("spec", check.spec, "Generator spec (JSON)")->required();
  c->add_option("--at-time", check.at_time, "Classify exp(T L) instead of the whole semigroup")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--out", check.out, "Write the JSON verdict here instead of stdout");

  ScanArgs scan;
  CLI::App* s = app.add_subcommand("scan", "Criterion values along exp(tL_A) (x) exp(tL_B), as CSV");
  s->add_option("specs", scan.specs, "One or two generator specs")->required()->expected(1, 2);
  s->add_option("--t0", scan.t0, "First grid time")->capture_default_str();
  s->add_option("--t1", scan.t1, "Last grid time")->capture_default_str();
  s->add_option("--steps", scan.steps, "Number of grid points")->capture_default_str();
  s->add_option("--criteria", scan.criteria, "Comma-separated: choi-min, pairing-rhobe")->delimiter(',');
  s->add_option("--out", scan.out, "Write the CSV here instead of stdout");

  DecomposeArgs dec;
  auto add_decompose = [&](const char* name, const char* help) {
    CLI::App* d = app.add_subcommand(name, help);
    d->add_option("specs", dec.specs, "One or two generator specs")->required()->expected(1, 2);
    d->add_option("--at-time", dec.at_time, "Evolution time T")->check(CLI::NonNegativeNumber)->capture_default_str();
    d->add_option("--max-iterations", dec.max_iterations, "Alternating projection budget")->capture_default_str();
    d->add_option("--tolerance", dec.tolerance, "Residual accepted as feasible")->capture_default_str();
    d->add_option("--out", dec.out, "Write the JSON result here instead of stdout");
    return d;
  };
  CLI::App* d = add_decompose("decompose", "Decomposability certificate or witness for exp(T L)");
  CLI::App* w = add_decompose("witness", "Like decompose, also trying the bound entangled reference state");

  ReproduceArgs rep;
  CLI::App* r = app.add_subcommand("reproduce-paper", "Run the packaged worked examples and write JSON reports");
  r->add_option("--out-dir", rep.out_dir, "Report directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (c->parsed()) return run_check(check);
    if (s->parsed()) return run_scan(scan);
    if (d->parsed()) return run_decompose(dec, false);
    if (w->parsed()) return run_decompose(dec, true);
    if (r->parsed()) return run_reproduce(rep);
  } catch (const ParseError& e) {
    std::cerr << "sgwl: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const DomainError& e) {
    std::cerr << "sgwl: invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const ShapeError& e) {
    std::cerr << "sgwl: invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "sgwl: " << e.what() << "\n";
    return kNumerical;
  }
  return kParse;
}
