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

#pragma once

// Packaged reproductions of the worked qubit examples: the positive-but-not-CP
// product semigroup, its decomposability threshold, the bound entangled
// witness, the two-rate qubit family and the trace/transposition identities.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sgwl/decomp.hpp"
#include "sgwl/detail/parallel.hpp"
#include "sgwl/gksl.hpp"
#include "sgwl/matcore.hpp"
#include "sgwl/posmap.hpp"

namespace sgwl {

enum class Relation { Equal, AtLeast, AtMost };

inline std::string to_string(Relation r) {
  switch (r) {
    case Relation::Equal: return "equal";
    case Relation::AtLeast: return "at-least";
    case Relation::AtMost: return "at-most";
  }
  return "equal";
}

/// One verified quantity. `source` says where the expected value comes from:
/// "closed-form" (analytic expression), "published" (printed numeric value),
/// "independent" (separate numerical construction) or "identity" (elementary).
struct ScenarioCheck {
  std::string name;
  std::string topic;
  double computed = 0.0;
  double expected = 0.0;
  std::string source;
  Relation relation = Relation::Equal;
  double tolerance = 0.0;
  double delta = 0.0;
  bool pass = false;
};

struct ScenarioReport {
  std::string name;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::pair<std::string, double>> values;
  std::vector<ScenarioCheck> checks;

  bool passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const ScenarioCheck& c) { return c.pass; });
  }

  const ScenarioCheck* find(const std::string& check_name) const {
    for (const auto& c : checks)
      if (c.name == check_name) return &c;
    return nullptr;
  }

  double value(const std::string& key) const {
    for (const auto& [k, v] : values)
      if (k == key) return v;
    throw PreconditionError("ScenarioReport: no value named " + key);
  }

  void add(std::string check_name, std::string topic, double computed, double expected, std::string source,
           double tolerance, Relation relation = Relation::Equal) {
    ScenarioCheck c{std::move(check_name), std::move(topic), computed, expected, std::move(source), relation, tolerance};
    c.delta = computed - expected;
    switch (relation) {
      case Relation::Equal: c.pass = std::abs(c.delta) <= tolerance; break;
      case Relation::AtLeast: c.pass = computed >= expected - tolerance; break;
      case Relation::AtMost: c.pass = computed <= expected + tolerance; break;
    }
    if (!std::isfinite(computed)) c.pass = false;
    checks.push_back(std::move(c));
  }

  void add_flag(std::string check_name, std::string topic, bool holds, std::string source) {
    add(std::move(check_name), std::move(topic), holds ? 1.0 : 0.0, 1.0, std::move(source), 0.0);
  }
};

/// Topics the packaged scenarios must touch between them: the generator
/// pair and its semigroups, the trace and transposition maps, the product
/// map and its split, the Choi spectrum of the transposed branch, the
/// positivity window, the entangled family, the W table and its values, the
/// bound entangled state and its pairing.
inline const std::vector<std::string>& required_topics() {
  static const std::vector<std::string> topics{
      "generator-pair",        "closed-form-evolution", "trace-map",           "transposition",
      "product-map",           "explicit-decomposition", "second-block-choi",  "second-block-spectrum",
      "decomposable-window",   "entangled-family",      "w-table",             "w-table-values",
      "bound-entangled-state", "bound-entangled-pairing"};
  return topics;
}

/// Twenty logarithmically spaced times in [1e-2, 5].
inline std::vector<double> default_time_grid() {
  std::vector<double> g;
  for (int i = 0; i < 20; ++i) g.push_back(0.01 * std::pow(500.0, i / 19.0));
  return g;
}

namespace detail {

inline double bloch_component(const CMatrix& rho, int a) { return ((rho * pauli(a)).trace() / 2.0).real(); }

inline std::vector<double> sorted_eigenvalues(const CMatrix& h) {
  const RVector ev = hermitian_eigenvalues(HermitianMatrix::hermitian_part(h));
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

inline double max_sorted_gap(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

inline CMatrix fixed_density(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace detail

/// Generator pair C1 = I, C2 = diag(1, -1, 1) (H = 0) and its semigroups.
inline ScenarioReport scenario_product_semigroup() {
  ScenarioReport r;
  r.name = "product-semigroup";
  r.parameters = {{"c1_1", 1}, {"c1_2", 1}, {"c1_3", 1}, {"c2_1", 1}, {"c2_2", -1}, {"c2_3", 1}};
  const Generator g1 = build_generator(diagonal_qubit_spec(1, 1, 1));
  const Generator g2 = build_generator(diagonal_qubit_spec(1, -1, 1));
  const CMatrix id2 = CMatrix::Identity(2, 2);
  const CMatrix rho = detail::fixed_density(2, kDefaultSeed);

  r.add("L1 acts as Tr(rho) 1 - 2 rho", "generator-pair",
        max_abs_entry(g1.full.apply(rho) - (rho.trace() * id2 - 2.0 * rho)), 0.0, "closed-form", 1e-12);
  r.add("L2 acts as -2 rho_2 sigma_2", "generator-pair",
        max_abs_entry(g2.full.apply(rho) - (-2.0 * detail::bloch_component(rho, 2)) * pauli(2)), 0.0, "closed-form", 1e-12);

  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    const double a = decay_alpha(t);
    const Superoperator e1 = evolve(g1, t), e2 = evolve(g2, t);
    const std::string at = " at t=" + std::to_string(t).substr(0, 3);
    r.add("gamma1 closed form" + at, "closed-form-evolution",
          max_abs_entry(e1.apply(rho) - (a * rho + (1 - a) / 2 * id2)), 0.0, "closed-form", 1e-10);
    r.add("gamma2 closed form" + at, "closed-form-evolution",
          max_abs_entry(e2.apply(rho) - (rho - (1 - a) * detail::bloch_component(rho, 2) * pauli(2))), 0.0,
          "closed-form", 1e-10);
    r.add("alpha(t) from gamma1 on sigma_1" + at, "closed-form-evolution",
          detail::bloch_component(e1.apply(pauli(1)), 1), std::exp(-2 * t), "closed-form", 1e-10);
    r.add("gamma1 Choi min eigenvalue" + at, "closed-form-evolution", min_eigenvalue(choi(e1).mat), 0.0, "identity",
          1e-10, Relation::AtLeast);
    r.add("gamma2 Choi min eigenvalue" + at, "closed-form-evolution", min_eigenvalue(choi(e2).mat), (a - 1) / 4,
          "closed-form", 1e-10);
    r.values.emplace_back("alpha(t=" + std::to_string(t).substr(0, 3) + ")", a);
  }

  // alpha = 1/2 at t = ln(2)/2: (s0 + s2)/2 -> (s0 + s2/2)/2
  const CMatrix plus = (pauli(0) + pauli(2)) / 2.0;
  r.add("gamma2 on (s0+s2)/2 at alpha=1/2", "closed-form-evolution",
        max_abs_entry(evolve(g2, std::log(2.0) / 2).apply(plus) - (pauli(0) + pauli(2) / 2.0) / 2.0), 0.0,
        "closed-form", 1e-10);

  const PositivityVerdict cp1 = is_completely_positive(evolve(g1, 0.5));
  r.add_flag("gamma1 is completely positive", "generator-pair", cp1.status == PositivityStatus::CompletelyPositive,
             "closed-form");
  const PositivityVerdict v2 = is_completely_positive(evolve(g2, 0.5));
  r.add_flag("gamma2 is positive but not CP", "generator-pair", v2.status == PositivityStatus::PositiveNotCP,
             "closed-form");
  const PositivityVerdict k2 = kossakowski_positivity_check(g2);
  r.add("gamma2 generator functional minimum", "generator-pair", k2.search ? k2.search->best_value : NAN, 0.0,
        "closed-form", 1e-9);

  const Generator p = product_generator(g1, g2);
  const PositivityVerdict pv = kossakowski_positivity_check(p);
  r.add("product generator functional minimum", "product-map", pv.search ? pv.search->best_value : NAN, 0.0,
        "closed-form", 1e-9, Relation::AtLeast);
  r.add_flag("product generator is not reported non-positive", "product-map", pv.status != PositivityStatus::NotPositive,
             "closed-form");
  const std::vector<double> c1{1, 1, 1}, c2{1, -1, 1};
  r.add_flag("sufficient product condition holds", "product-map", product_positivity_sufficient(c1, c2), "closed-form");
  r.add_flag("qubit product verdict is positive", "product-map", qubit_product_positivity({1, 1, 1}, {1, -1, 1}),
             "closed-form");
  return r;
}

/// Threshold t* = ln(3)/2 where the product map becomes decomposable, with
/// the W table and the bound entangled witness.
inline ScenarioReport scenario_threshold() {
  ScenarioReport r;
  r.name = "decomposability-threshold";
  const double t_star = std::log(3.0) / 2;
  r.parameters = {{"t_lo", 0.1}, {"t_hi", 2.0}, {"bisection_tolerance", 1e-9}};

  const Generator gen = product_generator(build_generator(diagonal_qubit_spec(1, 1, 1)),
                                          build_generator(diagonal_qubit_spec(1, -1, 1)));
  for (double t : {0.1, 0.5, 2.0})
    r.add("product map equals the evolved product generator at t=" + std::to_string(t).substr(0, 3), "product-map",
          max_abs_entry(reference_product_map(t).mat - evolve(gen, t).mat), 0.0, "independent", 1e-10);

  double split = 0.0, first_min = 1e300;
  double spectrum_gap = 0.0;
  for (double t : default_time_grid()) {
    const double a = decay_alpha(t);
    const ExplicitDecomposition e = explicit_decomposition(t);
    split = std::max(split, max_abs_entry(e.first.mat + e.second.compose(Superoperator::transposition(4)).mat -
                                          reference_product_map(t).mat));
    first_min = std::min(first_min, min_eigenvalue(choi(e.first).mat));
    std::vector<double> expected(12, 0.0);
    expected.insert(expected.end(), {(1 - a * a) / 8, (1 - a * a) / 8, (1 - a * a) / 8, (1 - a) * (1 - 3 * a) / 8});
    spectrum_gap = std::max(spectrum_gap, detail::max_sorted_gap(detail::sorted_eigenvalues(choi(e.second).mat), expected));
  }
  r.add("split reproduces the product map on the grid", "explicit-decomposition", split, 0.0, "identity", 1e-12);
  r.add("first block Choi min eigenvalue on the grid", "explicit-decomposition", first_min, 0.0, "closed-form", 1e-10,
        Relation::AtLeast);
  r.add("second block Choi spectrum on the grid", "second-block-spectrum", spectrum_gap, 0.0, "closed-form", 1e-10);

  const MapFamily second = [](double t) { return explicit_decomposition(t).second; };
  const MapFamily full = [](double t) { return reference_product_map(t); };
  const CMatrix be = rho_be().mat;
  const double est_choi = find_threshold(second, criterion_choi_min(), 0.1, 2.0);
  const double est_pair = find_threshold(full, criterion_pairing(be), 0.1, 2.0);
  r.values = {{"t_star", t_star},
              {"t_star_choi", est_choi},
              {"t_star_pairing", est_pair},
              {"t_star_choi_error", std::abs(est_choi - t_star)},
              {"t_star_pairing_error", std::abs(est_pair - t_star)}};
  r.add("threshold from the second block Choi spectrum", "second-block-choi", est_choi, t_star, "closed-form", 1e-8);
  r.add("threshold from the bound entangled pairing", "bound-entangled-pairing", est_pair, t_star, "closed-form", 1e-8);
  r.add("second block Choi min eigenvalue at t*", "second-block-choi",
        min_eigenvalue(choi(explicit_decomposition(t_star).second).mat), 0.0, "closed-form", 1e-9);
  r.add("bound entangled pairing at t*", "bound-entangled-pairing", pairing(reference_product_map(t_star), be), 0.0,
        "closed-form", 1e-10);

  double orth = 0.0;
  for (int s = 0; s < 16; ++s)
    for (int q = 0; q < 16; ++q) {
      const CMatrix prod = zstate(s / 4, s % 4).mat.mat() * zstate(q / 4, q % 4).mat.mat();
      orth = std::max(orth, max_abs_entry(s == q ? CMatrix(prod - zstate(s / 4, s % 4).mat.mat()) : prod));
    }
  r.add("entangled family is a set of orthogonal projectors", "entangled-family", orth, 0.0, "identity", 1e-12);

  double wgap = 0.0, pair_gap = 0.0;
  for (double t : default_time_grid()) {
    const double a = decay_alpha(t);
    const Eigen::Matrix4d w = w_table(t);
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        const double d0 = mu == 0 ? 1.0 : 0.0, e0 = nu == 0 ? 1.0 : 0.0, e2 = nu == 2 ? 1.0 : 0.0;
        const double closed = 0.25 * (a * d0 + (1 - a) / 4) * (2 * (1 + a) * e0 + (1 - a) * (1 - 2 * e2));
        wgap = std::max(wgap, std::abs(w(mu, nu) - closed));
      }
    pair_gap = std::max(pair_gap, std::abs(pairing(reference_product_map(t), be) - (1 - a) * (1 - 3 * a) / 48));
  }
  r.add("W table closed form on the grid", "w-table", wgap, 0.0, "closed-form", 1e-10);
  r.add("bound entangled pairing closed form on the grid", "bound-entangled-pairing", pair_gap, 0.0, "closed-form",
        1e-10);

  const double a1 = decay_alpha(1.0);
  const Eigen::Matrix4d w1 = w_table(1.0);
  const double q = (1 - a1) * (1 - a1) / 16;
  r.add("W02 at t=1", "w-table-values", w1(0, 2), (a1 - 1) * (1 + 3 * a1) / 16, "closed-form", 1e-10);
  r.add("W11 at t=1", "w-table-values", w1(1, 1), q, "closed-form", 1e-10);
  r.add("W23 at t=1", "w-table-values", w1(2, 3), q, "closed-form", 1e-10);
  r.add("W31 at t=1", "w-table-values", w1(3, 1), q, "closed-form", 1e-10);
  r.add("W33 at t=1", "w-table-values", w1(3, 3), q, "closed-form", 1e-10);
  r.add("W32 at t=1", "w-table-values", w1(3, 2), -q, "closed-form", 1e-10);
  r.add("W32 is negative at t=1", "w-table-values", w1(3, 2), 0.0, "closed-form", 0.0, Relation::AtMost);

  const StateCheck sc = check_state(be);
  r.add("bound entangled state trace", "bound-entangled-state", be.trace().real(), 1.0, "published", 1e-12);
  r.add("bound entangled state min eigenvalue", "bound-entangled-state", sc.min_eigenvalue, 0.0, "published", 1e-12,
        Relation::AtLeast);
  r.add("bound entangled state partial transpose min eigenvalue", "bound-entangled-state", sc.pt_min_eigenvalue, 0.0,
        "published", 1e-12, Relation::AtLeast);
  r.add("bound entangled state is orthogonal to P+", "bound-entangled-state",
        max_abs_entry(be * max_entangled_projector(4)), 0.0, "published", 1e-12);
  r.add("pairing at t=0.2 is negative", "bound-entangled-pairing", pairing(reference_product_map(0.2), be), 0.0,
        "closed-form", 0.0, Relation::AtMost);

  const FeasibilityResult feasible = decomposability_feasibility(choi(reference_product_map(1.0)));
  r.add_flag("product map is decomposable at t=1", "decomposable-window", feasible.status == FeasibilityStatus::Feasible,
             "closed-form");
  r.add("decomposition residual at t=1", "decomposable-window",
        feasible.certificate ? feasible.certificate->residual : NAN, 0.0, "closed-form", 1e-8, Relation::AtMost);
  FeasibilityOptions hint;
  hint.candidate_witnesses.push_back(be);
  const FeasibilityResult witnessed = decomposability_feasibility(choi(reference_product_map(0.2)), hint);
  r.add_flag("product map is witnessed non-decomposable at t=0.2", "decomposable-window",
             witnessed.status == FeasibilityStatus::InfeasibleWitnessed, "closed-form");
  return r;
}

/// Qubit semigroup with decay rates 2a (sigma_1, sigma_2) and 4b (sigma_3):
/// C = 2 diag(b, b, a - b) in the normalized Pauli basis. CP at all times
/// iff a >= b; otherwise CP exactly from t-hat on, cosh(2b t) = e^{2(b-a)t}.
inline ScenarioReport scenario_two_rate_qubit(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("scenario_two_rate_qubit: rates must be positive");
  ScenarioReport r;
  r.name = "two-rate-qubit";
  r.parameters = {{"a", a}, {"b", b}};
  const Generator g = build_generator(diagonal_qubit_spec(2 * b, 2 * b, 2 * (a - b)));

  std::vector<double> grid{0.0};
  for (double t : default_time_grid()) grid.push_back(t);
  double gap = 0.0, lowest = 1e300;
  for (double t : grid) {
    const double mu = 1 - std::exp(-4 * b * t);
    const double lp = 1 + std::exp(-4 * b * t) + 2 * std::exp(-2 * a * t);
    const double lm = 1 + std::exp(-4 * b * t) - 2 * std::exp(-2 * a * t);
    const ChoiMatrix j = choi(evolve(g, t));
    gap = std::max(gap, detail::max_sorted_gap(detail::sorted_eigenvalues(4.0 * j.mat.mat()), {mu, mu, lp, lm}));
    lowest = std::min(lowest, min_eigenvalue(j.mat));
  }
  r.add("scaled Choi spectrum on the grid", "generator-pair", gap, 0.0, "closed-form", 1e-10);

  if (a >= b) {
    r.add("Choi min eigenvalue on the grid", "generator-pair", lowest, 0.0, "closed-form", 1e-10, Relation::AtLeast);
    int flips = 0;
    for (double t : grid)
      if (t > 0 && is_completely_positive(evolve(g, t)).status != PositivityStatus::CompletelyPositive) ++flips;
    r.add("non-CP samples on [0, 5]", "generator-pair", flips, 0.0, "closed-form", 0.0);
    return r;
  }

  const MapFamily family = [&](double t) { return evolve(g, t); };
  const double t_hat = find_threshold(family, criterion_choi_min(), 1e-3, 5.0);
  // independent root: bisection on cosh(2bt) - e^{2(b-a)t}, which is negative
  // just above t = 0 and positive for large t
  auto eq = [&](double t) { return std::cosh(2 * b * t) - std::exp(2 * (b - a) * t); };
  double lo = 1e-6, hi = 5.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (eq(mid) < 0 ? lo : hi) = mid;
  }
  const double t_root = 0.5 * (lo + hi);
  r.values = {{"t_hat", t_hat}, {"t_hat_root", t_root}};
  r.add("threshold agrees with the transcendental root", "generator-pair", t_hat, t_root, "closed-form", 1e-8);
  r.add("threshold equation residual", "generator-pair", eq(t_hat) / std::cosh(2 * b * t_hat), 0.0, "closed-form", 1e-8);

  int wrong = 0;
  for (double t : grid) {
    if (t == 0.0 || std::abs(t - t_hat) < 1e-6) continue;
    const PositivityVerdict v = is_completely_positive(evolve(g, t));
    const PositivityStatus want = t > t_hat ? PositivityStatus::CompletelyPositive : PositivityStatus::PositiveNotCP;
    if (v.status != want) ++wrong;
  }
  r.add("CP verdict flips exactly at the threshold", "generator-pair", wrong, 0.0, "closed-form", 0.0);
  return r;
}

/// The qubit trace map Tr_2[X] = Tr(X) 1 and transposition T_2.
inline ScenarioReport scenario_trace_and_transposition() {
  ScenarioReport r;
  r.name = "trace-and-transposition";
  const Superoperator tr = Superoperator::trace_map(2);
  const Superoperator tp = Superoperator::transposition(2);
  std::vector<CMatrix> kraus;
  for (int mu = 0; mu < 4; ++mu) kraus.emplace_back(pauli(mu) / std::sqrt(2.0));
  r.add("trace map equals half the Pauli twirl", "trace-map", max_abs_entry(tr.mat - Superoperator::kraus(kraus).mat), 0.0,
        "identity", 1e-14);
  r.add("trace map kills sigma_3", "trace-map", max_abs_entry(tr.apply(pauli(3))), 0.0, "identity", 1e-15);
  double flips = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    const double sign = mu == 2 ? -1.0 : 1.0;
    flips = std::max(flips, max_abs_entry(tp.apply(pauli(mu)) - sign * pauli(mu)));
  }
  r.add("transposition flips only sigma_2", "transposition", flips, 0.0, "identity", 1e-15);
  r.add("transposition is an involution", "transposition", max_abs_entry(tp.compose(tp).mat - CMatrix::Identity(4, 4)),
        0.0, "identity", 1e-15);
  r.add("trace map absorbs transposition", "trace-map", max_abs_entry(tr.compose(tp).mat - tr.mat), 0.0, "identity",
        1e-15);
  r.add("trace map Choi min eigenvalue", "trace-map", min_eigenvalue(choi(tr).mat), 0.5, "identity", 1e-12);
  r.add("transposition Choi min eigenvalue", "transposition", min_eigenvalue(choi(tp).mat), -0.5, "identity", 1e-12);
  return r;
}

/// The four packaged scenarios; the two-rate family runs with a = 1, b = 2,
/// the case with a CP threshold.
inline std::vector<ScenarioReport> all_scenarios() {
  std::vector<ScenarioReport> out(4);
  detail::parallel_for(out.size(), [&](std::size_t i) {
    switch (i) {
      case 0: out[i] = scenario_product_semigroup(); break;
      case 1: out[i] = scenario_threshold(); break;
      case 2: out[i] = scenario_two_rate_qubit(1.0, 2.0); break;
      default: out[i] = scenario_trace_and_transposition(); break;
    }
  });
  return out;
}

}  // namespace sgwl
