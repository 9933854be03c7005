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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sgwl/decomp.hpp"
#include "test_util.hpp"

using namespace sgwl;
using namespace sgwl::testing;
using Catch::Matchers::WithinAbs;

namespace {

// Twenty log-spaced times in [1e-2, 5].
std::vector<double> time_grid() {
  std::vector<double> g;
  for (int i = 0; i < 20; ++i) g.push_back(0.01 * std::pow(500.0, i / 19.0));
  return g;
}

double kron_delta(int a, int b) { return a == b ? 1.0 : 0.0; }

// Closed form of the W table.
double w_closed(int mu, int nu, double a) {
  return 0.25 * (a * kron_delta(mu, 0) + (1 - a) / 4) *
         (2 * (1 + a) * kron_delta(nu, 0) + (1 - a) * (1 - 2 * kron_delta(nu, 2)));
}

// The 16 x 16 bound entangled state times 24, as printed ('.' = 0).
CMatrix rho_be_times_24() {
  static const char* rows[16] = {
      "1....-1....-1....1", ".3..-1......-1..-1.", "..1....-1-1....1..", "...1..1..1..1...",
      ".-1..3......-1..-1.", "-1....1....1....-1", "...1..1..1..1...", "..-1....11....-1..",
      "..-1....11....-1..", "...1..1..1..1...", "-1....1....1....-1", ".-1..-1......3..-1.",
      "...1..1..1..1...", "..1....-1-1....1..", ".-1..-1......-1..3.", "1....-1....-1....1"};
  CMatrix m = CMatrix::Zero(16, 16);
  for (int r = 0; r < 16; ++r) {
    const std::string s = rows[r];
    int col = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '.') {
        ++col;
      } else if (s[i] == '-') {
        m(r, col++) = -(s[++i] - '0');
      } else {
        m(r, col++) = s[i] - '0';
      }
    }
    REQUIRE(col == 16);
  }
  return m;
}

Superoperator random_cp(int d, std::mt19937_64& rng, int kraus = 3) {
  std::vector<CMatrix> ops;
  for (int k = 0; k < kraus; ++k) ops.push_back(random_matrix(d, d, rng, 0.5));
  return Superoperator::kraus(ops);
}

Generator reference_generator() {
  return product_generator(build_generator(diagonal_qubit_spec(1, 1, 1)), build_generator(diagonal_qubit_spec(1, -1, 1)));
}

}  // namespace

TEST_CASE("pairing examples", "[decomp][pairing]") {
  CHECK_THAT(pairing(Superoperator::identity(4), max_entangled_projector(4)), WithinAbs(1.0, 1e-14));
  for (double t : {0.1, 0.5, 1.0}) {
    const double a = decay_alpha(t);
    const Superoperator g = reference_product_map(t);
    CHECK_THAT(pairing(g, zstate(0, 2).mat), WithinAbs((a - 1) * (1 + 3 * a) / 16, 1e-10));
    CHECK_THAT(pairing(g, rho_be().mat), WithinAbs((1 - a) * (1 - 3 * a) / 48, 1e-10));
  }
  CHECK_THROWS_AS(pairing(Superoperator::identity(2), max_entangled_projector(4)), ShapeError);
}

TEST_CASE("Pauli entangled states", "[decomp][zstate]") {
  CHECK(max_diff(zstate(0, 0).mat, max_entangled_projector(4)) <= 1e-15);
  for (int s = 0; s < 16; ++s) {
    const CMatrix z = zstate(s / 4, s % 4).mat;
    CHECK_THAT(z.trace().real(), WithinAbs(1.0, 1e-14));
    CHECK(max_diff(z * z, z) <= 1e-14);
    for (int r = s + 1; r < 16; ++r) CHECK((z * zstate(r / 4, r % 4).mat.mat()).cwiseAbs().maxCoeff() <= 1e-14);
  }
  CHECK_THROWS_AS(zstate(4, 0), DomainError);
  CHECK(max_diff(pauli_entangled_state(6, 2), zstate(1, 2).mat) == 0.0);
}

TEST_CASE("W table", "[decomp][wtable]") {
  for (double t : time_grid()) {
    const double a = decay_alpha(t);
    const Eigen::Matrix4d w = w_table(t);
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) CHECK_THAT(w(mu, nu), WithinAbs(w_closed(mu, nu, a), 1e-10));
    const double q = (1 - a) * (1 - a) / 16;
    CHECK_THAT(w(1, 1), WithinAbs(q, 1e-10));
    CHECK_THAT(w(2, 3), WithinAbs(q, 1e-10));
    CHECK_THAT(w(3, 1), WithinAbs(q, 1e-10));
    CHECK_THAT(w(3, 3), WithinAbs(q, 1e-10));
    CHECK_THAT(w(3, 2), WithinAbs(-q, 1e-10));
    CHECK(w(3, 2) < 0.0);
    for (int nu = 0; nu < 4; ++nu) {
      CHECK_THAT(w(1, nu), WithinAbs(w(2, nu), 1e-12));
      CHECK_THAT(w(2, nu), WithinAbs(w(3, nu), 1e-12));
    }
    const double mix = (w(0, 2) + w(1, 1) + w(2, 3) + w(3, 1) + w(3, 2) + w(3, 3)) / 6;
    CHECK_THAT(mix, WithinAbs((1 - a) * (1 - 3 * a) / 48, 1e-12));
  }
  const Eigen::Matrix4d w0 = w_table(0.0);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) CHECK_THAT(w0(mu, nu), WithinAbs(kron_delta(mu, 0) * kron_delta(nu, 0), 1e-14));
  CHECK_THROWS_AS(w_table(-1.0), DomainError);
}

TEST_CASE("bound entangled state", "[decomp][rhobe]") {
  const WitnessState r = rho_be();
  CHECK(r.ppt_checked);
  CHECK(max_diff(r.mat, rho_be_times_24() / 24.0) <= 1e-14);
  CHECK_THAT(r.mat.mat().trace().real(), WithinAbs(1.0, 1e-14));
  CHECK(min_eigenvalue(r.mat) >= -1e-12);
  CHECK(min_eigenvalue(partial_transpose(r.mat, 4, 4, Side::A)) >= -1e-12);
  CHECK(min_eigenvalue(partial_transpose(r.mat, 4, 4, Side::B)) >= -1e-12);
  CHECK((r.mat.mat() * max_entangled_projector(4)).cwiseAbs().maxCoeff() <= 1e-12);
  const StateCheck c = check_state(r.mat);
  CHECK(c.density);
  CHECK(c.ppt);
  // Z_{00} is NPT
  CHECK_FALSE(check_state(zstate(0, 0).mat).ppt);
  CHECK_THROWS_AS(make_witness_state(zstate(0, 0).mat, true), DomainError);
}

TEST_CASE("explicit decomposition of the reference product map", "[decomp][explicit]") {
  for (double t : {0.0, 0.05, 0.2, 0.5493, 0.6, 1.0, 3.0}) {
    const double a = decay_alpha(t);
    const ExplicitDecomposition e = explicit_decomposition(t);
    const Superoperator assembled = e.first + e.second.compose(Superoperator::transposition(4));
    CHECK(max_diff(assembled.mat, reference_product_map(t).mat) <= 1e-12);
    CHECK(psd_test(choi(e.first).mat).psd);
    const double lmin = min_eigenvalue(choi(e.second).mat);
    if (a <= 1.0 / 3 - 1e-9) CHECK(lmin >= -1e-12);
    if (a > 1.0 / 3 + 1e-9 && a < 1.0) CHECK(lmin < -1e-12);
  }
  CHECK(max_diff(reference_product_map(0.0).mat, CMatrix::Identity(16, 16)) <= 1e-15);
  CHECK(explicit_decomposition(0.0).second.mat.cwiseAbs().maxCoeff() == 0.0);

  const double a = std::exp(-0.4);
  CHECK_THAT(min_eigenvalue(choi(explicit_decomposition(0.2).second).mat), WithinAbs((1 - a) * (1 - 3 * a) / 8, 1e-12));
  CHECK_THAT(min_eigenvalue(choi(explicit_decomposition(0.2).second).mat), WithinAbs(-0.04166, 1e-5));

  const Generator g = reference_generator();
  for (double t : {0.1, 0.5, 2.0}) CHECK(max_diff(reference_product_map(t).mat, evolve(g, t).mat) <= 1e-10);
}

TEST_CASE("noise pairings", "[decomp][noise]") {
  // Factorized oracle: <N1 (x) id + id (x) N2, Z_mu (x) Z_nu> with Bell-state
  // pairings <Tr - id/2, Z_mu> = (1 - delta_mu0)/2 and
  // <T - id/2, Z_nu> = (0, 1/2, -1/2, 1/2).
  const double second[4] = {0.0, 0.5, -0.5, 0.5};
  const NoisePairings p = noise_pairings();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      const double expected = 0.5 * (1 - kron_delta(mu, 0)) * kron_delta(nu, 0) + kron_delta(mu, 0) * second[nu];
      CHECK_THAT(p.table(mu, nu), WithinAbs(expected, 1e-12));
    }
  // among the constituents of rho_be only Z02 contributes
  CHECK_THAT(p.table(0, 2), WithinAbs(-0.5, 1e-12));
  for (auto [mu, nu] : {std::pair{1, 1}, {2, 3}, {3, 1}, {3, 2}, {3, 3}}) CHECK(std::abs(p.table(mu, nu)) <= 1e-12);
  CHECK_THAT(p.rho_be, WithinAbs(-1.0 / 12, 1e-12));

  // first-order consistency: <N, X> = d/dt <Gamma_t, X> at t = 0 for X P+ = 0,
  // and d/dt (1-a)(1-3a)/48 at t = 0 is -1/12
  const CMatrix x = rho_be().mat;
  const double h = 1e-5;
  const double slope = (pairing(reference_product_map(h), x) - pairing(reference_product_map(0.0), x)) / h;
  CHECK_THAT(slope, WithinAbs(p.rho_be, 1e-4));

  // the closed-form noise is the noise term of the assembled generator
  CHECK(max_diff(reference_noise().mat, reference_generator().noise.mat) <= 1e-12);
}

TEST_CASE("decomposability of CP maps", "[decomp][feasibility]") {
  std::mt19937_64 rng(41);
  const Superoperator s = random_cp(4, rng);
  const FeasibilityResult r = decomposability_feasibility(choi(s));
  REQUIRE(r.status == FeasibilityStatus::Feasible);
  CHECK(r.certificate->j2.mat().cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.certificate->residual == 0.0);
}

TEST_CASE("decomposability of the reference product map", "[decomp][feasibility]") {
  SECTION("decomposable side") {
    const ChoiMatrix j = choi(reference_product_map(1.0));
    const FeasibilityResult r = decomposability_feasibility(j);
    REQUIRE(r.status == FeasibilityStatus::Feasible);
    const DecompositionCertificate& c = *r.certificate;
    CHECK(c.residual <= 1e-8);
    CHECK(min_eigenvalue(c.j1) >= -1e-10);
    CHECK(min_eigenvalue(c.j2) >= -1e-10);
    // the explicit blocks are an independent valid certificate
    const ExplicitDecomposition e = explicit_decomposition(1.0);
    CHECK(decomposition_residual(j.mat, choi_matrix(e.first), choi_matrix(e.second)) <= 1e-12);
  }
  SECTION("non-decomposable side") {
    const double a = std::exp(-0.4);
    const ChoiMatrix j = choi(reference_product_map(0.2));
    FeasibilityOptions opt;
    opt.candidate_witnesses.push_back(rho_be().mat);
    const FeasibilityResult r = decomposability_feasibility(j, opt);
    REQUIRE(r.status == FeasibilityStatus::InfeasibleWitnessed);
    CHECK(max_diff(r.witness->state.mat, rho_be().mat) <= 1e-15);
    CHECK_THAT(r.witness->pairing, WithinAbs((1 - a) * (1 - 3 * a) / 48, 1e-12));
    CHECK_THAT(r.witness->pairing, WithinAbs(-0.006944, 1e-6));

    // without hints the simplex search reaches the same optimal value
    const FeasibilityResult plain = decomposability_feasibility(j);
    REQUIRE(plain.status == FeasibilityStatus::InfeasibleWitnessed);
    CHECK(plain.witness->pairing <= r.witness->pairing + 1e-12);
    CHECK(check_state(plain.witness->state.mat).ppt);
    CHECK_THAT(pairing_choi(j.mat, plain.witness->state.mat), WithinAbs(plain.witness->pairing, 1e-14));
  }
  SECTION("iteration cap is honest") {
    const FeasibilityResult r = decomposability_feasibility(choi(reference_product_map(1.0)), 3, 1e-8);
    CHECK(r.status != FeasibilityStatus::Feasible);
    CHECK(r.iterations == 3);
  }
}

TEST_CASE("decomposable maps pair nonnegatively with PPT states", "[decomp][property]") {
  std::mt19937_64 rng(42);
  std::vector<CMatrix> corpus{rho_be().mat};
  for (int k = 0; k < 6; ++k) corpus.push_back(kron(random_density(4, rng), random_density(4, rng)));
  for (int k = 0; k < 4; ++k) {
    CMatrix x = 0.6 * CMatrix::Identity(16, 16) / 16.0 + 0.4 * corpus[std::size_t(k) + 1];
    corpus.push_back(x);
  }
  std::vector<ChoiMatrix> maps{choi(reference_product_map(1.0)), choi(reference_product_map(2.0))};
  for (int k = 0; k < 3; ++k) {
    const Superoperator t = Superoperator::transposition(4);
    maps.push_back(choi(random_cp(4, rng) + random_cp(4, rng).compose(t)));
  }
  for (const ChoiMatrix& j : maps) {
    const FeasibilityResult r = decomposability_feasibility(j);
    REQUIRE(r.status == FeasibilityStatus::Feasible);
    for (const CMatrix& x : corpus) {
      REQUIRE(check_state(x).ppt);
      CHECK(pairing_choi(j.mat, x) >= -1e-9);
    }
  }
}

TEST_CASE("threshold detection", "[decomp][threshold]") {
  const double t_star = std::log(3.0) / 2;
  const MapFamily second = [](double t) { return explicit_decomposition(t).second; };
  CHECK_THAT(find_threshold(second, criterion_choi_min(), 0.1, 2.0), WithinAbs(t_star, 1e-8));
  const MapFamily full = [](double t) { return reference_product_map(t); };
  CHECK_THAT(find_threshold(full, criterion_pairing(rho_be().mat), 0.1, 2.0), WithinAbs(t_star, 1e-8));
  CHECK_THROWS_AS(find_threshold(full, criterion_pairing(rho_be().mat), 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(find_threshold(full, criterion_pairing(rho_be().mat), 2.0, 1.0), DomainError);

  SECTION("rate family with a = 1, b = 2") {
    // C = 2 diag(b, b, a - b) in the normalized Pauli basis
    const Generator g = build_generator(diagonal_qubit_spec(4, 4, -2));
    const MapFamily family = [&](double t) { return evolve(g, t); };
    const double t_hat = find_threshold(family, criterion_choi_min(), 0.01, 2.0);
    // independent root of x^3 = x^2 + x + 1 by Newton iteration, x = exp(2 t)
    double x = 2.0;
    for (int i = 0; i < 50; ++i) x -= (x * x * x - x * x - x - 1) / (3 * x * x - 2 * x - 1);
    CHECK_THAT(x, WithinAbs(1.8392867552, 1e-10));
    CHECK_THAT(t_hat, WithinAbs(std::log(x) / 2, 1e-8));
    CHECK_THAT(std::cosh(4 * t_hat), WithinAbs(std::exp(2 * t_hat), 1e-7));
  }
}

TEST_CASE("decomposability propagation hypothesis", "[decomp][propagation]") {
  SECTION("reference noise is not decomposable") {
    const PropagationCheck c = decomposability_propagation_check(reference_generator());
    CHECK_FALSE(c.holds);
    REQUIRE(c.noise_decomposability.has_value());
    CHECK(c.noise_decomposability->status != FeasibilityStatus::Feasible);
  }
  SECTION("noise of the positive qubit semigroup is not positive") {
    const PropagationCheck c = decomposability_propagation_check(build_generator(diagonal_qubit_spec(1, -1, 1)));
    CHECK_FALSE(c.holds);
    REQUIRE(c.noise_positivity.status == PositivityStatus::NotPositive);
    REQUIRE(c.noise_positivity.violation.has_value());
    CHECK_FALSE(c.noise_decomposability.has_value());
    CHECK_THAT(c.noise_positivity.violation->value, WithinAbs(-0.5, 1e-8));
  }
  SECTION("CP noise holds with a trivial second block") {
    const PropagationCheck c = decomposability_propagation_check(build_generator(diagonal_qubit_spec(0.5, 1, 2)));
    CHECK(c.holds);
    CHECK(c.noise_positivity.status == PositivityStatus::CompletelyPositive);
    CHECK(c.noise_decomposability->certificate->j2.mat().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("composition closure", "[decomp][property]") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 2;
    CHECK(psd_test(choi(transpose_conjugate(random_cp(d, rng))).mat).psd);
    const MapDecomposition lambda{random_cp(d, rng), random_cp(d, rng)};
    const MapDecomposition omega{random_cp(d, rng), random_cp(d, rng)};
    const MapDecomposition both = compose_decompositions(lambda, omega);
    CHECK(psd_test(choi(both.cp).mat).psd);
    CHECK(psd_test(choi(both.cp_then_t).mat).psd);
    CHECK(max_diff(both.assemble().mat, lambda.assemble().compose(omega.assemble()).mat) <= 1e-12);
  }
}

TEST_CASE("product formula", "[decomp][trotter]") {
  SECTION("reference generators") {
    const Generator g = reference_generator();
    const CMatrix exact = evolve(g, 1.0).mat;
    for (int n : {16, 64, 256}) CHECK(norm2(trotter_product(g.pseudo_h, g.noise, 1.0, n).mat - exact) <= 1e-3);
  }
  SECTION("non-commuting parts converge at first order") {
    std::mt19937_64 rng(44);
    const KossakowskiSpec spec(HermitianMatrix(random_hermitian(2, rng)), diagonal_qubit_spec(0.5, 1, 2).kossakowski,
                               pauli_basis());
    const Generator g = build_generator(spec);
    const CMatrix h = hamiltonian_part(CMatrix(-Complex(0, 1) * spec.hamiltonian.mat())).mat;
    const Superoperator a(2, h), b = g.full - a;
    const CMatrix exact = evolve(g, 1.0).mat;
    double prev = 1e300;
    for (int n : {16, 64, 256}) {
      const double err = norm2(trotter_product(a, b, 1.0, n).mat - exact);
      CHECK(err < prev);
      if (n > 16) CHECK(err < 0.5 * prev);
      prev = err;
    }
    CHECK(prev <= 1e-3);
    CHECK(prev > 1e-12);
  }
  CHECK_THROWS_AS(trotter_product(Superoperator::zero(2), Superoperator::zero(2), 1.0, 0), DomainError);
}
