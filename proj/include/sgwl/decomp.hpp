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

// Decomposability of positive maps, Lambda = Lambda_1 + Lambda_2 o T with
// Lambda_{1,2} completely positive, decided in Choi space:
//
//   choi(Lambda) = J1 + (id (x) T)[J2],  J1, J2 >= 0.
//
// Infeasibility is certified by a PPT state X with <Lambda, X> < 0, where
// <Lambda, X> = Tr(choi(Lambda) X^T).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sgwl/detail/parallel.hpp"
#include "sgwl/gksl.hpp"
#include "sgwl/posmap.hpp"

namespace sgwl {

/// Square root of a Choi dimension, d^2 -> d.
inline int choi_factor_dim(const CMatrix& j) { return detail::exact_sqrt(j.rows(), "choi factor"); }

/// Choi matrix of Lambda o T from that of Lambda: transpose on the ancilla.
inline CMatrix ancilla_transpose(const CMatrix& j) {
  const int d = choi_factor_dim(j);
  return partial_transpose(j, d, d, Side::B);
}

/// <Lambda, X> = Re Tr(choi(Lambda) X^T).
inline double pairing_choi(const CMatrix& j, const CMatrix& x) {
  if (j.rows() != x.rows() || j.cols() != x.cols()) throw ShapeError("pairing: size mismatch");
  const Complex v = j.cwiseProduct(x).sum();
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) throw NumericalError("pairing: complex value");
  return v.real();
}

inline double pairing(const Superoperator& s, const CMatrix& x) {
  if (x.rows() != Eigen::Index(s.dim) * s.dim) throw ShapeError("pairing: X must act on C^d (x) C^d");
  return pairing_choi(choi_matrix(s), x);
}

/// Density matrix on C^d (x) C^d, optionally certified PPT.
struct WitnessState {
  HermitianMatrix mat;
  bool ppt_checked = false;
};

struct StateCheck {
  double trace_defect;
  double min_eigenvalue;
  double pt_min_eigenvalue;
  bool density;
  bool ppt;
};

inline StateCheck check_state(const CMatrix& x) {
  const int d = choi_factor_dim(x);
  StateCheck c{};
  c.trace_defect = std::abs(x.trace() - 1.0);
  const PsdTest p = psd_test(x);
  const PsdTest pt = psd_test(partial_transpose(x, d, d, Side::A));
  c.min_eigenvalue = p.min_eigenvalue;
  c.pt_min_eigenvalue = pt.min_eigenvalue;
  c.density = c.trace_defect <= 1e-12 && p.psd;
  c.ppt = pt.psd;
  return c;
}

/// Validates trace, positivity and (optionally) PPT; throws DomainError otherwise.
inline WitnessState make_witness_state(const CMatrix& x, bool require_ppt = true) {
  const StateCheck c = check_state(x);
  if (!c.density) throw DomainError("make_witness_state: not a density matrix");
  if (require_ppt && !c.ppt) throw DomainError("make_witness_state: partial transpose is not PSD");
  return {HermitianMatrix(x), require_ppt};
}

/// Tensor products of Pauli matrices sigma_s on k qubits, s in [0, 4^k),
/// most significant digit first.
inline CMatrix pauli_string(std::uint32_t s, int k) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = k - 1; q >= 0; --q) out = kron(out, pauli(int((s >> (2 * q)) & 3u)));
  return out;
}

/// Maximally entangled family Z_s = [1 (x) sigma_s] P^d_+ [1 (x) sigma_s], d = 2^k.
inline CMatrix pauli_entangled_state(std::uint32_t s, int k) {
  const int d = 1 << k;
  const CMatrix u = kron(CMatrix::Identity(d, d), pauli_string(s, k));
  return u * max_entangled_projector(d) * u.adjoint();
}

/// Z_{mu nu} = [1_4 (x) (sigma_mu (x) sigma_nu)] P^4_+ [1_4 (x) (sigma_mu (x) sigma_nu)].
inline WitnessState zstate(int mu, int nu) {
  if (mu < 0 || mu > 3 || nu < 0 || nu > 3) throw DomainError("zstate: indices must be in {0,1,2,3}");
  return {HermitianMatrix(pauli_entangled_state(std::uint32_t(4 * mu + nu), 2)), false};
}

/// (Z02 + Z11 + Z23 + Z31 + Z32 + Z33) / 6, a PPT entangled state on C^4 (x) C^4.
inline WitnessState rho_be() {
  static const int pairs[6][2] = {{0, 2}, {1, 1}, {2, 3}, {3, 1}, {3, 2}, {3, 3}};
  CMatrix x = CMatrix::Zero(16, 16);
  for (const auto& p : pairs) x += zstate(p[0], p[1]).mat.mat();
  return make_witness_state(x / 6.0, true);
}

/// alpha = exp(-2t), the contraction factor of the reference qubit semigroups.
inline double decay_alpha(double t) { return std::exp(-2.0 * t); }

/// Gamma_t = (alpha id + (1-alpha)/2 Tr) (x) ((1+alpha)/2 id + (1-alpha)/2 T) on M_4.
inline Superoperator reference_product_map(double t) {
  if (!(t >= 0.0)) throw DomainError("reference_product_map: t must be >= 0");
  const double a = decay_alpha(t);
  const Superoperator id = Superoperator::identity(2);
  const Superoperator tr = Superoperator::trace_map(2);
  const Superoperator tp = Superoperator::transposition(2);
  return tensor(a * id + ((1 - a) / 2) * tr, ((1 + a) / 2) * id + ((1 - a) / 2) * tp);
}

struct ExplicitDecomposition {
  Superoperator first;   // CP for all t
  Superoperator second;  // CP iff alpha <= 1/3; composed with T_4
};

inline ExplicitDecomposition explicit_decomposition(double t) {
  if (!(t >= 0.0)) throw DomainError("explicit_decomposition: t must be >= 0");
  const double a = decay_alpha(t);
  const Superoperator id = Superoperator::identity(2);
  const Superoperator tr = Superoperator::trace_map(2);
  const Superoperator tp = Superoperator::transposition(2);
  return {tensor(((1 + a) / 2) * (a * id + ((1 - a) / 2) * tr), id),
          tensor(((1 - a) / 2) * (a * tp + ((1 - a) / 2) * tr), id)};
}

/// W_{mu nu}(t) = <Gamma_t, Z_{mu nu}>.
inline Eigen::Matrix4d w_table(double t) {
  if (!(t >= 0.0)) throw DomainError("w_table: t must be >= 0");
  const CMatrix j = choi_matrix(reference_product_map(t));
  Eigen::Matrix4d w;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) w(mu, nu) = pairing_choi(j, zstate(mu, nu).mat.mat());
  return w;
}

/// Noise part of the generator of Gamma_t: (Tr - id/2) (x) id + id (x) (T - id/2).
inline Superoperator reference_noise() {
  const Superoperator id = Superoperator::identity(2);
  const Superoperator tr = Superoperator::trace_map(2);
  const Superoperator tp = Superoperator::transposition(2);
  return tensor(tr - 0.5 * id, id) + tensor(id, tp - 0.5 * id);
}

/// True when (a, b) generate the reference product semigroup, i.e. a has
/// C = I and b has C = diag(1, -1, 1) in the Pauli basis (H = 0).
inline bool is_reference_pair(const Generator& a, const Generator& b, double tolerance = 1e-12) {
  if (a.dim() != 2 || b.dim() != 2) return false;
  return max_abs_entry(a.full.mat - build_generator(diagonal_qubit_spec(1, 1, 1)).full.mat) <= tolerance &&
         max_abs_entry(b.full.mat - build_generator(diagonal_qubit_spec(1, -1, 1)).full.mat) <= tolerance;
}

struct NoisePairings {
  Eigen::Matrix4d table;
  double rho_be = 0.0;
};

inline NoisePairings noise_pairings() {
  const CMatrix j = choi_matrix(reference_noise());
  NoisePairings out;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) out.table(mu, nu) = pairing_choi(j, zstate(mu, nu).mat.mat());
  out.rho_be = pairing_choi(j, rho_be().mat.mat());
  return out;
}

struct DecompositionCertificate {
  HermitianMatrix j1;
  HermitianMatrix j2;
  double residual = 0.0;  // ||J - J1 - (id (x) T)[J2]||_F
};

inline double decomposition_residual(const CMatrix& j, const CMatrix& j1, const CMatrix& j2) {
  return (j - j1 - ancilla_transpose(j2)).norm();
}

enum class FeasibilityStatus { Feasible, InfeasibleWitnessed, MaxIterations };

inline std::string to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::Feasible: return "feasible";
    case FeasibilityStatus::InfeasibleWitnessed: return "infeasible";
    case FeasibilityStatus::MaxIterations: return "max-iterations";
  }
  return "max-iterations";
}

struct Witness {
  WitnessState state;
  double pairing = 0.0;
  std::vector<double> weights;  // over the Pauli entangled family, when found by search
};

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::MaxIterations;
  std::optional<DecompositionCertificate> certificate;
  std::optional<Witness> witness;
  double gap = 0.0;
  long iterations = 0;
};

struct FeasibilityOptions {
  long max_iterations = 50000;
  double tolerance = tol::kFeas;
  long stall_window = 1000;
  double stall_ratio = 1e-6;
  // Tried before the simplex search; used only if PPT-valid and negative.
  std::vector<CMatrix> candidate_witnesses;
  // Subsets of the entangled family larger than this are not enumerated.
  int max_subset_size = 16;
  int refine_rounds = 20;
};

namespace detail {

inline bool ppt_density(const CMatrix& x) {
  const StateCheck c = check_state(x);
  return c.density && c.ppt;
}

inline CMatrix mix(const std::vector<CMatrix>& family, const std::vector<double>& w) {
  CMatrix x = CMatrix::Zero(family.front().rows(), family.front().cols());
  for (std::size_t i = 0; i < family.size(); ++i)
    if (w[i] != 0.0) x += w[i] * family[i];
  return x;
}

// Minimizes the (linear) pairing over convex combinations of the Pauli
// entangled family subject to PPT: uniform-weight subsets first, then
// pairwise mass transfers with step halving.
inline std::optional<Witness> search_entangled_simplex(const CMatrix& j, const FeasibilityOptions& opt) {
  const int d = choi_factor_dim(j);
  if (d < 2 || (d & (d - 1)) != 0) return std::nullopt;
  const int k = std::countr_zero(unsigned(d));
  const std::size_t m = std::size_t(1) << (2 * k);
  std::vector<CMatrix> family(m);
  std::vector<double> w(m);
  for (std::size_t s = 0; s < m; ++s) {
    family[s] = pauli_entangled_state(std::uint32_t(s), k);
    w[s] = pairing_choi(j, family[s]);
  }

  struct Cand {
    double value;
    std::uint64_t mask;
  };
  std::vector<Cand> cands;
  const int max_size = std::min<int>(opt.max_subset_size, int(m));
  if (m <= 20) {
    const std::uint64_t total = std::uint64_t(1) << m;
    std::vector<double> sums(total, 0.0);
    for (std::uint64_t mask = 1; mask < total; ++mask) {
      const int low = std::countr_zero(mask);
      sums[mask] = sums[mask & (mask - 1)] + w[std::size_t(low)];
      const int size = std::popcount(mask);
      if (size > max_size) continue;
      const double mean = sums[mask] / size;
      if (mean < -tol::kPsd) cands.push_back({mean, mask});
    }
  } else {
    // pairs and singletons only for large families
    for (std::size_t a = 0; a < m && a < 64; ++a) {
      if (w[a] < -tol::kPsd) cands.push_back({w[a], std::uint64_t(1) << a});
      for (std::size_t b = a + 1; b < m && b < 64; ++b) {
        const double mean = 0.5 * (w[a] + w[b]);
        if (mean < -tol::kPsd) cands.push_back({mean, (std::uint64_t(1) << a) | (std::uint64_t(1) << b)});
      }
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    return a.value < b.value || (a.value == b.value && a.mask < b.mask);
  });

  std::vector<double> weights;
  for (const Cand& c : cands) {
    std::vector<double> trial(m, 0.0);
    const double share = 1.0 / std::popcount(c.mask);
    for (std::size_t s = 0; s < m; ++s)
      if ((c.mask >> s) & 1u) trial[s] = share;
    if (ppt_density(mix(family, trial))) {
      weights = std::move(trial);
      break;
    }
  }
  if (weights.empty()) return std::nullopt;

  auto value_of = [&](const std::vector<double>& v) { return std::inner_product(v.begin(), v.end(), w.begin(), 0.0); };
  double best = value_of(weights);
  for (int round = 0; round < opt.refine_rounds; ++round) {
    bool improved = false;
    for (std::size_t from = 0; from < m && !improved; ++from) {
      if (weights[from] <= 0.0) continue;
      for (std::size_t to = 0; to < m && !improved; ++to) {
        if (w[to] >= w[from]) continue;
        double delta = weights[from];
        for (int h = 0; h < 10; ++h, delta *= 0.5) {
          std::vector<double> trial = weights;
          trial[from] -= delta;
          trial[to] += delta;
          const double v = value_of(trial);
          if (v < best - 1e-14 && ppt_density(mix(family, trial))) {
            weights = std::move(trial);
            best = v;
            improved = true;
            break;
          }
        }
      }
    }
    if (!improved) break;
  }
  const CMatrix x = mix(family, weights);
  const double value = pairing_choi(j, x);
  if (!(value < -tol::kPsd) || !ppt_density(x)) return std::nullopt;
  return Witness{WitnessState{HermitianMatrix::hermitian_part(x), true}, value, weights};
}

}  // namespace detail

/// Searches for a PPT state pairing negatively with the map whose Choi matrix
/// is j: user candidates first, then the Pauli entangled simplex (d = 2^k).
inline std::optional<Witness> find_witness(const CMatrix& j, const FeasibilityOptions& opt = {}) {
  std::optional<Witness> best;
  for (const CMatrix& x : opt.candidate_witnesses) {
    if (x.rows() != j.rows() || !detail::ppt_density(x)) continue;
    const double v = pairing_choi(j, x);
    if (v < -tol::kPsd && (!best || v < best->pairing))
      best = Witness{WitnessState{HermitianMatrix::hermitian_part(x), true}, v, {}};
  }
  if (best) return best;
  return detail::search_entangled_simplex(j, opt);
}

/// Membership of the map in the decomposable cone, by alternating
/// projections between {J2 >= 0} and {J2 : (id (x) T)[J2] <= J}.
inline FeasibilityResult decomposability_feasibility(const ChoiMatrix& choi_j, const FeasibilityOptions& opt = {}) {
  const CMatrix& j = choi_j.mat.mat();
  const Eigen::Index n = j.rows();
  FeasibilityResult result;

  if (psd_test(j).psd) {
    result.status = FeasibilityStatus::Feasible;
    const CMatrix zero = CMatrix::Zero(n, n);
    result.certificate = DecompositionCertificate{HermitianMatrix(j), HermitianMatrix(zero), 0.0};
    return result;
  }

  CMatrix j2 = CMatrix::Zero(n, n);
  double residual = std::numeric_limits<double>::infinity();
  double window_start = residual;
  bool witness_tried = false;
  for (long it = 1; it <= opt.max_iterations; ++it) {
    const CMatrix y = j - psd_projection(j - ancilla_transpose(j2));
    j2 = psd_projection(ancilla_transpose(y));
    const CMatrix rest = j - ancilla_transpose(j2);
    const CMatrix j1 = psd_projection(rest);
    residual = (rest - j1).norm();
    result.iterations = it;
    if (residual <= opt.tolerance) {
      result.status = FeasibilityStatus::Feasible;
      result.certificate = DecompositionCertificate{HermitianMatrix::hermitian_part(j1),
                                                    HermitianMatrix::hermitian_part(j2),
                                                    decomposition_residual(j, j1, j2)};
      result.gap = residual;
      return result;
    }
    if (!witness_tried && opt.stall_window > 0 && it % opt.stall_window == 0) {
      if (window_start - residual < opt.stall_ratio * residual) {
        witness_tried = true;
        if (auto w = find_witness(j, opt)) {
          result.status = FeasibilityStatus::InfeasibleWitnessed;
          result.witness = std::move(w);
          result.gap = residual;
          return result;
        }
      }
      window_start = residual;
    }
  }
  result.gap = residual;
  if (!witness_tried) {
    if (auto w = find_witness(j, opt)) {
      result.status = FeasibilityStatus::InfeasibleWitnessed;
      result.witness = std::move(w);
      return result;
    }
  }
  result.status = FeasibilityStatus::MaxIterations;
  return result;
}

inline FeasibilityResult decomposability_feasibility(const ChoiMatrix& j, long max_iterations, double tolerance) {
  FeasibilityOptions opt;
  opt.max_iterations = max_iterations;
  opt.tolerance = tolerance;
  return decomposability_feasibility(j, opt);
}

using MapFamily = std::function<Superoperator(double)>;
using Criterion = std::function<double(const Superoperator&)>;

/// lambda_min of the Choi matrix.
inline Criterion criterion_choi_min() {
  return [](const Superoperator& s) { return min_eigenvalue(choi_matrix(s)); };
}

/// <Lambda, X>.
inline Criterion criterion_pairing(CMatrix x) {
  return [x = std::move(x)](const Superoperator& s) { return pairing(s, x); };
}

/// Bisection on the sign of the criterion; values above -negative_tolerance
/// count as nonnegative so that exact zeros do not flicker.
inline double find_threshold(const MapFamily& family, const Criterion& criterion, double t_lo, double t_hi,
                             double tolerance = 1e-9, double negative_tolerance = 1e-12) {
  if (!(t_lo < t_hi)) throw DomainError("find_threshold: empty bracket");
  auto negative = [&](double t) { return criterion(family(t)) < -negative_tolerance; };
  const bool lo_neg = negative(t_lo);
  if (lo_neg == negative(t_hi)) throw DomainError("find_threshold: criterion does not change sign on the bracket");
  while (t_hi - t_lo > tolerance) {
    const double mid = 0.5 * (t_lo + t_hi);
    (negative(mid) == lo_neg ? t_lo : t_hi) = mid;
  }
  return 0.5 * (t_lo + t_hi);
}

struct PropagationCheck {
  bool holds = false;
  PositivityVerdict noise_positivity;
  // Absent when the noise is not positive: the hypothesis already fails.
  std::optional<FeasibilityResult> noise_decomposability;
};

/// Hypothesis of the decomposability propagation result: the noise term is a
/// positive and decomposable map.
inline PropagationCheck decomposability_propagation_check(const Generator& g, const PairSearchOptions& search = {},
                                       const FeasibilityOptions& feas = {}) {
  PropagationCheck out;
  const Superoperator& n = g.noise;
  const ChoiMatrix j = choi(n);
  if (psd_test(j.mat).psd) {
    out.noise_positivity.status = PositivityStatus::CompletelyPositive;
    out.noise_positivity.choi = ChoiCertificate{min_eigenvalue(j.mat), {}};
  } else {
    out.noise_positivity = map_positivity_check(n, search);
  }
  const bool positive = out.noise_positivity.status == PositivityStatus::CompletelyPositive ||
                        out.noise_positivity.status == PositivityStatus::PositiveNotCP;
  if (!positive) return out;
  out.noise_decomposability = decomposability_feasibility(j, feas);
  out.holds = out.noise_decomposability->status == FeasibilityStatus::Feasible;
  return out;
}

struct MapDecomposition {
  Superoperator cp;         // Lambda_1
  Superoperator cp_then_t;  // Lambda_2, applied after T
  Superoperator assemble() const { return cp + cp_then_t.compose(Superoperator::transposition(cp.dim)); }
};

/// T o Omega o T.
inline Superoperator transpose_conjugate(const Superoperator& omega) {
  const Superoperator t = Superoperator::transposition(omega.dim);
  return t.compose(omega).compose(t);
}

/// Decomposition of Lambda o Omega from decompositions of both factors.
inline MapDecomposition compose_decompositions(const MapDecomposition& lambda, const MapDecomposition& omega) {
  return {lambda.cp.compose(omega.cp) + lambda.cp_then_t.compose(transpose_conjugate(omega.cp_then_t)),
          lambda.cp_then_t.compose(transpose_conjugate(omega.cp)) + lambda.cp.compose(omega.cp_then_t)};
}

/// (exp(A t/n) exp(B t/n))^n.
inline Superoperator trotter_product(const Superoperator& a, const Superoperator& b, double t, int n) {
  if (n < 1) throw DomainError("trotter_product: n must be >= 1");
  const CMatrix step = expm(a.mat * (t / n)) * expm(b.mat * (t / n));
  CMatrix result = CMatrix::Identity(step.rows(), step.cols());
  CMatrix base = step;
  for (unsigned e = unsigned(n); e != 0; e >>= 1) {
    if (e & 1u) result = result * base;
    if (e > 1) base = base * base;
  }
  return {a.dim, std::move(result)};
}

}  // namespace sgwl
