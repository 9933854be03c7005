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

// Verdicts on maps and generators: complete positivity from the Choi matrix,
// positivity by optimization over (orthonormal) vector pairs, and the
// closed-form conditions available for qubits and product semigroups.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sgwl/detail/parallel.hpp"
#include "sgwl/gksl.hpp"

namespace sgwl {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;
inline constexpr int kDefaultBudget = 64;

/// (Lambda (x) id)[P^d_+] for a map acting on M_d.
struct ChoiMatrix {
  int d = 0;
  HermitianMatrix mat;
};

/// Choi matrix without the Hermiticity gate (for maps that need not preserve
/// Hermiticity, and for linear combinations).
inline CMatrix choi_matrix(const Superoperator& s) {
  const int d = s.dim;
  const Eigen::Index n = Eigen::Index(d) * d;
  CMatrix j = CMatrix::Zero(n, n);
  // entry ((a, i), (b, j)) = Lambda(|i><j|)_{ab} / d
  for (int i = 0; i < d; ++i)
    for (int jj = 0; jj < d; ++jj) {
      const CVector col = s.mat.col(Eigen::Index(jj) * d + i);
      for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a) j(Eigen::Index(a) * d + i, Eigen::Index(b) * d + jj) = col(Eigen::Index(b) * d + a) / double(d);
    }
  return j;
}

inline ChoiMatrix choi(const Superoperator& s) {
  if (s.dim < 2) throw DomainError("choi: map must act on M_d with d >= 2");
  return {s.dim, HermitianMatrix(choi_matrix(s), 1e-10)};
}

/// Inverse of choi_matrix.
inline Superoperator superoperator_from_choi(const CMatrix& j, int d) {
  if (j.rows() != Eigen::Index(d) * d || j.cols() != j.rows()) throw ShapeError("superoperator_from_choi: size mismatch");
  CMatrix m(Eigen::Index(d) * d, Eigen::Index(d) * d);
  for (int i = 0; i < d; ++i)
    for (int jj = 0; jj < d; ++jj)
      for (int b = 0; b < d; ++b)
        for (int a = 0; a < d; ++a)
          m(Eigen::Index(b) * d + a, Eigen::Index(jj) * d + i) = j(Eigen::Index(a) * d + i, Eigen::Index(b) * d + jj) * double(d);
  return {d, std::move(m)};
}

enum class PositivityStatus { CompletelyPositive, PositiveNotCP, NotPositive, Undetermined };

inline std::string to_string(PositivityStatus s) {
  switch (s) {
    case PositivityStatus::CompletelyPositive: return "CompletelyPositive";
    case PositivityStatus::PositiveNotCP: return "PositiveNotCP";
    case PositivityStatus::NotPositive: return "NotPositive";
    case PositivityStatus::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

struct ChoiCertificate {
  double min_eigenvalue = 0.0;
  CVector eigenvector;
};

struct ViolatingPair {
  CVector psi;
  CVector phi;
  double value = 0.0;
};

struct SearchStats {
  double best_value = 0.0;
  double spread = 0.0;  // across the best few starts
  int starts = 0;
  long evaluations = 0;
  CVector best_psi;
  CVector best_phi;
};

struct PositivityVerdict {
  PositivityStatus status = PositivityStatus::Undetermined;
  std::optional<ChoiCertificate> choi;
  std::optional<ViolatingPair> violation;
  std::optional<SearchStats> search;

  bool completely_positive() const { return status == PositivityStatus::CompletelyPositive; }
};

struct PairSearchOptions {
  int budget = kDefaultBudget;
  std::uint64_t seed = kDefaultSeed;
  int max_iterations = 200;
  int top_starts = 4;
  double spread_tolerance = 1e-8;
  double gradient_step = 1e-6;
};

namespace detail {

struct PairEval {
  double value;
  CVector phi;
};

// Inner problem for fixed psi, solved exactly: smallest eigenvalue of the
// Hermitian part of S[|psi><psi|], optionally restricted to psi-perp.
inline PairEval inner_minimum(const Superoperator& s, const CVector& psi, bool orthogonal) {
  const CMatrix out = s.apply(psi * psi.adjoint());
  const CMatrix h = (out + out.adjoint()) * 0.5;
  const Eigen::Index n = psi.size();
  if (!orthogonal) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
  }
  Eigen::HouseholderQR<CMatrix> qr(psi);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix perp = q.rightCols(n - 1);
  const CMatrix m = perp.adjoint() * h * perp;
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) * 0.5);
  CVector phi = perp * es.eigenvectors().col(0);
  phi -= psi.dot(phi) * psi;
  phi.normalize();
  return {es.eigenvalues()(0), phi};
}

struct StartResult {
  double value;
  CVector psi;
  CVector phi;
  long evaluations;
};

inline CVector random_unit_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

// Projected gradient descent on the unit sphere with a central-difference
// gradient and step halving.
inline StartResult descend(const Superoperator& s, bool orthogonal, CVector psi, const PairSearchOptions& opt) {
  using namespace std::complex_literals;
  const Eigen::Index n = psi.size();
  long evals = 0;
  auto f = [&](const CVector& v) {
    ++evals;
    return inner_minimum(s, v / v.norm(), orthogonal).value;
  };
  double value = f(psi);
  double step = 0.5;
  const double h = opt.gradient_step;
  for (int it = 0; it < opt.max_iterations; ++it) {
    CVector grad(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      CVector p = psi, m = psi;
      p(k) += h;
      m(k) -= h;
      const double dre = (f(p) - f(m)) / (2 * h);
      p = psi;
      m = psi;
      p(k) += 1i * h;
      m(k) -= 1i * h;
      const double dim = (f(p) - f(m)) / (2 * h);
      grad(k) = Complex(dre, dim);
    }
    grad -= psi.dot(grad) * psi;  // drop radial and phase directions
    const double gnorm2 = grad.squaredNorm();
    if (gnorm2 < 1e-22) break;
    step = std::min(1.0, 2 * step);
    auto try_step = [&](double a) {
      CVector trial = psi - a * grad;
      trial.normalize();
      return std::pair{f(trial), trial};
    };
    bool moved = false;
    while (step > 1e-14) {
      auto [tv, trial] = try_step(step);
      if (tv < value - 1e-4 * step * gnorm2) {
        // keep halving while it still helps: avoids bouncing across a valley
        // when the accepted step overshoots
        while (step > 1e-14) {
          auto [hv, half] = try_step(0.5 * step);
          if (!(hv < tv)) break;
          tv = hv;
          trial = std::move(half);
          step *= 0.5;
        }
        const double gain = value - tv;
        psi = std::move(trial);
        value = tv;
        moved = gain > 1e-16;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  PairEval fin = inner_minimum(s, psi, orthogonal);
  ++evals;
  return {fin.value, psi, fin.phi, evals};
}

}  // namespace detail

/// Multistart minimization of Re<phi|S[|psi><psi|]|phi> over unit psi, with the
/// optimal phi in closed form. orthogonal=true restricts phi to psi-perp.
inline SearchStats minimize_pair_functional(const Superoperator& s, bool orthogonal, const PairSearchOptions& opt) {
  if (opt.budget < 1) throw PreconditionError("pair search: budget must be >= 1");
  if (orthogonal && s.dim < 2) throw DomainError("pair search: orthogonal pairs need d >= 2");
  std::vector<detail::StartResult> results(static_cast<std::size_t>(opt.budget));
  detail::parallel_for(results.size(), [&](std::size_t i) {
    std::mt19937_64 rng(opt.seed + i);
    results[i] = detail::descend(s, orthogonal, detail::random_unit_vector(s.dim, rng), opt);
  });
  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return results[a].value < results[b].value; });
  SearchStats stats;
  stats.starts = opt.budget;
  for (const auto& r : results) stats.evaluations += r.evaluations;
  const auto& best = results[order.front()];
  stats.best_value = best.value;
  stats.best_psi = best.psi;
  stats.best_phi = best.phi;
  const std::size_t top = std::min<std::size_t>(order.size(), std::max(1, opt.top_starts));
  stats.spread = results[order[top - 1]].value - best.value;
  return stats;
}

/// Complete positivity test on a generator: L is conditionally completely positive iff
/// its Choi matrix is PSD on the complement of P^d_+.
inline PsdTest generator_cp_test(const Generator& g, double eps = tol::kPsd) {
  const int d = g.dim();
  const Eigen::Index n = Eigen::Index(d) * d;
  const CMatrix j = choi_matrix(g.full);
  CVector omega = CVector::Zero(n);
  for (int i = 0; i < d; ++i) omega(Eigen::Index(i) * d + i) = 1.0 / std::sqrt(double(d));
  Eigen::HouseholderQR<CMatrix> qr(omega);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix perp = q.rightCols(n - 1);
  return psd_test(perp.adjoint() * ((j + j.adjoint()) * 0.5) * perp, eps);
}

namespace detail {

inline PositivityVerdict classify_search(PositivityVerdict v, const SearchStats& stats, const Superoperator& s,
                                         bool orthogonal, const PairSearchOptions& opt) {
  v.search = stats;
  if (stats.best_value < -tol::kPsd) {
    const double check = map_functional(s, stats.best_psi, stats.best_phi);
    const double overlap = std::abs(stats.best_psi.dot(stats.best_phi));
    if (check < -tol::kPsd && (!orthogonal || overlap <= tol::kOrth)) {
      v.status = PositivityStatus::NotPositive;
      v.violation = ViolatingPair{stats.best_psi, stats.best_phi, check};
      return v;
    }
  }
  if (v.status == PositivityStatus::CompletelyPositive) return v;
  v.status = stats.spread > opt.spread_tolerance ? PositivityStatus::Undetermined : PositivityStatus::PositiveNotCP;
  return v;
}

}  // namespace detail

/// Positivity check of exp(tL) for all t >= 0: minimizes the generator
/// functional over orthonormal pairs. CompletelyPositive when the generator
/// passes the conditional complete positivity test.
inline PositivityVerdict kossakowski_positivity_check(const Generator& g, const PairSearchOptions& opt = {}) {
  if (opt.budget < 1) throw PreconditionError("kossakowski_positivity_check: budget must be >= 1");
  PositivityVerdict v;
  const PsdTest cp = generator_cp_test(g);
  if (cp.psd) v.status = PositivityStatus::CompletelyPositive;
  v.choi = ChoiCertificate{cp.min_eigenvalue, {}};
  const SearchStats stats = minimize_pair_functional(g.full, true, opt);
  return detail::classify_search(std::move(v), stats, g.full, true, opt);
}

inline PositivityVerdict kossakowski_positivity_check(const Generator& g, int budget, std::uint64_t seed) {
  PairSearchOptions opt;
  opt.budget = budget;
  opt.seed = seed;
  return kossakowski_positivity_check(g, opt);
}

/// Positivity of a single map: min over unit psi of lambda_min(S[|psi><psi|]).
inline PositivityVerdict map_positivity_check(const Superoperator& s, const PairSearchOptions& opt = {}) {
  PositivityVerdict v;
  const SearchStats stats = minimize_pair_functional(s, false, opt);
  return detail::classify_search(std::move(v), stats, s, false, opt);
}

/// CP iff lambda_min(choi) >= -eps_psd * max(1, ||choi||). Non-CP maps are
/// further classified by a map positivity search.
inline PositivityVerdict is_completely_positive(const Superoperator& s, const PairSearchOptions& opt = {}) {
  const ChoiMatrix j = choi(s);
  const Spectrum spec = hermitian_eig(j.mat);
  PositivityVerdict v;
  v.choi = ChoiCertificate{spec.min(), spec.eigenvectors.col(0)};
  const double scale = std::max(1.0, std::max(std::abs(spec.min()), std::abs(spec.max())));
  if (spec.min() >= -tol::kPsd * scale) {
    v.status = PositivityStatus::CompletelyPositive;
    return v;
  }
  const SearchStats stats = minimize_pair_functional(s, false, opt);
  return detail::classify_search(std::move(v), stats, s, false, opt);
}

/// Closed-form qubit positivity for C = diag(c1, c2, c3) in the Pauli basis.
inline bool qubit_positivity_conditions(double c1, double c2, double c3) {
  return c1 + c2 >= 0.0 && c2 + c3 >= 0.0 && c1 + c3 >= 0.0;
}

struct ProductConditionReport {
  HermitianMatrix combined;     // C1 + Vc^+ C2 Vc
  double min_eigenvalue = 0.0;
  CMatrix v;                    // unitary on C^d
  CMatrix basis_transform;      // Vc on the traceless sector
  bool necessary = false;
  std::optional<bool> sufficient;
};

/// Matrix Vc with V F_a^+ V^{-1} = sum_b Vc_ab F_b^+, a, b >= 1.
inline CMatrix basis_transform(const HermitianBasis& basis, const CMatrix& v) {
  const Eigen::Index n = Eigen::Index(basis.size()) - 1;
  const CMatrix vinv = v.inverse();
  CMatrix out(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const CMatrix conj = v * basis[std::size_t(a + 1)].adjoint() * vinv;
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = (basis[std::size_t(b + 1)] * conj).trace();
  }
  return out;
}

/// Necessary condition for positivity of gamma^1_t (x) gamma^2_t, restricted to unitary V.
inline ProductConditionReport product_positivity_necessary(const HermitianMatrix& c1, const HermitianMatrix& c2,
                                             const HermitianBasis& basis, const CMatrix& v) {
  const Eigen::Index n = Eigen::Index(basis.size()) - 1;
  if (c1.dim() != n || c2.dim() != n) throw ShapeError("product_positivity_necessary: Kossakowski matrices do not match the basis");
  if (v.rows() != basis.dim || v.cols() != basis.dim) throw ShapeError("product_positivity_necessary: V must be d x d");
  const double defect = max_abs_entry(v.adjoint() * v - CMatrix::Identity(basis.dim, basis.dim));
  if (defect > 1e-10) throw PreconditionError("product_positivity_necessary: V must be unitary");
  ProductConditionReport r;
  r.v = v;
  r.basis_transform = basis_transform(basis, v);
  r.combined = HermitianMatrix(CMatrix(c1.mat() + r.basis_transform.adjoint() * c2.mat() * r.basis_transform), 1e-10);
  r.min_eigenvalue = min_eigenvalue(r.combined);
  r.necessary = r.min_eigenvalue >= -tol::kPsd * std::max(1.0, norm2(r.combined));
  return r;
}

/// Sufficient condition for positivity of the product semigroup with
/// diagonal generators: c1 >= |c2_k| everywhere, c2_l >= |c2_k| for l != k.
inline bool product_positivity_sufficient(std::span<const double> c1, std::span<const double> c2) {
  if (c1.size() != c2.size() || c1.empty()) throw ShapeError("product_positivity_sufficient: rate vectors must have equal nonzero length");
  if (std::any_of(c1.begin(), c1.end(), [](double x) { return x < 0.0; }))
    throw PreconditionError("product_positivity_sufficient: c1 must be nonnegative");
  const auto negatives = std::count_if(c2.begin(), c2.end(), [](double x) { return x < 0.0; });
  if (negatives > 1) throw PreconditionError("product_positivity_sufficient: at most one negative rate allowed in c2");
  if (negatives == 0) return true;
  const std::size_t k = std::size_t(std::find_if(c2.begin(), c2.end(), [](double x) { return x < 0.0; }) - c2.begin());
  const double bound = std::abs(c2[k]);
  for (std::size_t l = 0; l < c1.size(); ++l) {
    if (c1[l] < bound) return false;
    if (l != k && c2[l] < bound) return false;
  }
  return true;
}

/// Qubit product semigroup verdict: ci(1) + cj(2) >= 0 for all i, j.
inline bool qubit_product_positivity(const std::array<double, 3>& c1, const std::array<double, 3>& c2) {
  if (!qubit_positivity_conditions(c1[0], c1[1], c1[2]) || !qubit_positivity_conditions(c2[0], c2[1], c2[2]))
    throw PreconditionError("qubit_product_positivity: each factor must be a positive semigroup");
  for (double a : c1)
    for (double b : c2)
      if (a + b < 0.0) return false;
  return true;
}

}  // namespace sgwl
