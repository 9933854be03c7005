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

// Hermitian operator bases, superoperators and GKSL generators
//
//   L[rho] = -i[H, rho] + sum_ab C^ab (F_a rho F_b^+ - 1/2 {F_b^+ F_a, rho})
//
// split into the noise N[rho] = sum_ab C^ab F_a rho F_b^+ and the
// pseudo-Hamiltonian part L_h[rho] = G rho + rho G^+, G = -iH - K/2.

#include <cmath>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "sgwl/matcore.hpp"

namespace sgwl {

/// Orthonormal Hermitian basis {F_0 = 1/sqrt(d), F_1, ..., F_{d^2-1}} of M_d.
struct HermitianBasis {
  int dim = 0;
  std::vector<HermitianMatrix> elements;

  const CMatrix& operator[](std::size_t mu) const { return elements[mu].mat(); }
  std::size_t size() const { return elements.size(); }

  /// Largest deviation of the Gram matrix from the identity, and of Tr(F_a) from zero for a >= 1.
  double orthonormality_defect() const {
    double worst = 0.0;
    for (std::size_t m = 0; m < size(); ++m) {
      if (m > 0) worst = std::max(worst, std::abs((*this)[m].trace()));
      for (std::size_t n = 0; n < size(); ++n) {
        const Complex g = ((*this)[m].adjoint() * (*this)[n]).trace();
        worst = std::max(worst, std::abs(g - (m == n ? 1.0 : 0.0)));
      }
    }
    return worst;
  }
};

/// Generalized Gell-Mann basis normalized to Tr(F_a F_b) = delta_ab. Order:
/// F_0, then symmetric (j<k), antisymmetric (j<k), diagonal (l = 1..d-1).
inline HermitianBasis gell_mann_basis(int d) {
  using namespace std::complex_literals;
  if (d < 2) throw DomainError("gell_mann_basis: d must be >= 2");
  detail::require_size(d, d, "gell_mann_basis");
  HermitianBasis basis;
  basis.dim = d;
  basis.elements.reserve(std::size_t(d) * d);
  basis.elements.emplace_back(CMatrix(CMatrix::Identity(d, d) / std::sqrt(double(d))));
  const double r2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      CMatrix f = CMatrix::Zero(d, d);
      f(j, k) = r2;
      f(k, j) = r2;
      basis.elements.emplace_back(f);
    }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      CMatrix f = CMatrix::Zero(d, d);
      f(j, k) = -1i * r2;
      f(k, j) = 1i * r2;
      basis.elements.emplace_back(f);
    }
  for (int l = 1; l < d; ++l) {
    CMatrix f = CMatrix::Zero(d, d);
    const double c = 1.0 / std::sqrt(double(l) * (l + 1));
    for (int j = 0; j < l; ++j) f(j, j) = c;
    f(l, l) = -l * c;
    basis.elements.emplace_back(f);
  }
  return basis;
}

/// F_0 = 1/sqrt(2) followed by sigma_1, sigma_2, sigma_3 over sqrt(2).
inline HermitianBasis pauli_basis() {
  HermitianBasis basis;
  basis.dim = 2;
  for (int mu = 0; mu < 4; ++mu) basis.elements.emplace_back(CMatrix(pauli(mu) / std::sqrt(2.0)));
  return basis;
}

/// Linear map on M_d as a d^2 x d^2 matrix acting on column-stacked operators.
struct Superoperator {
  int dim = 0;
  CMatrix mat;

  Superoperator() = default;
  Superoperator(int d, CMatrix m) : dim(d), mat(std::move(m)) {
    if (d < 1 || mat.rows() != Eigen::Index(d) * d || mat.cols() != Eigen::Index(d) * d) {
      std::ostringstream os;
      os << "Superoperator: " << mat.rows() << "x" << mat.cols() << " matrix does not act on M_" << d;
      throw ShapeError(os.str());
    }
  }

  static Superoperator identity(int d) { return {d, CMatrix::Identity(Eigen::Index(d) * d, Eigen::Index(d) * d)}; }
  static Superoperator zero(int d) { return {d, CMatrix::Zero(Eigen::Index(d) * d, Eigen::Index(d) * d)}; }

  /// Tabulates the action of f on the matrix units |i><j|.
  static Superoperator from_action(int d, const std::function<CMatrix(const CMatrix&)>& f) {
    detail::require_size(Eigen::Index(d) * d, Eigen::Index(d) * d, "Superoperator::from_action");
    CMatrix m(Eigen::Index(d) * d, Eigen::Index(d) * d);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) {
        CMatrix e = CMatrix::Zero(d, d);
        e(i, j) = 1.0;
        m.col(Eigen::Index(j) * d + i) = vectorize(f(e));
      }
    return {d, std::move(m)};
  }

  /// Map X -> sum_k A_k X A_k^+.
  static Superoperator kraus(const std::vector<CMatrix>& ops) {
    if (ops.empty()) throw ShapeError("Superoperator::kraus: no operators");
    const int d = static_cast<int>(ops.front().rows());
    Superoperator s = zero(d);
    for (const auto& a : ops) {
      detail::require_square(a, "Superoperator::kraus");
      if (a.rows() != d) throw ShapeError("Superoperator::kraus: mixed operator sizes");
      s.mat += sandwich(a, a.adjoint());
    }
    return s;
  }

  /// Transposition X -> X^T in the computational basis.
  static Superoperator transposition(int d) {
    return from_action(d, [](const CMatrix& x) { return CMatrix(x.transpose()); });
  }

  /// X -> Tr(X) * 1.
  static Superoperator trace_map(int d) {
    return from_action(d, [d](const CMatrix& x) { return CMatrix(x.trace() * CMatrix::Identity(d, d)); });
  }

  CMatrix apply(const CMatrix& x) const {
    if (x.rows() != dim || x.cols() != dim) throw ShapeError("Superoperator::apply: operand size mismatch");
    return devectorize(mat * vectorize(x), dim);
  }

  /// (this o other)[X] = this[other[X]].
  Superoperator compose(const Superoperator& other) const {
    if (other.dim != dim) throw ShapeError("Superoperator::compose: dimension mismatch");
    return {dim, mat * other.mat};
  }

  Superoperator operator+(const Superoperator& o) const {
    if (o.dim != dim) throw ShapeError("Superoperator: dimension mismatch in +");
    return {dim, mat + o.mat};
  }
  Superoperator operator-(const Superoperator& o) const {
    if (o.dim != dim) throw ShapeError("Superoperator: dimension mismatch in -");
    return {dim, mat - o.mat};
  }
  Superoperator operator*(Complex c) const { return {dim, mat * c}; }
  friend Superoperator operator*(Complex c, const Superoperator& s) { return s * c; }
};

/// Superoperator of S1 (x) S2 on M_{d1 d2}, product basis index a*d2 + b.
inline Superoperator tensor(const Superoperator& s1, const Superoperator& s2) {
  const int d1 = s1.dim, d2 = s2.dim, d = d1 * d2;
  detail::require_size(Eigen::Index(d) * d, Eigen::Index(d) * d, "tensor");
  CMatrix m = CMatrix::Zero(Eigen::Index(d) * d, Eigen::Index(d) * d);
  // (S1 (x) S2)|a b><c e| = S1|a><c| (x) S2|b><e|
  for (int c = 0; c < d1; ++c)
    for (int a = 0; a < d1; ++a)
      for (int e = 0; e < d2; ++e)
        for (int b = 0; b < d2; ++b) {
          const Eigen::Index in = Eigen::Index(c * d2 + e) * d + (a * d2 + b);
          const Eigen::Index in1 = Eigen::Index(c) * d1 + a;
          const Eigen::Index in2 = Eigen::Index(e) * d2 + b;
          for (int cp = 0; cp < d1; ++cp)
            for (int ap = 0; ap < d1; ++ap) {
              const Complex v1 = s1.mat(Eigen::Index(cp) * d1 + ap, in1);
              if (v1 == Complex(0.0)) continue;
              for (int ep = 0; ep < d2; ++ep)
                for (int bp = 0; bp < d2; ++bp) {
                  const Eigen::Index out = Eigen::Index(cp * d2 + ep) * d + (ap * d2 + bp);
                  m(out, in) += v1 * s2.mat(Eigen::Index(ep) * d2 + bp, in2);
                }
            }
        }
  return {d, std::move(m)};
}

/// Input language for generators: Hamiltonian, Kossakowski matrix, basis.
struct KossakowskiSpec {
  int dim = 0;
  HermitianMatrix hamiltonian;
  HermitianMatrix kossakowski;
  HermitianBasis basis;

  KossakowskiSpec() = default;
  KossakowskiSpec(HermitianMatrix h, HermitianMatrix c, HermitianBasis b)
      : dim(b.dim), hamiltonian(std::move(h)), kossakowski(std::move(c)), basis(std::move(b)) {
    validate();
  }

  void validate() const {
    const Eigen::Index n = Eigen::Index(dim) * dim - 1;
    if (dim < 2 || basis.dim != dim || basis.size() != std::size_t(n + 1))
      throw ShapeError("KossakowskiSpec: basis does not match dimension");
    if (hamiltonian.dim() != dim) throw ShapeError("KossakowskiSpec: H must be d x d");
    if (kossakowski.dim() != n) throw ShapeError("KossakowskiSpec: C must be (d^2-1) x (d^2-1)");
  }
};

/// Qubit spec with H = 0 and C = diag(c1, c2, c3) in the Pauli basis.
inline KossakowskiSpec diagonal_qubit_spec(double c1, double c2, double c3) {
  CMatrix c = CMatrix::Zero(3, 3);
  c(0, 0) = c1;
  c(1, 1) = c2;
  c(2, 2) = c3;
  return {HermitianMatrix(CMatrix::Zero(2, 2)), HermitianMatrix(c), pauli_basis()};
}

struct Generator {
  Superoperator full;
  Superoperator noise;
  Superoperator pseudo_h;
  CMatrix k;            // sum_ab C^ab F_b^+ F_a
  CMatrix hamiltonian;

  int dim() const { return full.dim; }
};

inline Superoperator hamiltonian_part(const CMatrix& effective) {
  // X -> G X + X G^+
  const Eigen::Index d = effective.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  return {static_cast<int>(d), CMatrix(kron(id, effective) + kron(effective.conjugate(), id))};
}

inline Generator build_generator(const KossakowskiSpec& spec) {
  using namespace std::complex_literals;
  spec.validate();
  const int d = spec.dim;
  const std::size_t n = std::size_t(d) * d - 1;
  const CMatrix& c = spec.kossakowski.mat();

  Generator g;
  g.noise = Superoperator::zero(d);
  g.k = CMatrix::Zero(d, d);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const Complex cab = c(Eigen::Index(a), Eigen::Index(b));
      if (cab == Complex(0.0)) continue;
      const CMatrix& fa = spec.basis[a + 1];
      const CMatrix& fb = spec.basis[b + 1];
      g.noise.mat += cab * sandwich(fa, fb.adjoint());
      g.k += cab * fb.adjoint() * fa;
    }
  g.hamiltonian = spec.hamiltonian.mat();
  const CMatrix effective = -1i * g.hamiltonian - 0.5 * g.k;
  g.pseudo_h = hamiltonian_part(effective);
  g.full = g.noise + g.pseudo_h;
  return g;
}

/// L = L1 (x) id + id (x) L2 on M_{d1 d2}; every part is lifted the same way.
inline Generator product_generator(const Generator& l1, const Generator& l2) {
  if (l1.dim() != l2.dim()) throw ShapeError("product_generator: factors must share the dimension");
  const int d = l1.dim();
  const Superoperator id = Superoperator::identity(d);
  auto lift = [&](const Superoperator& a, const Superoperator& b) { return tensor(a, id) + tensor(id, b); };
  const CMatrix one = CMatrix::Identity(d, d);
  Generator g;
  g.noise = lift(l1.noise, l2.noise);
  g.pseudo_h = lift(l1.pseudo_h, l2.pseudo_h);
  g.full = lift(l1.full, l2.full);
  g.k = kron(l1.k, one) + kron(one, l2.k);
  g.hamiltonian = kron(l1.hamiltonian, one) + kron(one, l2.hamiltonian);
  return g;
}

inline Superoperator evolve(const Superoperator& generator, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evolve: time must be finite and >= 0");
  return {generator.dim, expm(t * generator.mat)};
}

inline Superoperator evolve(const Generator& g, double t) { return evolve(g.full, t); }

inline CMatrix apply(const Superoperator& s, const CMatrix& x) { return s.apply(x); }

namespace detail {

inline void require_unit(const CVector& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > tol::kOrth) {
    std::ostringstream os;
    os << what << ": vector norm " << v.norm() << " is not 1";
    throw PreconditionError(os.str());
  }
}

}  // namespace detail

/// Re <phi| S[|psi><psi|] |phi> for any map S; no orthogonality required.
inline double map_functional(const Superoperator& s, const CVector& psi, const CVector& phi) {
  if (psi.size() != s.dim || phi.size() != s.dim) throw ShapeError("map_functional: vector size mismatch");
  const CMatrix out = s.apply(psi * psi.adjoint());
  const Complex v = phi.dot(out * phi);
  if (std::abs(v.imag()) > tol::kOrth * std::max(1.0, std::abs(v.real())))
    throw NumericalError("map_functional: non-real expectation value");
  return v.real();
}

/// Re <phi| L[|psi><psi|] |phi> over orthonormal pairs. phi is
/// re-orthogonalized against psi before evaluation.
inline double positivity_functional(const Generator& g, const CVector& psi, const CVector& phi) {
  if (psi.size() != g.dim() || phi.size() != g.dim()) throw ShapeError("positivity_functional: vector size mismatch");
  detail::require_unit(psi, "positivity_functional(psi)");
  detail::require_unit(phi, "positivity_functional(phi)");
  const Complex overlap = psi.dot(phi);
  if (std::abs(overlap) > tol::kOrth) {
    std::ostringstream os;
    os << "positivity_functional: |<psi|phi>| = " << std::abs(overlap) << " exceeds " << tol::kOrth;
    throw PreconditionError(os.str());
  }
  CVector q = phi - overlap * psi;
  q.normalize();
  return map_functional(g.full, psi, q);
}

/// Reshapes a vector on C^d (x) C^d into the d x d matrix M[i][j] = v[i*d + j].
inline CMatrix bipartite_matrix(const CVector& v, int d) {
  if (v.size() != Eigen::Index(d) * d) throw ShapeError("bipartite_matrix: size mismatch");
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = v(Eigen::Index(i) * d + j);
  return m;
}

}  // namespace sgwl
