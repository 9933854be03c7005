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

// Dense complex matrix kernel: Kronecker products, partial transposes,
// Hermitian eigendecomposition, Pade matrix exponential and the
// column-stacking vectorization used by every superoperator in the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sgwl {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Error taxonomy. Everything derives from std::runtime_error / logic_error so
// callers that do not care can catch the standard bases.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double kHerm = 1e-12;   // relative Hermiticity gate
inline constexpr double kEig = 1e-10;    // eigen-residual bound
inline constexpr double kPsd = 1e-10;    // PSD slack
inline constexpr double kFeas = 1e-8;    // decomposition residual
inline constexpr double kOrth = 1e-10;   // orthogonality of (psi, phi)
}  // namespace tol

inline constexpr Eigen::Index kMaxDim = 4096;

namespace detail {

inline void require_size(Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (rows <= 0 || cols <= 0 || rows > kMaxDim || cols > kMaxDim) {
    std::ostringstream os;
    os << what << ": size " << rows << "x" << cols << " outside [1, " << kMaxDim << "]";
    throw ShapeError(os.str());
  }
}

inline void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << what << ": expected square matrix, got " << a.rows() << "x" << a.cols();
    throw ShapeError(os.str());
  }
}

inline int exact_sqrt(Eigen::Index n, const char* what) {
  const auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (r * r != n) {
    std::ostringstream os;
    os << what << ": length " << n << " is not a perfect square";
    throw ShapeError(os.str());
  }
  return static_cast<int>(r);
}

}  // namespace detail

inline bool all_finite(const CMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

/// Rejects NaN/Inf entries; returns the input for chaining.
inline const CMatrix& require_finite(const CMatrix& a, const char* what = "matrix") {
  if (!all_finite(a)) throw DomainError(std::string(what) + ": non-finite entry");
  return a;
}

inline double max_abs_entry(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Spectral norm (largest singular value).
inline double norm2(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

/// Square matrix stored symmetrized, guarded by a relative Hermiticity gate:
/// max|X - X^dagger| <= kHerm * max|X|.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const CMatrix& x, double gate = tol::kHerm) {
    detail::require_square(x, "HermitianMatrix");
    require_finite(x, "HermitianMatrix");
    const double scale = max_abs_entry(x);
    const double skew = max_abs_entry(x - x.adjoint());
    if (skew > gate * std::max(scale, std::numeric_limits<double>::min())) {
      std::ostringstream os;
      os << "HermitianMatrix: |X - X^+| = " << skew << " exceeds gate " << gate << " * " << scale;
      throw DomainError(os.str());
    }
    mat_ = (x + x.adjoint()) * 0.5;
  }

  /// Hermitian part of an arbitrary square matrix, no gate.
  static HermitianMatrix hermitian_part(const CMatrix& x) {
    detail::require_square(x, "hermitian_part");
    HermitianMatrix h;
    h.mat_ = (x + x.adjoint()) * 0.5;
    return h;
  }

  const CMatrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }
  operator const CMatrix&() const { return mat_; }

 private:
  CMatrix mat_;
};

struct Spectrum {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns, unitary

  double min() const { return eigenvalues(0); }
  double max() const { return eigenvalues(eigenvalues.size() - 1); }
};

/// Eigendecomposition of a Hermitian matrix with residual validation.
inline Spectrum hermitian_eig(const HermitianMatrix& h) {
  const CMatrix& a = h.mat();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_eig: solver did not converge");
  Spectrum s{es.eigenvalues(), es.eigenvectors()};
  const double scale = std::max(1.0, std::max(std::abs(s.min()), std::abs(s.max())));
  const double residual = (a * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff();
  if (residual > tol::kEig * scale) {
    std::ostringstream os;
    os << "hermitian_eig: residual " << residual << " exceeds " << tol::kEig * scale;
    throw NumericalError(os.str());
  }
  return s;
}

inline RVector hermitian_eigenvalues(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_eigenvalues: solver did not converge");
  return es.eigenvalues();
}

inline double min_eigenvalue(const CMatrix& a) { return hermitian_eigenvalues(a)(0); }

/// PSD decision: lambda_min >= -kPsd * max(1, ||X||_2).
struct PsdTest {
  bool psd;
  double min_eigenvalue;
  double threshold;
};

inline PsdTest psd_test(const CMatrix& a, double eps = tol::kPsd) {
  const RVector ev = hermitian_eigenvalues(a);
  const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  const double threshold = -eps * std::max(1.0, norm);
  return {ev(0) >= threshold, ev(0), threshold};
}

/// Projection onto the PSD cone in Frobenius norm (clip negative eigenvalues).
inline CMatrix psd_projection(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((a + a.adjoint()) * 0.5);
  if (es.info() != Eigen::Success) throw NumericalError("psd_projection: solver did not converge");
  const RVector clipped = es.eigenvalues().cwiseMax(0.0);
  CMatrix p = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  return (p + p.adjoint()) * 0.5;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  detail::require_size(rows, cols, "kron");
  CMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

enum class Side { A, B };

/// Transpose on one tensor factor of a dimA*dimB square matrix, in the
/// computational product basis |a>|b> -> index a*dimB + b.
inline CMatrix partial_transpose(const CMatrix& x, int dim_a, int dim_b, Side side) {
  if (dim_a < 1 || dim_b < 1 || x.rows() != x.cols() || x.rows() != Eigen::Index(dim_a) * dim_b) {
    std::ostringstream os;
    os << "partial_transpose: " << x.rows() << "x" << x.cols() << " does not match " << dim_a << "*" << dim_b;
    throw ShapeError(os.str());
  }
  CMatrix out(x.rows(), x.cols());
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_b; ++b)
      for (int ap = 0; ap < dim_a; ++ap)
        for (int bp = 0; bp < dim_b; ++bp) {
          const Eigen::Index r = Eigen::Index(a) * dim_b + b;
          const Eigen::Index c = Eigen::Index(ap) * dim_b + bp;
          const Eigen::Index rr = side == Side::A ? Eigen::Index(ap) * dim_b + b : Eigen::Index(a) * dim_b + bp;
          const Eigen::Index cc = side == Side::A ? Eigen::Index(a) * dim_b + bp : Eigen::Index(ap) * dim_b + b;
          out(rr, cc) = x(r, c);
        }
  return out;
}

/// Matrix exponential by scaling and squaring with the [13/13] Pade
/// approximant (Higham 2005 coefficients and theta_13).
inline CMatrix expm(const CMatrix& a) {
  detail::require_square(a, "expm");
  detail::require_size(a.rows(), a.cols(), "expm");
  const Eigen::Index n = a.rows();
  static constexpr double b[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
  const CMatrix as = a / std::ldexp(1.0, s);

  const CMatrix id = CMatrix::Identity(n, n);
  const CMatrix a2 = as * as;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  CMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < s; ++k) r = r * r;
  if (!all_finite(r)) throw NumericalError("expm: non-finite result");
  return r;
}

/// Column stacking: |i><j| maps to basis vector j*d + i.
inline CVector vectorize(const CMatrix& x) {
  CVector v(x.size());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) v(j * x.rows() + i) = x(i, j);
  return v;
}

inline CMatrix devectorize(const CVector& v, int d) {
  if (d < 1 || v.size() != Eigen::Index(d) * d) {
    std::ostringstream os;
    os << "devectorize: length " << v.size() << " incompatible with d = " << d;
    throw ShapeError(os.str());
  }
  CMatrix x(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) x(i, j) = v(Eigen::Index(j) * d + i);
  return x;
}

/// Infers d from a perfect-square length.
inline CMatrix devectorize(const CVector& v) { return devectorize(v, detail::exact_sqrt(v.size(), "devectorize")); }

/// Superoperator matrix of X -> A X B, i.e. (B^T kron A).
inline CMatrix sandwich(const CMatrix& a, const CMatrix& b) { return kron(b.transpose(), a); }

inline double trace_norm_distance(const CMatrix& a, const CMatrix& b) {
  Eigen::JacobiSVD<CMatrix> svd(a - b);
  return svd.singularValues().sum();
}

/// Pauli matrices sigma_0..sigma_3.
inline CMatrix pauli(int mu) {
  using namespace std::complex_literals;
  CMatrix s(2, 2);
  switch (mu) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -1i, 1i, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw DomainError("pauli: index must be in {0,1,2,3}");
  }
  return s;
}

/// Normalized maximally entangled projector P^d_+ = (1/d) sum |ii><jj|.
inline CMatrix max_entangled_projector(int d) {
  if (d < 1) throw DomainError("max_entangled_projector: d must be positive");
  detail::require_size(Eigen::Index(d) * d, Eigen::Index(d) * d, "max_entangled_projector");
  CMatrix p = CMatrix::Zero(Eigen::Index(d) * d, Eigen::Index(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) p(Eigen::Index(i) * d + i, Eigen::Index(j) * d + j) = 1.0 / d;
  return p;
}

}  // namespace sgwl
