// Copyright 2026 The qdist Authors
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

// linalg.hpp: dense complex matrix substrate.
//
// Conventions used throughout qdist:
//   * vectorization is row-major: vec_row([[a,b],[c,d]]) = (a,b,c,d);
//   * under that convention (B (x) 1 - 1 (x) B^T) vec_row(X) = vec_row(BX - XB);
//   * the doubled operator of A is A (x) 1 + 1 (x) A.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qdist/errors.hpp"

// Eigen 3.4.0's BDCSVD with AVX-512 packets returns finite but wrong singular
// values on structured input (the Pauli stack in the tests loses two digits).
// Build without AVX-512 (-mno-avx512f) or with a newer Eigen.
#if defined(EIGEN_VECTORIZE_AVX512) && !EIGEN_VERSION_AT_LEAST(3, 4, 1) && !defined(QDIST_ALLOW_AVX512)
#error "qdist: Eigen 3.4.0 BDCSVD is inaccurate with AVX-512; compile with -mno-avx512f"
#endif

namespace qdist {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Numerical tolerances shared by every module.
///
/// The rank cutoff is relative (sigma_i > rank_rel_tol * sigma_max) so that
/// verdicts do not change when every generator is rescaled.
struct ToleranceConfig {
  double hermiticity_tol = 1e-10;
  double trace_tol = 1e-10;
  double rank_rel_tol = 1e-9;
  double commute_tol = 1e-9;
  double degeneracy_tol = 1e-9;

  void validate() const {
    for (double t : {hermiticity_tol, trace_tol, rank_rel_tol, commute_tol, degeneracy_tol}) {
      if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InputError("tolerances must be finite and non-negative");
      }
    }
    if (rank_rel_tol >= 1.0) {
      throw InputError("rank_rel_tol must be < 1");
    }
  }
};

// ----------------------------------------------------------------------------
// Basic checks and constructors

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const Complex z = m.data()[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
  if (m.size() == 0) {
    throw InputError(std::string(what) + ": empty matrix");
  }
  if (!all_finite(m)) {
    throw InputError(std::string(what) + ": non-finite entry");
  }
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  require_finite(m, what);
  if (m.rows() != m.cols()) {
    throw InputError(std::string(what) + ": matrix must be square");
  }
}

inline ComplexMatrix identity(std::size_t n) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Largest entry modulus.
inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// ----------------------------------------------------------------------------
// Norms

inline RealVector singular_values(const ComplexMatrix& m) {
  require_finite(m, "singular_values");
  {
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    if (svd.info() == Eigen::Success && svd.singularValues().allFinite()) return svd.singularValues();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  if (svd.info() != Eigen::Success || !svd.singularValues().allFinite()) {
    throw NumericalError("singular_values: SVD did not converge");
  }
  return svd.singularValues();
}

/// Spectral norm (largest singular value).
inline double operator_norm(const ComplexMatrix& m) {
  const RealVector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(0);
}

/// Schatten-1 norm (sum of singular values).
inline double trace_norm(const ComplexMatrix& m) {
  return singular_values(m).sum();
}

/// Entrywise L_{1,1} norm.
inline double l11_norm(const ComplexMatrix& m) {
  require_finite(m, "l11_norm");
  return m.cwiseAbs().sum();
}

// ----------------------------------------------------------------------------
// Algebraic constructions

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw InputError("commutator: operands must be square with equal dimension");
  }
  return a * b - b * a;
}

/// A (x) 1 + 1 (x) A on the two-copy space.
inline ComplexMatrix tensor_double(const ComplexMatrix& a) {
  require_square(a, "tensor_double");
  const auto id = identity(static_cast<std::size_t>(a.rows()));
  return kron(a, id) + kron(id, a);
}

/// Matrix of X -> BX - XB acting on row-vectorized X: B (x) 1 - 1 (x) B^T.
inline ComplexMatrix adjoint_action_matrix(const ComplexMatrix& b) {
  require_square(b, "adjoint_action_matrix");
  const auto id = identity(static_cast<std::size_t>(b.rows()));
  return kron(b, id) - kron(id, b.transpose());
}

inline ComplexVector vec_row(const ComplexMatrix& m) {
  ComplexVector v(m.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(k++) = m(i, j);
  }
  return v;
}

inline ComplexMatrix devec_row(const ComplexVector& v, std::size_t rows, std::size_t cols) {
  if (static_cast<std::size_t>(v.size()) != rows * cols) {
    throw InputError("devec_row: length " + std::to_string(v.size()) + " != " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = v(k++);
  }
  return m;
}

// ----------------------------------------------------------------------------
// Rank and nullity

struct RankResult {
  std::size_t rank = 0;
  std::size_t nullity = 0;
  /// Orthonormal columns spanning the numerical null space.
  ComplexMatrix null_basis;
  /// Descending.
  RealVector singular_values;
};

/// Singular values (descending, padded with zeros to m.cols()) and the full
/// right singular basis.
struct RightSvd {
  RealVector values;
  ComplexMatrix v;
};

/// Tall inputs are first compressed to their square triangular QR factor, which
/// has the same singular values and right singular vectors. With
/// want_vectors = false only the values are computed and `v` is empty.
inline RightSvd right_svd(const ComplexMatrix& m, bool want_vectors = true) {
  require_finite(m, "right_svd");
  const Eigen::Index n = m.cols();
  ComplexMatrix work;
  if (m.rows() > n) {
    Eigen::HouseholderQR<ComplexMatrix> qr(m);
    work = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    work = m;
  }

  // Eigen 3.4.0's divide-and-conquer SVD can return non-finite singular
  // vectors on strongly deflated input (exact zeros, repeated values) while
  // still reporting success; the one-sided Jacobi SVD is the fallback.
  RightSvd out;
  out.values = RealVector::Zero(n);
  const unsigned int opts = want_vectors ? static_cast<unsigned int>(Eigen::ComputeFullV) : 0u;
  {
    Eigen::BDCSVD<ComplexMatrix> svd(work, opts);
    if (svd.info() == Eigen::Success && svd.singularValues().allFinite() &&
        (!want_vectors || svd.matrixV().allFinite())) {
      out.values.head(svd.singularValues().size()) = svd.singularValues();
      if (want_vectors) out.v = svd.matrixV();
      return out;
    }
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(work, opts);
  if (svd.info() != Eigen::Success || !svd.singularValues().allFinite() ||
      (want_vectors && !svd.matrixV().allFinite())) {
    throw NumericalError("SVD did not converge on a " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " matrix (max |entry| = " + std::to_string(max_abs(m)) + ")");
  }
  out.values.head(svd.singularValues().size()) = svd.singularValues();
  if (want_vectors) out.v = svd.matrixV();
  return out;
}

/// Numerical rank with the relative cutoff sigma_i > rank_rel_tol * sigma_max.
inline RankResult rank_and_nullity(const ComplexMatrix& m, const ToleranceConfig& tol = {}) {
  const RightSvd svd = right_svd(m);
  RankResult out;
  out.singular_values = svd.values;
  const double smax = svd.values.size() > 0 ? svd.values(0) : 0.0;
  const double cutoff = tol.rank_rel_tol * smax;
  for (Eigen::Index i = 0; i < svd.values.size(); ++i) {
    if (smax > 0.0 && svd.values(i) > cutoff) ++out.rank;
  }
  out.nullity = static_cast<std::size_t>(m.cols()) - out.rank;
  out.null_basis = svd.v.rightCols(static_cast<Eigen::Index>(out.nullity));
  return out;
}

// ----------------------------------------------------------------------------
// Hermitian operators

/// Dense self-adjoint operator. Construction checks hermiticity within
/// ToleranceConfig::hermiticity_tol and then stores the exact Hermitian part.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  explicit HermitianOperator(const ComplexMatrix& m, const ToleranceConfig& tol = {}) {
    require_square(m, "HermitianOperator");
    const double dev = max_abs(m - m.adjoint());
    if (dev > tol.hermiticity_tol) {
      throw InputError("HermitianOperator: matrix is not self-adjoint (max |M - M^dagger| = " +
                       std::to_string(dev) + ")");
    }
    matrix_ = 0.5 * (m + m.adjoint());
  }

  static HermitianOperator zero(std::size_t d) {
    return HermitianOperator(ComplexMatrix::Zero(static_cast<Eigen::Index>(d),
                                                 static_cast<Eigen::Index>(d)));
  }

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

  double trace() const { return matrix_.trace().real(); }

  bool is_traceless(const ToleranceConfig& tol = {}) const {
    return std::abs(trace()) <= tol.trace_tol;
  }

  /// Copy with tr/d * 1 subtracted.
  HermitianOperator traceless() const {
    HermitianOperator out = *this;
    const double shift = trace() / static_cast<double>(dim());
    out.matrix_.diagonal().array() -= Complex(shift, 0.0);
    return out;
  }

  double norm() const { return operator_norm(matrix_); }

  HermitianOperator operator+(const HermitianOperator& o) const {
    check_same(o);
    return HermitianOperator(matrix_ + o.matrix_);
  }
  HermitianOperator operator-(const HermitianOperator& o) const {
    check_same(o);
    return HermitianOperator(matrix_ - o.matrix_);
  }
  HermitianOperator operator-() const { return HermitianOperator(-matrix_); }
  HermitianOperator scaled(double s) const { return HermitianOperator(s * matrix_); }

 private:
  void check_same(const HermitianOperator& o) const {
    if (o.dim() != dim()) throw InputError("HermitianOperator: dimension mismatch");
  }

  ComplexMatrix matrix_;
};

struct Eigensystem {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // columns
};

/// Eigenvalues ascending; ties keep the solver's order.
inline Eigensystem hermitian_eigensystem(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eigensystem: eigensolver did not converge");
  }
  const auto n = static_cast<std::size_t>(h.dim());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const RealVector& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ev(static_cast<Eigen::Index>(a)) <
                                                              ev(static_cast<Eigen::Index>(b)); });
  Eigensystem out;
  out.values.resize(static_cast<Eigen::Index>(n));
  out.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto src = static_cast<Eigen::Index>(order[k]);
    out.values(static_cast<Eigen::Index>(k)) = ev(src);
    out.vectors.col(static_cast<Eigen::Index>(k)) = solver.eigenvectors().col(src);
  }
  return out;
}

/// exp(i * t * H) via the eigendecomposition; unitary to machine precision.
inline ComplexMatrix expi(const HermitianOperator& h, double t) {
  const Eigensystem es = hermitian_eigensystem(h);
  ComplexVector phases(es.values.size());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    phases(k) = std::exp(kI * (t * es.values(k)));
  }
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

// ----------------------------------------------------------------------------
// Random test data

inline HermitianOperator random_hermitian(std::size_t d, std::uint64_t seed, bool traceless = false) {
  if (d == 0) throw InputError("random_hermitian: d must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  }
  HermitianOperator h(0.5 * (a + a.adjoint()));
  return traceless ? h.traceless() : h;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
inline ComplexMatrix haar_unitary(std::size_t d, std::uint64_t seed) {
  if (d == 0) throw InputError("haar_unitary: d must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, M_SQRT1_2);
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix z(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex rk = r(k, k);
    const double mag = std::abs(rk);
    q.col(k) *= mag > 0.0 ? rk / mag : Complex(1.0, 0.0);
  }
  return q;
}

/// Random density matrix: W W^dagger / tr, W Ginibre.
inline ComplexMatrix random_density_matrix(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) w(i, j) = Complex(normal(rng), normal(rng));
  }
  ComplexMatrix rho = w * w.adjoint();
  return rho / rho.trace();
}

// ----------------------------------------------------------------------------
// Pauli helpers

namespace pauli {

inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// `op` acting on qubit `site` of an n-qubit register (site 0 is the most
/// significant tensor factor).
inline ComplexMatrix on_site(const ComplexMatrix& op, std::size_t site, std::size_t n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) {
    out = kron(out, k == site ? op : identity(2));
  }
  return out;
}

/// Two-qubit SWAP.
inline ComplexMatrix swap() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1.0;
  m(1, 2) = m(2, 1) = 1.0;
  return m;
}

}  // namespace pauli

}  // namespace qdist
