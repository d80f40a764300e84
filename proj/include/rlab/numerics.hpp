#pragma once

// Dense complex matrix kernel: exponential, Hermitian logarithm, SVD,
// Hermitian eigensolver and Haar sampling. Everything is templated on the
// real scalar so the projection route can run in extended precision.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "rlab/errors.hpp"

namespace rlab {

template <typename T>
using CMatrixT = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using RVectorT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using ComplexMatrix = CMatrixT<double>;
using RealVector = RVectorT<double>;
using Complex = std::complex<double>;
using Rng = std::mt19937_64;

/// Largest absolute entry; used for all residual reporting.
template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? decltype(m.cwiseAbs().maxCoeff()){0} : m.cwiseAbs().maxCoeff();
}

template <typename T>
void require_square(const CMatrixT<T>& x, const char* op) {
  if (x.rows() != x.cols())
    throw DimensionError(std::string(op) + ": expected a square matrix, got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
}

template <typename T>
void require_finite(const CMatrixT<T>& x, const char* op) {
  if (!x.allFinite()) throw DomainError(std::string(op) + ": non-finite entries");
}

namespace detail {

// Degree-13 diagonal Pade coefficients of exp.
inline constexpr long double kPade13[] = {
    64764752532480000.0L, 32382376266240000.0L, 7771770303897600.0L,
    1187353796428800.0L,  129060195264000.0L,   10559470521600.0L,
    670442572800.0L,      33522128640.0L,       1323241920.0L,
    40840800.0L,          960960.0L,            16380.0L,
    182.0L,               1.0L};

// Scaled 1-norm threshold for the degree-13 approximant.
inline constexpr double kTheta13 = 5.371920351148152;

}  // namespace detail

/// exp(X) by scaling and squaring with the [13/13] Pade approximant.
template <typename T>
CMatrixT<T> mat_exp(const CMatrixT<T>& x) {
  require_square(x, "mat_exp");
  require_finite(x, "mat_exp");
  using M = CMatrixT<T>;
  const Eigen::Index n = x.rows();
  const T norm1 = x.cwiseAbs().colwise().sum().maxCoeff();

  int squarings = 0;
  if (norm1 > T(detail::kTheta13))
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / T(detail::kTheta13))));
  const M a = x * std::pow(T(2), T(-squarings));

  auto b = [](int i) { return T(detail::kPade13[i]); };
  const M id = M::Identity(n, n);
  const M a2 = a * a;
  const M a4 = a2 * a2;
  const M a6 = a4 * a2;
  const M u_inner = a6 * (b(13) * a6 + b(11) * a4 + b(9) * a2) + b(7) * a6 + b(5) * a4 +
                    b(3) * a2 + b(1) * id;
  const M u = a * u_inner;
  const M v = a6 * (b(12) * a6 + b(10) * a4 + b(8) * a2) + b(6) * a6 + b(4) * a4 +
              b(2) * a2 + b(0) * id;

  M result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

template <typename T>
struct HermitianEigen {
  RVectorT<T> values;    // ascending
  CMatrixT<T> vectors;   // columns
};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
template <typename T>
HermitianEigen<T> eig_hermitian(const CMatrixT<T>& h, T tol = T(1e-12)) {
  require_square(h, "eig_hermitian");
  require_finite(h, "eig_hermitian");
  const T scale = std::max(T(1), max_abs(h));
  if (max_abs(CMatrixT<T>(h - h.adjoint())) > tol * scale)
    throw DomainError("eig_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrixT<T>> solver(h);
  if (solver.info() != Eigen::Success)
    throw FactorizationError("eig_hermitian: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Principal logarithm of a Hermitian positive-definite matrix.
template <typename T>
CMatrixT<T> mat_log_hpd(const CMatrixT<T>& p, T tol = T(1e-12)) {
  require_square(p, "mat_log_hpd");
  const T scale = std::max(T(1), max_abs(p));
  if (max_abs(CMatrixT<T>(p - p.adjoint())) > tol * scale)
    throw DomainError("mat_log_hpd: input is not Hermitian");
  const auto eig = eig_hermitian<T>(p, tol);
  if (eig.values.size() > 0 && !(eig.values(0) > T(0)))
    throw DomainError("mat_log_hpd: input is not positive definite");
  const RVectorT<T> logs = eig.values.array().log().matrix();
  return eig.vectors * logs.template cast<std::complex<T>>().asDiagonal() *
         eig.vectors.adjoint();
}

template <typename T>
struct SvdResult {
  CMatrixT<T> u;   // rows x rows, unitary
  RVectorT<T> s;   // descending, nonnegative
  CMatrixT<T> v;   // cols x cols, unitary
};

/// Full SVD B = U diag(s) V^dagger (s padded into a rectangular diagonal).
template <typename T>
SvdResult<T> svd(const CMatrixT<T>& b) {
  require_finite(b, "svd");
  Eigen::JacobiSVD<CMatrixT<T>, Eigen::ColPivHouseholderQRPreconditioner> solver(
      b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

/// Rebuilds U diag(s) V^dagger for an SvdResult of an r x c matrix.
template <typename T>
CMatrixT<T> svd_reconstruct(const SvdResult<T>& f) {
  CMatrixT<T> sigma = CMatrixT<T>::Zero(f.u.cols(), f.v.cols());
  for (Eigen::Index i = 0; i < f.s.size(); ++i) sigma(i, i) = f.s(i);
  return f.u * sigma * f.v.adjoint();
}

/// Haar-distributed k x k unitary: QR of a complex Ginibre matrix with the
/// phases of diag(R) pushed into Q.
inline ComplexMatrix haar_unitary(int k, Rng& rng) {
  if (k < 1) throw DomainError("haar_unitary: k must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix z(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) z(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(k, k);
  const ComplexMatrix& r = qr.matrixQR();
  for (int j = 0; j < k; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// Standard complex Gaussian vector.
inline Eigen::VectorXcd gaussian_vector(int k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd v(k);
  for (int i = 0; i < k; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v;
}

}  // namespace rlab
