#pragma once

// Regular decomposition g = g_+ exp(q) h_+ of SU(m,n) elements.

#include <cmath>
#include <string>

#include "rlab/lie.hpp"
#include "rlab/numerics.hpp"

namespace rlab {

struct GroupElement {
  Signature sig;
  ComplexMatrix mat;

  GroupElement(Signature s, ComplexMatrix g) : sig(s), mat(std::move(g)) {
    if (mat.rows() != sig.dim() || mat.cols() != sig.dim())
      throw DimensionError("GroupElement: matrix size does not match signature");
  }

  static GroupElement identity(Signature s) {
    return {s, ComplexMatrix::Identity(s.dim(), s.dim())};
  }

  /// max(|g^dag I g - I|, |det g - 1|) relative to |g|^2.
  double membership_residual() const {
    const ComplexMatrix i = sig.metric();
    const double scale = std::max(1.0, max_abs(mat) * max_abs(mat));
    return std::max(max_abs(ComplexMatrix(mat.adjoint() * i * mat - i)) / scale,
                    std::abs(mat.determinant() - 1.0) / scale);
  }

  /// Residual of membership in G_+ = S(U(m) x U(n)).
  double compact_residual() const {
    const int m = sig.m, n = sig.n;
    const double off = std::max(max_abs(mat.topRightCorner(m, n)), max_abs(mat.bottomLeftCorner(n, m)));
    const ComplexMatrix id = ComplexMatrix::Identity(sig.dim(), sig.dim());
    return std::max({off, max_abs(ComplexMatrix(mat.adjoint() * mat - id)),
                     std::abs(mat.determinant() - 1.0)});
  }
};

inline GroupElement exp_element(const AlgebraElement& x) {
  return {x.sig(), mat_exp<double>(x.mat())};
}

/// Ad_g X = g X g^{-1}.
inline AlgebraElement conjugate(const GroupElement& g, const AlgebraElement& x) {
  return {x.sig(), g.mat * x.mat() * g.mat.inverse()};
}

inline ComplexMatrix block_diag(const ComplexMatrix& u, const ComplexMatrix& v) {
  ComplexMatrix out = ComplexMatrix::Zero(u.rows() + v.rows(), u.cols() + v.cols());
  out.topLeftCorner(u.rows(), u.cols()) = u;
  out.bottomRightCorner(v.rows(), v.cols()) = v;
  return out;
}

/// Haar-random element of G_+ (det fixed to 1 through the first column).
inline GroupElement random_compact(Signature s, Rng& rng) {
  ComplexMatrix u = haar_unitary(s.m, rng);
  const ComplexMatrix v = haar_unitary(s.n, rng);
  const Complex det = u.determinant() * v.determinant();
  u.col(0) *= std::conj(det) / std::abs(det);
  return {s, block_diag(u, v)};
}

/// Random element diag(e^{i chi}, Gamma, e^{i chi}) of the centralizer group M.
inline GroupElement random_centralizer(Signature s, Rng& rng) {
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  ComplexMatrix g = ComplexMatrix::Zero(s.dim(), s.dim());
  Complex phase_total(1.0, 0.0);
  for (int k = 0; k < s.n; ++k) {
    const Complex e = std::polar(1.0, angle(rng));
    g(s.slot_a(k), s.slot_a(k)) = e;
    g(s.slot_b(k), s.slot_b(k)) = e;
    phase_total *= e * e;
  }
  if (s.middle() > 0) {
    ComplexMatrix gamma = haar_unitary(s.middle(), rng);
    const Complex det = gamma.determinant() * phase_total;
    gamma.col(0) *= std::conj(det) / std::abs(det);
    g.block(s.n, s.n, s.middle(), s.middle()) = gamma;
  } else {
    // m = n: fix det e^{2 i chi} = 1 through the first phase.
    const Complex fix = std::sqrt(std::conj(phase_total));
    g(0, 0) *= fix;
    g(s.m, s.m) *= fix;
  }
  return {s, g};
}

struct PolarFactors {
  AlgebraElement x;  // in G_-, Hermitian
  GroupElement k;    // in G_+
};

/// g = exp(X) k with X = log(g g^dag)/2.
inline PolarFactors polar_split(const GroupElement& g) {
  const ComplexMatrix ggd = g.mat * g.mat.adjoint();
  ComplexMatrix x;
  try {
    x = 0.5 * mat_log_hpd<double>(0.5 * (ggd + ggd.adjoint()).eval(), 1e-10);
  } catch (const DomainError& e) {
    throw FactorizationError(std::string("polar_split: g g^dag is not positive definite (") +
                             e.what() + ")");
  }
  const ComplexMatrix k = mat_exp<double>(ComplexMatrix(-x)) * g.mat;
  return {{g.sig, std::move(x)}, {g.sig, k}};
}

template <typename T>
struct CartanFrame {
  RVectorT<T> q;     // descending, q^k = log sigma_k
  CMatrixT<T> top;   // dim x n, left singular vectors for sigma = e^{q^k}
};

/// Leading n singular triplets of g. The vector for sigma = e^{q^k} equals
/// g_+ (e_{a_k} + e_{b_k})/sqrt2, so it carries column k of both blocks of g_+.
template <typename T>
CartanFrame<T> cartan_frame(const CMatrixT<T>& g, int n) {
  require_finite(g, "cartan_frame");
  Eigen::JacobiSVD<CMatrixT<T>, Eigen::ColPivHouseholderQRPreconditioner> solver(
      g, Eigen::ComputeFullU);
  CartanFrame<T> f;
  f.q = solver.singularValues().head(n).array().log().matrix();
  f.top = solver.matrixU().leftCols(n);
  return f;
}

/// p^k = <g_+^{-1} J g_+, embed(e_k)>/2 from the Cartan frame of g.
template <typename T>
RVectorT<T> frame_momenta(const CartanFrame<T>& f, const CMatrixT<T>& j, int m) {
  const Eigen::Index n = f.top.cols();
  RVectorT<T> p(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1> w = f.top.col(k);
    Eigen::Matrix<std::complex<T>, Eigen::Dynamic, 1> iw = w;
    iw.tail(iw.size() - m) *= T(-1);
    p(k) = T(0.5) * (w.dot(j * w) - iw.dot(j * iw)).real();
  }
  return p;
}

struct KAKFactors {
  GroupElement g_plus;
  CartanVector q;
  GroupElement h_plus;
};

/// Unitary factor of the polar decomposition, used to re-orthonormalize.
inline ComplexMatrix nearest_unitary(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> s(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return s.matrixU() * s.matrixV().adjoint();
}

/// g = g_+ exp(embed(q)) h_+ with q in the closed chamber q^1 >= ... >= q^n >= 0.
/// Throws RegularityError when q is within eps_reg of a wall.
inline KAKFactors kak_decompose(const GroupElement& g, const RootSystemData& rsd,
                                double eps_reg = kDefaultRegularity) {
  const Signature s = g.sig;
  const int m = s.m, n = s.n;
  const auto frame = cartan_frame<double>(g.mat, n);
  const CartanVector q(s, frame.q);
  require_regular(q.q, rsd, eps_reg);

  const double r2 = std::sqrt(2.0);
  ComplexMatrix u = ComplexMatrix::Zero(m, m);
  ComplexMatrix v(n, n);
  for (int k = 0; k < n; ++k) {
    u.col(k) = r2 * frame.top.col(k).head(m);
    v.col(k) = r2 * frame.top.col(k).tail(n);
  }
  if (m > n) {
    // Complete U on the orthogonal complement; any completion differs by an
    // element of U(m-n), which lies in M.
    ComplexMatrix seed(m, m);
    seed << u.leftCols(n), ComplexMatrix::Identity(m, m).leftCols(m - n);
    Eigen::HouseholderQR<ComplexMatrix> qr(seed);
    const ComplexMatrix qf = qr.householderQ() * ComplexMatrix::Identity(m, m);
    u.rightCols(m - n) = qf.rightCols(m - n);
  }
  u = nearest_unitary(u);
  v = nearest_unitary(v);

  const Complex det = u.determinant() * v.determinant();
  const double phi = std::arg(det);
  if (m > n) {
    u.col(m - 1) *= std::polar(1.0, -phi);
  } else {
    const Complex half = std::polar(1.0, -0.5 * phi);
    u.col(0) *= half;
    v.col(0) *= half;
  }
  GroupElement g_plus(s, block_diag(u, v));
  const ComplexMatrix e_minus_q = mat_exp<double>(ComplexMatrix(-embed_cartan(q).mat()));
  GroupElement h_plus(s, e_minus_q * g_plus.mat.adjoint() * g.mat);
  return {std::move(g_plus), q, std::move(h_plus)};
}

inline GroupElement kak_compose(const KAKFactors& f) {
  return {f.q.sig, f.g_plus.mat * mat_exp<double>(embed_cartan(f.q).mat()) * f.h_plus.mat};
}

}  // namespace rlab
