#pragma once

// su(m,n) structure: Cartan involution, the A + A-perp + M + M-perp
// decomposition, restricted roots with an explicit root-vector basis, the
// central character, and functions of ad_q acting on root spaces.
//
// Index layout of an (m+n)x(m+n) matrix: rows/cols 0..n-1 are the "a" slots
// paired by q with the "b" slots m..m+n-1; n..m-1 are the middle slots.

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/numerics.hpp"

namespace rlab {

/// Default minimal |alpha(q)| accepted as regular.
inline constexpr double kDefaultRegularity = 1e-6;

struct Signature {
  int m = 1;
  int n = 1;

  Signature() = default;
  Signature(int m_, int n_) : m(m_), n(n_) {
    if (n < 1 || m < n)
      throw DomainError("signature requires m >= n >= 1, got (" + std::to_string(m) + "," +
                        std::to_string(n) + ")");
  }

  int dim() const { return m + n; }
  int middle() const { return m - n; }
  int slot_a(int k) const { return k; }
  int slot_b(int k) const { return m + k; }
  int slot_c(int d) const { return n + d; }

  /// I_{m,n} = diag(1_m, -1_n).
  ComplexMatrix metric() const {
    ComplexMatrix i = ComplexMatrix::Identity(dim(), dim());
    i.bottomRightCorner(n, n) *= -1.0;
    return i;
  }

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// A matrix of su(m,n). Arithmetic does not re-validate membership;
/// membership_residual() reports it on demand.
class AlgebraElement {
public:
  AlgebraElement() = default;
  AlgebraElement(Signature sig, ComplexMatrix mat) : sig_(sig), mat_(std::move(mat)) {
    if (mat_.rows() != sig_.dim() || mat_.cols() != sig_.dim())
      throw DimensionError("AlgebraElement: matrix size does not match signature");
  }

  static AlgebraElement zero(Signature sig) {
    return {sig, ComplexMatrix::Zero(sig.dim(), sig.dim())};
  }

  /// Validating factory: throws DomainError unless X^dag I + I X = 0, tr X = 0.
  static AlgebraElement checked(Signature sig, ComplexMatrix mat, double tol = 1e-12) {
    AlgebraElement x(sig, std::move(mat));
    if (x.membership_residual() > tol * std::max(1.0, max_abs(x.mat_)))
      throw DomainError("matrix is not in su(m,n)");
    return x;
  }

  const Signature& sig() const { return sig_; }
  const ComplexMatrix& mat() const { return mat_; }

  double membership_residual() const {
    const ComplexMatrix i = sig_.metric();
    return std::max(max_abs(ComplexMatrix(mat_.adjoint() * i + i * mat_)),
                    std::abs(mat_.trace()));
  }

  AlgebraElement& operator+=(const AlgebraElement& o) { mat_ += o.mat_; return *this; }
  AlgebraElement& operator-=(const AlgebraElement& o) { mat_ -= o.mat_; return *this; }
  AlgebraElement& operator*=(double s) { mat_ *= s; return *this; }

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(double s, AlgebraElement a) { return a *= s; }
  friend AlgebraElement operator*(AlgebraElement a, double s) { return a *= s; }
  friend AlgebraElement operator-(AlgebraElement a) { return a *= -1.0; }

private:
  Signature sig_;
  ComplexMatrix mat_;
};

inline AlgebraElement commutator(const AlgebraElement& x, const AlgebraElement& y) {
  return {x.sig(), x.mat() * y.mat() - y.mat() * x.mat()};
}

/// <X,Y> = tr(XY) without forming the product.
inline Complex trace_product(const ComplexMatrix& x, const ComplexMatrix& y) {
  return x.cwiseProduct(y.transpose()).sum();
}

/// The invariant form <X,Y> = tr(XY); real on su(m,n).
inline double trace_form(const AlgebraElement& x, const AlgebraElement& y) {
  return trace_product(x.mat(), y.mat()).real();
}

/// theta(X) = -X^dagger.
inline AlgebraElement cartan_involution(const AlgebraElement& x) {
  return {x.sig(), -x.mat().adjoint()};
}

struct PlusMinus {
  AlgebraElement plus;   // theta-fixed, compact
  AlgebraElement minus;  // theta-anti-fixed, noncompact
};

inline PlusMinus split_pm(const AlgebraElement& x) {
  const ComplexMatrix th = -x.mat().adjoint();
  return {{x.sig(), 0.5 * (x.mat() + th)}, {x.sig(), 0.5 * (x.mat() - th)}};
}

/// Element q of the maximal abelian subspace A, as coordinates q^1..q^n.
struct CartanVector {
  Signature sig;
  RealVector q;

  CartanVector(Signature s, RealVector v) : sig(s), q(std::move(v)) {
    if (q.size() != sig.n) throw DimensionError("CartanVector: expected n coordinates");
  }
};

/// Q = diag(q) in the two corner blocks coupling slot a_k with slot b_k.
inline AlgebraElement embed_cartan(const CartanVector& c) {
  const Signature& s = c.sig;
  ComplexMatrix x = ComplexMatrix::Zero(s.dim(), s.dim());
  for (int k = 0; k < s.n; ++k) {
    x(s.slot_a(k), s.slot_b(k)) = c.q(k);
    x(s.slot_b(k), s.slot_a(k)) = c.q(k);
  }
  return {s, std::move(x)};
}

/// C_{m,n} = diag(i n 1_m, -i m 1_n), spanning the characters of G_+.
inline AlgebraElement central_character(Signature s) {
  ComplexMatrix c = ComplexMatrix::Zero(s.dim(), s.dim());
  for (int i = 0; i < s.m; ++i) c(i, i) = Complex(0, s.n);
  for (int i = s.m; i < s.dim(); ++i) c(i, i) = Complex(0, -s.m);
  return {s, std::move(c)};
}

enum class RootKind { Difference, Sum, Double, Single };  // e_j-e_k, e_j+e_k, 2e_k, e_k

struct RestrictedRoot {
  RootKind kind;
  int j = 0;  // first index (0-based); the only index for Double/Single
  int k = 0;  // second index for Difference/Sum
  int multiplicity = 0;

  double value(const RealVector& q) const {
    switch (kind) {
      case RootKind::Difference: return q(j) - q(k);
      case RootKind::Sum: return q(j) + q(k);
      case RootKind::Double: return 2.0 * q(j);
      case RootKind::Single: return q(j);
    }
    return 0.0;
  }

  /// Human-readable name with 1-based indices, e.g. "e1-e2", "2e1", "e2".
  std::string name() const {
    std::ostringstream os;
    switch (kind) {
      case RootKind::Difference: os << 'e' << j + 1 << "-e" << k + 1; break;
      case RootKind::Sum: os << 'e' << j + 1 << "+e" << k + 1; break;
      case RootKind::Double: os << "2e" << j + 1; break;
      case RootKind::Single: os << 'e' << j + 1; break;
    }
    return os.str();
  }

  /// alpha(q) written in coordinates, e.g. "q1 - q2".
  std::string formula() const {
    std::ostringstream os;
    switch (kind) {
      case RootKind::Difference: os << 'q' << j + 1 << " - q" << k + 1; break;
      case RootKind::Sum: os << 'q' << j + 1 << " + q" << k + 1; break;
      case RootKind::Double: os << "2 q" << j + 1; break;
      case RootKind::Single: os << 'q' << j + 1; break;
    }
    return os.str();
  }
};

enum class Part { Real, Imag };

/// One pair (E^{+,a}_alpha, E^{-,a}_alpha) of the root-vector basis.
///   <E+,E+> = -1, <E-,E-> = +1, [q,E+] = alpha(q) E-, [q,E-] = alpha(q) E+.
struct RootVector {
  int root = 0;   // index into RootSystemData::roots
  Part part = Part::Real;
  int slot = 0;   // middle slot d for e_k roots, else 0
  ComplexMatrix plus;
  ComplexMatrix minus;
};

struct RootSystemData {
  Signature sig;
  std::vector<RestrictedRoot> roots;  // positive roots, fixed order
  std::vector<RootVector> vectors;    // grouped by root, sum of multiplicities
  std::vector<ComplexMatrix> m_basis; // <V,V> = -1, mutually orthogonal
  std::vector<ComplexMatrix> a_basis; // embed(e_k); <.,.> = 2

  int root_index(RootKind kind, int j, int k = 0) const {
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const auto& r = roots[i];
      if (r.kind != kind || r.j != j) continue;
      if ((kind == RootKind::Difference || kind == RootKind::Sum) && r.k != k) continue;
      return static_cast<int>(i);
    }
    throw DomainError("root not present in this root system");
  }

  /// The basis vector E^{+,part,slot}_root.
  const RootVector& vector(RootKind kind, int j, int k, Part part, int slot = 0) const {
    const int r = root_index(kind, j, k);
    for (const auto& v : vectors)
      if (v.root == r && v.part == part && v.slot == slot) return v;
    throw DomainError("root vector not present in this root system");
  }

  AlgebraElement plus(RootKind kind, int j, int k, Part part, int slot = 0) const {
    return {sig, vector(kind, j, k, part, slot).plus};
  }
  AlgebraElement minus(RootKind kind, int j, int k, Part part, int slot = 0) const {
    return {sig, vector(kind, j, k, part, slot).minus};
  }

  int multiplicity_sum() const {
    int s = 0;
    for (const auto& r : roots) s += r.multiplicity;
    return s;
  }
};

namespace detail {

// Orthonormal basis of M = {diag(i chi, gamma, i chi) : tr = 0} with respect
// to the negative definite form -tr(XY).
inline std::vector<ComplexMatrix> centralizer_basis_impl(Signature s) {
  const int dim = s.dim();
  const int r = s.middle();
  std::vector<ComplexMatrix> span;
  for (int k = 0; k < s.n; ++k) {
    ComplexMatrix x = ComplexMatrix::Zero(dim, dim);
    x(s.slot_a(k), s.slot_a(k)) = Complex(0, 1);
    x(s.slot_b(k), s.slot_b(k)) = Complex(0, 1);
    span.push_back(x);
  }
  for (int d = 0; d < r; ++d) {
    for (int e = 0; e < r; ++e) {
      ComplexMatrix x = ComplexMatrix::Zero(dim, dim);
      const int cd = s.slot_c(d), ce = s.slot_c(e);
      if (d == e) {
        x(cd, cd) = Complex(0, 1);
      } else if (d < e) {
        x(cd, ce) = 1.0;
        x(ce, cd) = -1.0;
      } else {
        x(cd, ce) = Complex(0, 1);
        x(ce, cd) = Complex(0, 1);
      }
      span.push_back(x);
    }
  }
  // Seed Gram-Schmidt with the trace direction i*1 and drop it afterwards,
  // leaving an orthonormal basis of the traceless part.
  std::vector<ComplexMatrix> basis{ComplexMatrix::Identity(dim, dim) *
                                   Complex(0, 1.0 / std::sqrt(double(dim)))};
  for (ComplexMatrix x : span) {
    for (const auto& b : basis) x += trace_product(x, b).real() * b;
    const double norm2 = -trace_product(x, x).real();
    if (norm2 > 1e-20) basis.push_back(x / std::sqrt(norm2));
  }
  basis.erase(basis.begin());
  return basis;
}

inline ComplexMatrix probe_cartan(Signature s) {
  RealVector q(s.n);
  for (int k = 0; k < s.n; ++k) q(k) = s.n - k;
  return embed_cartan(CartanVector(s, q)).mat();
}

}  // namespace detail

/// Orthonormal (<V,V> = -1) basis of the centralizer algebra M of A in G_+.
inline std::vector<AlgebraElement> centralizer_basis(Signature s) {
  std::vector<AlgebraElement> out;
  for (auto& m : detail::centralizer_basis_impl(s)) out.emplace_back(s, std::move(m));
  return out;
}

/// Restricted roots, multiplicities and the explicit root-vector basis.
/// Imaginary-labelled E+ vectors carry +i in the upper block, which makes the
/// M-perp coefficients of C_{m,n} positive.
inline RootSystemData build_root_system(Signature s) {
  RootSystemData rsd;
  rsd.sig = s;
  const int dim = s.dim();
  const ComplexMatrix probe = detail::probe_cartan(s);
  RealVector probe_q(s.n);
  for (int k = 0; k < s.n; ++k) probe_q(k) = s.n - k;

  auto add = [&](RestrictedRoot root, std::vector<std::tuple<Part, int, ComplexMatrix>> plus) {
    const int idx = static_cast<int>(rsd.roots.size());
    rsd.roots.push_back(root);
    const double alpha = root.value(probe_q);
    for (auto& [part, slot, e] : plus) {
      ComplexMatrix minus = (probe * e - e * probe) / alpha;
      rsd.vectors.push_back({idx, part, slot, std::move(e), std::move(minus)});
    }
  };
  auto zero = [&] { return ComplexMatrix::Zero(dim, dim).eval(); };
  const double half = 0.5;
  const double rs2 = 1.0 / std::sqrt(2.0);
  const Complex i1(0, 1);

  for (int j = 0; j < s.n; ++j) {
    for (int k = j + 1; k < s.n; ++k) {
      std::vector<std::tuple<Part, int, ComplexMatrix>> v;
      for (Part part : {Part::Real, Part::Imag}) {
        const Complex z = part == Part::Real ? Complex(half) : half * i1;
        ComplexMatrix e = zero();
        e(s.slot_a(j), s.slot_a(k)) = z;
        e(s.slot_a(k), s.slot_a(j)) = -std::conj(z);
        e(s.slot_b(j), s.slot_b(k)) = z;
        e(s.slot_b(k), s.slot_b(j)) = -std::conj(z);
        v.emplace_back(part, 0, std::move(e));
      }
      add({RootKind::Difference, j, k, 2}, std::move(v));
    }
  }
  for (int j = 0; j < s.n; ++j) {
    for (int k = j + 1; k < s.n; ++k) {
      std::vector<std::tuple<Part, int, ComplexMatrix>> v;
      for (Part part : {Part::Real, Part::Imag}) {
        const Complex z = part == Part::Real ? Complex(half) : half * i1;
        ComplexMatrix e = zero();
        e(s.slot_a(j), s.slot_a(k)) = z;
        e(s.slot_a(k), s.slot_a(j)) = -std::conj(z);
        e(s.slot_b(j), s.slot_b(k)) = -z;
        e(s.slot_b(k), s.slot_b(j)) = std::conj(z);
        v.emplace_back(part, 0, std::move(e));
      }
      add({RootKind::Sum, j, k, 2}, std::move(v));
    }
  }
  for (int k = 0; k < s.n; ++k) {
    ComplexMatrix e = zero();
    e(s.slot_a(k), s.slot_a(k)) = rs2 * i1;
    e(s.slot_b(k), s.slot_b(k)) = -rs2 * i1;
    std::vector<std::tuple<Part, int, ComplexMatrix>> v;
    v.emplace_back(Part::Imag, 0, std::move(e));
    add({RootKind::Double, k, 0, 1}, std::move(v));
  }
  if (s.m > s.n) {
    for (int k = 0; k < s.n; ++k) {
      std::vector<std::tuple<Part, int, ComplexMatrix>> v;
      for (int d = 0; d < s.middle(); ++d) {
        ComplexMatrix re = zero();
        re(s.slot_a(k), s.slot_c(d)) = rs2;
        re(s.slot_c(d), s.slot_a(k)) = -rs2;
        v.emplace_back(Part::Real, d, std::move(re));
        ComplexMatrix im = zero();
        im(s.slot_a(k), s.slot_c(d)) = rs2 * i1;
        im(s.slot_c(d), s.slot_a(k)) = rs2 * i1;
        v.emplace_back(Part::Imag, d, std::move(im));
      }
      add({RootKind::Single, k, 0, 2 * s.middle()}, std::move(v));
    }
  }

  rsd.m_basis = detail::centralizer_basis_impl(s);
  for (int k = 0; k < s.n; ++k) {
    RealVector e = RealVector::Zero(s.n);
    e(k) = 1.0;
    rsd.a_basis.push_back(embed_cartan(CartanVector(s, e)).mat());
  }
  return rsd;
}

/// Coordinates of X_A in the e_k basis: X_A = embed(coefficients).
inline RealVector cartan_coefficients(const ComplexMatrix& x, const RootSystemData& rsd) {
  RealVector c(rsd.sig.n);
  for (int k = 0; k < rsd.sig.n; ++k) c(k) = 0.5 * trace_product(x, rsd.a_basis[k]).real();
  return c;
}

/// Coefficients of X on the E+ vectors (M-perp part), in rsd.vectors order.
inline RealVector plus_coefficients(const ComplexMatrix& x, const RootSystemData& rsd) {
  RealVector c(rsd.vectors.size());
  for (std::size_t i = 0; i < rsd.vectors.size(); ++i)
    c(i) = -trace_product(x, rsd.vectors[i].plus).real();
  return c;
}

/// Coefficients of X on the E- vectors (A-perp part).
inline RealVector minus_coefficients(const ComplexMatrix& x, const RootSystemData& rsd) {
  RealVector c(rsd.vectors.size());
  for (std::size_t i = 0; i < rsd.vectors.size(); ++i)
    c(i) = trace_product(x, rsd.vectors[i].minus).real();
  return c;
}

inline RealVector centralizer_coefficients(const ComplexMatrix& x, const RootSystemData& rsd) {
  RealVector c(rsd.m_basis.size());
  for (std::size_t i = 0; i < rsd.m_basis.size(); ++i)
    c(i) = -trace_product(x, rsd.m_basis[i]).real();
  return c;
}

inline ComplexMatrix combine_plus(const RealVector& c, const RootSystemData& rsd) {
  ComplexMatrix x = ComplexMatrix::Zero(rsd.sig.dim(), rsd.sig.dim());
  for (std::size_t i = 0; i < rsd.vectors.size(); ++i) x += c(i) * rsd.vectors[i].plus;
  return x;
}

inline ComplexMatrix combine_minus(const RealVector& c, const RootSystemData& rsd) {
  ComplexMatrix x = ComplexMatrix::Zero(rsd.sig.dim(), rsd.sig.dim());
  for (std::size_t i = 0; i < rsd.vectors.size(); ++i) x += c(i) * rsd.vectors[i].minus;
  return x;
}

inline ComplexMatrix combine_centralizer(const RealVector& c, const RootSystemData& rsd) {
  ComplexMatrix x = ComplexMatrix::Zero(rsd.sig.dim(), rsd.sig.dim());
  for (std::size_t i = 0; i < rsd.m_basis.size(); ++i) x += c(i) * rsd.m_basis[i];
  return x;
}

struct FourParts {
  AlgebraElement a;       // X_A
  AlgebraElement a_perp;  // X_{A-perp}
  AlgebraElement m;       // X_M
  AlgebraElement m_perp;  // X_{M-perp}
};

/// X = X_A + X_{A-perp} + X_M + X_{M-perp}.
inline FourParts split_four(const AlgebraElement& x, const RootSystemData& rsd) {
  const Signature& s = rsd.sig;
  const ComplexMatrix& mx = x.mat();
  return {embed_cartan(CartanVector(s, cartan_coefficients(mx, rsd))),
          {s, combine_minus(minus_coefficients(mx, rsd), rsd)},
          {s, combine_centralizer(centralizer_coefficients(mx, rsd), rsd)},
          {s, combine_plus(plus_coefficients(mx, rsd), rsd)}};
}

inline AlgebraElement m_part(const AlgebraElement& x, const RootSystemData& rsd) {
  return {rsd.sig, combine_centralizer(centralizer_coefficients(x.mat(), rsd), rsd)};
}

inline AlgebraElement m_perp_part(const AlgebraElement& x, const RootSystemData& rsd) {
  return {rsd.sig, combine_plus(plus_coefficients(x.mat(), rsd), rsd)};
}

struct RegularityReport {
  bool regular = false;
  double margin = 0.0;   // min_alpha |alpha(q)|
  std::string root;      // root attaining the minimum
};

/// q is regular iff |alpha(q)| >= eps for every restricted root.
inline RegularityReport is_regular(const RealVector& q, const RootSystemData& rsd,
                                   double eps = kDefaultRegularity) {
  RegularityReport rep{true, std::numeric_limits<double>::infinity(), {}};
  for (const auto& r : rsd.roots) {
    const double v = std::abs(r.value(q));
    if (v < rep.margin) {
      rep.margin = v;
      rep.root = r.name();
    }
  }
  rep.regular = rep.margin >= eps;
  return rep;
}

inline void require_regular(const RealVector& q, const RootSystemData& rsd, double eps) {
  const auto rep = is_regular(q, rsd, eps);
  if (!rep.regular)
    throw RegularityError("non-regular Cartan element: root " + rep.root + " has |alpha(q)| = " +
                              std::to_string(rep.margin),
                          rep.root, rep.margin);
}

/// Scalar functions of ad_q. Odd ones swap M-perp <-> A-perp, even ones
/// preserve each subspace.
enum class SpectralFunction {
  Coth,           // F(z) = coth z
  InvSinh,        // w(z) = 1/sinh z
  InvSinhSq,      // w^2(z)
  InvSinhSqHalf,  // w^2(z/2)
  CothOverSinh,   // (wF)(z)
};

inline bool is_odd(SpectralFunction f) {
  return f == SpectralFunction::Coth || f == SpectralFunction::InvSinh;
}

inline double evaluate(SpectralFunction f, double z) {
  switch (f) {
    case SpectralFunction::Coth: return 1.0 / std::tanh(z);
    case SpectralFunction::InvSinh: return 1.0 / std::sinh(z);
    case SpectralFunction::InvSinhSq: { const double s = std::sinh(z); return 1.0 / (s * s); }
    case SpectralFunction::InvSinhSqHalf: { const double s = std::sinh(0.5 * z); return 1.0 / (s * s); }
    case SpectralFunction::CothOverSinh: return std::cosh(z) / (std::sinh(z) * std::sinh(z));
  }
  return 0.0;
}

/// f(ad_q) X for X in M-perp or A-perp, evaluated root by root.
inline AlgebraElement apply_spectral_function(SpectralFunction f, const CartanVector& q,
                                              const AlgebraElement& x,
                                              const RootSystemData& rsd,
                                              double eps_reg = kDefaultRegularity) {
  require_regular(q.q, rsd, eps_reg);
  const RealVector cp = plus_coefficients(x.mat(), rsd);
  const RealVector cm = minus_coefficients(x.mat(), rsd);
  const double scale = std::max(1.0, max_abs(x.mat()));
  const double tol = 1e-10 * scale;
  const bool in_plus = max_abs(ComplexMatrix(x.mat() - combine_plus(cp, rsd))) <= tol;
  const bool in_minus = max_abs(ComplexMatrix(x.mat() - combine_minus(cm, rsd))) <= tol;
  if (!in_plus && !in_minus)
    throw DomainError("apply_spectral_function: argument has components outside M-perp/A-perp");

  const bool odd = is_odd(f);
  const RealVector& c = in_plus ? cp : cm;
  RealVector out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i)
    out(i) = c(i) * evaluate(f, rsd.roots[rsd.vectors[i].root].value(q.q));
  const bool to_plus = in_plus != odd;
  return {rsd.sig, to_plus ? combine_plus(out, rsd) : combine_minus(out, rsd)};
}

}  // namespace rlab
