#pragma once

// Coadjoint orbits of G_+, the G_+ x G_+ momentum map, the solution of the
// zero-momentum constraint on the exp(A) slice, and the reduced Hamiltonian.
// The three one-point cases reduce to the hyperbolic BC_n Sutherland model
//   H = 1/2 sum p_k^2 + sum_{j<k} g^2 (sinh^-2(q_j - q_k) + sinh^-2(q_j + q_k))
//       + sum_k (g1^2 sinh^-2(q_k) + g2^2 sinh^-2(2 q_k)).

#include <algorithm>
#include <functional>
#include <random>
#include <vector>
#include <cmath>
#include <string>
#include <utility>

#include "rlab/kak.hpp"
#include "rlab/lie.hpp"

namespace rlab {

/// Tolerance on |xi^l_M + xi^r_M| for accepting a reduced point.
inline constexpr double kConstraintTolerance = 1e-9;

enum class OrbitBlock { Upper, Lower };  // su(m) factor or su(n) factor
enum class OrbitCase { SuNN, SuN1N, SuMN };

inline std::string to_string(OrbitCase c) {
  switch (c) {
    case OrbitCase::SuNN: return "sunn";
    case OrbitCase::SuN1N: return "sun1n";
    case OrbitCase::SuMN: return "sumn";
  }
  return "?";
}

/// O = O_{k,kappa,sign} (in the chosen block) + {x C}, or just {x C} when
/// has_minimal is false.
struct OrbitSpec {
  Signature sig;
  OrbitBlock block = OrbitBlock::Upper;
  bool has_minimal = true;
  double kappa = 1.0;
  int sign = +1;
  double x = 0.0;

  int block_size() const { return block == OrbitBlock::Upper ? sig.m : sig.n; }
  int block_offset() const { return block == OrbitBlock::Upper ? 0 : sig.m; }
};

/// A point of a coadjoint orbit of G_+ (theta-fixed, block-diagonal).
struct OrbitPoint {
  AlgebraElement xi;

  explicit OrbitPoint(AlgebraElement x) : xi(std::move(x)) {
    const Signature& s = xi.sig();
    const ComplexMatrix& mx = xi.mat();
    const double scale = std::max(1.0, max_abs(mx));
    const double off = std::max(max_abs(mx.topRightCorner(s.m, s.n)),
                                max_abs(mx.bottomLeftCorner(s.n, s.m)));
    if (off > 1e-12 * scale || max_abs(ComplexMatrix(mx + mx.adjoint())) > 1e-12 * scale)
      throw DomainError("OrbitPoint: element is not in the compact subalgebra");
  }
};

/// eta_sign(u) = sign * i (u u^dag - (u^dag u / k) 1_k).
inline ComplexMatrix eta(const Eigen::VectorXcd& u, int sign) {
  const auto k = u.size();
  const double norm2 = u.squaredNorm();
  return Complex(0, sign) *
         (u * u.adjoint() - (norm2 / double(k)) * ComplexMatrix::Identity(k, k));
}

/// eta_sign(u) placed in the given block of an su(m,n) matrix.
inline OrbitPoint minimal_orbit_point(Signature s, OrbitBlock block, const Eigen::VectorXcd& u,
                                      int sign = +1) {
  const int k = block == OrbitBlock::Upper ? s.m : s.n;
  if (u.size() != k) throw DimensionError("minimal_orbit_point: u has the wrong length");
  if (u.squaredNorm() == 0.0) throw DomainError("minimal_orbit_point: u must be nonzero");
  ComplexMatrix x = ComplexMatrix::Zero(s.dim(), s.dim());
  const int off = block == OrbitBlock::Upper ? 0 : s.m;
  x.block(off, off, k, k) = eta(u, sign);
  return OrbitPoint({s, std::move(x)});
}

/// Uniform point of the orbit: u uniform on the sphere u^dag u = k kappa.
inline OrbitPoint sample_orbit_point(const OrbitSpec& spec, Rng& rng) {
  AlgebraElement xi = spec.x * central_character(spec.sig);
  if (spec.has_minimal) {
    const int k = spec.block_size();
    Eigen::VectorXcd u = gaussian_vector(k, rng);
    u *= std::sqrt(k * spec.kappa) / u.norm();
    xi += minimal_orbit_point(spec.sig, spec.block, u, spec.sign).xi;
  }
  return OrbitPoint(std::move(xi));
}

/// Spectral orbit-membership residual: after removing x C, the designated
/// block must have spectrum sign*i*kappa*{k-1, -1 (k-1 times)} and the other
/// block must vanish.
inline double orbit_membership_residual(const OrbitPoint& pt, const OrbitSpec& spec) {
  const Signature& s = spec.sig;
  const ComplexMatrix z = (pt.xi - spec.x * central_character(s)).mat();
  if (!spec.has_minimal) return max_abs(z);
  const int k = spec.block_size();
  const int off = spec.block_offset();
  const int other_off = spec.block == OrbitBlock::Upper ? s.m : 0;
  const int other_k = s.dim() - k;
  const double rest = max_abs(z.block(other_off, other_off, other_k, other_k));

  // -i*sign*Z is Hermitian with spectrum kappa*{-1 x (k-1), k-1}.
  const ComplexMatrix h = Complex(0, -spec.sign) * z.block(off, off, k, k);
  const RealVector ev = eig_hermitian<double>(0.5 * (h + h.adjoint()).eval(), 1e-9).values;
  RealVector expected = RealVector::Constant(k, -spec.kappa);
  expected(k - 1) = spec.kappa * (k - 1);
  return std::max(rest, max_abs(RealVector(ev - expected)));
}

struct CouplingConstants {
  double g_sq = 0.0;
  double g1_sq = 0.0;
  double g2_sq = 0.0;
  double energy_shift = 0.0;  // s with H_red / 2 = H_BCn + s
};

/// (q, p, xi^l, xi^r) on the exp(A) slice; p are the A-coordinates of J^l_A.
struct ReducedPoint {
  CartanVector q;
  RealVector p;
  OrbitPoint xi_l;
  OrbitPoint xi_r;

  ReducedPoint(CartanVector q_, RealVector p_, OrbitPoint l, OrbitPoint r)
      : q(std::move(q_)), p(std::move(p_)), xi_l(std::move(l)), xi_r(std::move(r)) {
    if (p.size() != q.sig.n) throw DimensionError("ReducedPoint: p must have n entries");
  }

  const Signature& sig() const { return q.sig; }
};

/// |xi^l_M + xi^r_M|, the M-component of the momentum constraint.
inline double constraint_residual(const OrbitPoint& l, const OrbitPoint& r,
                                  const RootSystemData& rsd) {
  return max_abs(ComplexMatrix(m_part(l.xi + r.xi, rsd).mat()));
}

struct MomentumValue {
  AlgebraElement left;
  AlgebraElement right;
};

/// Psi = ((J^l)_+ + xi^l, -(g^{-1} J^l g)_+ + xi^r).
inline MomentumValue momentum_map(const GroupElement& g, const AlgebraElement& jl,
                                  const OrbitPoint& xi_l, const OrbitPoint& xi_r) {
  const AlgebraElement jr(g.sig, -(g.mat.inverse() * jl.mat() * g.mat));
  return {split_pm(jl).plus + xi_l.xi, split_pm(jr).plus + xi_r.xi};
}

namespace detail {

inline void require_constraint(const ReducedPoint& pt, const RootSystemData& rsd) {
  const double res = constraint_residual(pt.xi_l, pt.xi_r, rsd);
  const double scale = std::max(1.0, std::max(max_abs(pt.xi_l.xi.mat()), max_abs(pt.xi_r.xi.mat())));
  if (res > kConstraintTolerance * scale)
    throw ConstraintError("xi^l_M + xi^r_M = 0 violated (residual " + std::to_string(res) + ")");
}

}  // namespace detail

/// J^l on the slice: embed(p) - F(ad_q) xi^l_perp - w(ad_q) xi^r_perp - xi^l.
inline AlgebraElement solve_constraint(const ReducedPoint& pt, const RootSystemData& rsd,
                                       double eps_reg = kDefaultRegularity) {
  require_regular(pt.q.q, rsd, eps_reg);
  detail::require_constraint(pt, rsd);
  const AlgebraElement l_perp = m_perp_part(pt.xi_l.xi, rsd);
  const AlgebraElement r_perp = m_perp_part(pt.xi_r.xi, rsd);
  return embed_cartan(CartanVector(pt.sig(), pt.p)) -
         apply_spectral_function(SpectralFunction::Coth, pt.q, l_perp, rsd, eps_reg) -
         apply_spectral_function(SpectralFunction::InvSinh, pt.q, r_perp, rsd, eps_reg) -
         pt.xi_l.xi;
}

/// J^r = -exp(-q) J^l exp(q) on the slice, in closed form:
///   -embed(p) + w(ad_q) xi^l_perp + F(ad_q) xi^r_perp - xi^r.
/// Avoids the e^{2|q|} cancellation of the literal conjugation.
inline AlgebraElement slice_right_momentum(const ReducedPoint& pt, const RootSystemData& rsd,
                                           double eps_reg = kDefaultRegularity) {
  require_regular(pt.q.q, rsd, eps_reg);
  detail::require_constraint(pt, rsd);
  const AlgebraElement l_perp = m_perp_part(pt.xi_l.xi, rsd);
  const AlgebraElement r_perp = m_perp_part(pt.xi_r.xi, rsd);
  return -embed_cartan(CartanVector(pt.sig(), pt.p)) +
         apply_spectral_function(SpectralFunction::InvSinh, pt.q, l_perp, rsd, eps_reg) +
         apply_spectral_function(SpectralFunction::Coth, pt.q, r_perp, rsd, eps_reg) -
         pt.xi_r.xi;
}

/// Reduced Hamiltonian written out term by term; equals <J^l, J^l>/2.
inline double reduced_hamiltonian(const ReducedPoint& pt, const RootSystemData& rsd,
                                  double eps_reg = kDefaultRegularity) {
  require_regular(pt.q.q, rsd, eps_reg);
  detail::require_constraint(pt, rsd);
  using SF = SpectralFunction;
  const AlgebraElement l_perp = m_perp_part(pt.xi_l.xi, rsd);
  const AlgebraElement r_perp = m_perp_part(pt.xi_r.xi, rsd);
  const AlgebraElement l_m = m_part(pt.xi_l.xi, rsd);
  auto f = [&](SF fn, const AlgebraElement& x) {
    return apply_spectral_function(fn, pt.q, x, rsd, eps_reg);
  };
  const AlgebraElement p = embed_cartan(CartanVector(pt.sig(), pt.p));
  const AlgebraElement w2_l = f(SF::InvSinhSq, l_perp);
  return 0.5 * trace_form(p, p) - 0.5 * trace_form(l_perp, w2_l) -
         0.5 * trace_form(r_perp, f(SF::InvSinhSq, r_perp)) + 0.5 * trace_form(l_m, l_m) +
         trace_form(r_perp, w2_l) - 0.5 * trace_form(r_perp, f(SF::InvSinhSqHalf, l_perp));
}

namespace detail {

inline void require_bcn_domain(const RealVector& q) {
  const auto n = q.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (q(k) == 0.0) throw DomainError("bcn_hamiltonian: coordinate q" + std::to_string(k + 1) + " is zero");
    for (Eigen::Index j = 0; j < k; ++j)
      if (q(j) == q(k) || q(j) == -q(k))
        throw DomainError("bcn_hamiltonian: coincident coordinates");
  }
}

inline double inv_sinh_sq(double z) {
  const double s = std::sinh(z);
  return 1.0 / (s * s);
}

// d/dz sinh^-2(z)
inline double inv_sinh_sq_prime(double z) {
  const double s = std::sinh(z);
  return -2.0 * std::cosh(z) / (s * s * s);
}

}  // namespace detail

inline double bcn_potential(const RealVector& q, const CouplingConstants& cc) {
  detail::require_bcn_domain(q);
  const auto n = q.size();
  double v = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k)
      v += cc.g_sq * (detail::inv_sinh_sq(q(j) - q(k)) + detail::inv_sinh_sq(q(j) + q(k)));
    v += cc.g1_sq * detail::inv_sinh_sq(q(j)) + cc.g2_sq * detail::inv_sinh_sq(2.0 * q(j));
  }
  return v;
}

inline double bcn_hamiltonian(const RealVector& q, const RealVector& p, const CouplingConstants& cc) {
  if (q.size() != p.size()) throw DimensionError("bcn_hamiltonian: q and p differ in length");
  return 0.5 * p.squaredNorm() + bcn_potential(q, cc);
}

/// Analytic gradient of the BC_n potential.
inline RealVector bcn_gradient(const RealVector& q, const CouplingConstants& cc) {
  detail::require_bcn_domain(q);
  const auto n = q.size();
  RealVector grad = RealVector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const double d = cc.g_sq * detail::inv_sinh_sq_prime(q(j) - q(k));
      const double s = cc.g_sq * detail::inv_sinh_sq_prime(q(j) + q(k));
      grad(j) += d + s;
      grad(k) += -d + s;
    }
    grad(j) += cc.g1_sq * detail::inv_sinh_sq_prime(q(j)) +
               2.0 * cc.g2_sq * detail::inv_sinh_sq_prime(2.0 * q(j));
  }
  return grad;
}

/// One-point reduced-orbit setup: representatives xi^l, xi^r, the orbit
/// specs they lie on, and the resulting BC_n couplings.
struct CaseSetup {
  OrbitCase kind;
  Signature sig;
  OrbitSpec left;
  OrbitSpec right;
  OrbitPoint xi_l;
  OrbitPoint xi_r;
  CouplingConstants cc;
};

namespace detail {

inline AlgebraElement sum_double_roots(const RootSystemData& rsd) {
  AlgebraElement out = AlgebraElement::zero(rsd.sig);
  for (int k = 0; k < rsd.sig.n; ++k) out += rsd.plus(RootKind::Double, k, 0, Part::Imag);
  return out;
}

// sum_{j<k} (E^{+,i}_{e_j+e_k} + sign E^{+,i}_{e_j-e_k})
inline AlgebraElement sum_pair_roots(const RootSystemData& rsd, double diff_sign) {
  AlgebraElement out = AlgebraElement::zero(rsd.sig);
  for (int j = 0; j < rsd.sig.n; ++j)
    for (int k = j + 1; k < rsd.sig.n; ++k)
      out += rsd.plus(RootKind::Sum, j, k, Part::Imag) +
             diff_sign * rsd.plus(RootKind::Difference, j, k, Part::Imag);
  return out;
}

inline void check_on_orbit(const OrbitPoint& pt, const OrbitSpec& spec, const char* which) {
  if (orbit_membership_residual(pt, spec) > 1e-9)
    throw ConsistencyError(std::string("representative ") + which + " is not on its orbit");
}

}  // namespace detail

/// SU(n,n): O^l = O_{n,kappa,+} (upper block) + {x C}, O^r = {y C}.
inline CaseSetup sunn_setup(int n, double kappa, double x, double y) {
  if (!(kappa > 0)) throw DomainError("sunn_setup: kappa must be positive");
  const Signature s(n, n);
  const RootSystemData rsd = build_root_system(s);
  const double r2 = std::sqrt(2.0);
  AlgebraElement l = kappa * detail::sum_pair_roots(rsd, +1.0) +
                     (r2 * x * n) * detail::sum_double_roots(rsd);
  AlgebraElement r = (r2 * y * n) * detail::sum_double_roots(rsd);
  CaseSetup out{OrbitCase::SuNN,
                s,
                {s, OrbitBlock::Upper, true, kappa, +1, x},
                {s, OrbitBlock::Upper, false, 0.0, +1, y},
                OrbitPoint(std::move(l)),
                OrbitPoint(std::move(r)),
                {kappa * kappa / 4.0, x * y * n * n / 2.0, (x - y) * (x - y) * n * n / 2.0, 0.0}};
  detail::check_on_orbit(out.xi_l, out.left, "xi^l");
  detail::check_on_orbit(out.xi_r, out.right, "xi^r");
  return out;
}

/// Intermediate constants of the SU(n+1,n) representative.
struct Sun1nParameters {
  double g = 0, h1 = 0, h2 = 0, h2_tilde = 0;
};

inline Sun1nParameters sun1n_parameters(int n, double kappa, double x, double y) {
  if (kappa + x + y < 0)
    throw ConsistencyError("sun1n: consistency requires kappa + x + y >= 0");
  if (kappa - n * (x + y) < 0)
    throw ConsistencyError("sun1n: consistency requires kappa - n(x + y) >= 0");
  const double r8 = std::sqrt(8.0);
  return {(kappa + x + y) / 2.0,
          std::sqrt((kappa + x + y) * (kappa - n * x - n * y)) / std::sqrt(2.0),
          (2.0 * (n + 1) * x + y) / r8, y * (2.0 * n + 1) / r8};
}

/// SU(n+1,n): O^l = O_{n+1,kappa,+} + {x C}, O^r = {y C}.
inline CaseSetup sun1n_setup(int n, double kappa, double x, double y) {
  if (!(kappa > 0)) throw DomainError("sun1n_setup: kappa must be positive");
  const Sun1nParameters prm = sun1n_parameters(n, kappa, x, y);
  const Signature s(n + 1, n);
  const RootSystemData rsd = build_root_system(s);

  ComplexMatrix xr_m = ComplexMatrix::Zero(s.dim(), s.dim());
  for (int k = 0; k < n; ++k) {
    xr_m(s.slot_a(k), s.slot_a(k)) = Complex(0, -y / 2.0);
    xr_m(s.slot_b(k), s.slot_b(k)) = Complex(0, -y / 2.0);
  }
  xr_m(s.slot_c(0), s.slot_c(0)) = Complex(0, y * n);
  const AlgebraElement xi_r_m(s, xr_m);
  AlgebraElement r = xi_r_m + (2.0 * prm.h2_tilde) * detail::sum_double_roots(rsd);

  AlgebraElement singles = AlgebraElement::zero(s);
  for (int k = 0; k < n; ++k) singles += rsd.plus(RootKind::Single, k, 0, Part::Imag, 0);
  AlgebraElement l = -xi_r_m + (2.0 * prm.g) * detail::sum_pair_roots(rsd, +1.0) +
                     (2.0 * prm.h1) * singles + (2.0 * prm.h2) * detail::sum_double_roots(rsd);

  CaseSetup out{OrbitCase::SuN1N,
                s,
                {s, OrbitBlock::Upper, true, kappa, +1, x},
                {s, OrbitBlock::Upper, false, 0.0, +1, y},
                OrbitPoint(std::move(l)),
                OrbitPoint(std::move(r)),
                {prm.g * prm.g, prm.h1 * prm.h1 + prm.h2 * prm.h2_tilde,
                 (prm.h2 - prm.h2_tilde) * (prm.h2 - prm.h2_tilde),
                 -y * y * (2.0 * n * n + n) / 8.0}};
  detail::check_on_orbit(out.xi_l, out.left, "xi^l");
  detail::check_on_orbit(out.xi_r, out.right, "xi^r");
  return out;
}

/// SU(m,n), m >= n+1: O^l = O_{n,kappa,+} (lower block) + {x C} with x = -y,
/// O^r = {y C}.
inline CaseSetup sumn_setup(int m, int n, double kappa, double y) {
  if (!(kappa > 0)) throw DomainError("sumn_setup: kappa must be positive");
  if (m < n + 1) throw DomainError("sumn_setup: requires m >= n + 1");
  const Signature s(m, n);
  const RootSystemData rsd = build_root_system(s);
  const double x = -y;
  // eta_+(sqrt(kappa) (1,...,1)) in the lower block has zero M-part.
  AlgebraElement l = kappa * (-1.0) * detail::sum_pair_roots(rsd, -1.0) + x * central_character(s);
  AlgebraElement r = y * central_character(s);
  const double mn2 = double(m + n) * double(m + n);
  CaseSetup out{OrbitCase::SuMN,
                s,
                {s, OrbitBlock::Lower, true, kappa, +1, x},
                {s, OrbitBlock::Upper, false, 0.0, +1, y},
                OrbitPoint(std::move(l)),
                OrbitPoint(std::move(r)),
                {kappa * kappa / 4.0, -y * y * mn2 / 8.0, y * y * mn2 / 2.0,
                 -y * y * (double(m) * m - double(n) * n) * n / 8.0}};
  detail::check_on_orbit(out.xi_l, out.left, "xi^l");
  detail::check_on_orbit(out.xi_r, out.right, "xi^r");
  return out;
}

/// (xi^l - y C, xi^r + y C): leaves xi^l_M + xi^r_M untouched.
inline std::pair<OrbitPoint, OrbitPoint> shift_orbits(const OrbitPoint& l, const OrbitPoint& r,
                                                      double y) {
  const AlgebraElement c = central_character(l.xi.sig());
  return {OrbitPoint(l.xi - y * c), OrbitPoint(r.xi + y * c)};
}

/// Uniform q in [lo, hi]^n sorted into the chamber, resampled until every
/// BC_n wall is at least `gap` away.
inline RealVector sample_chamber(int n, Rng& rng, double lo = 0.2, double hi = 2.5,
                                 double gap = 0.1) {
  std::uniform_real_distribution<double> u(lo, hi);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    std::sort(v.begin(), v.end(), std::greater<>());
    double margin = v.back();
    for (int k = 0; k + 1 < n; ++k) margin = std::min(margin, v[k] - v[k + 1]);
    if (margin >= gap) return Eigen::Map<RealVector>(v.data(), n);
  }
  throw DomainError("sample_chamber: could not satisfy the wall gap");
}

inline RealVector sample_momenta(int n, Rng& rng, double sigma = 1.0) {
  std::normal_distribution<double> g(0.0, sigma);
  RealVector p(n);
  for (int k = 0; k < n; ++k) p(k) = g(rng);
  return p;
}

/// Random element of the compact subalgebra: block-diagonal anti-Hermitian,
/// traceless overall.
inline AlgebraElement sample_compact_algebra(Signature s, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix x = ComplexMatrix::Zero(s.dim(), s.dim());
  auto fill = [&](int off, int k) {
    ComplexMatrix b(k, k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < k; ++i) b(i, j) = Complex(g(rng), g(rng));
    x.block(off, off, k, k) = 0.5 * (b - b.adjoint());
  };
  fill(0, s.m);
  fill(s.m, s.n);
  const Complex tr = x.trace() / double(s.dim());
  x -= tr * ComplexMatrix::Identity(s.dim(), s.dim());
  return {s, x};
}

/// Generic (not one-point) spins with xi^l_M + xi^r_M = 0.
inline std::pair<OrbitPoint, OrbitPoint> sample_constrained_spins(const RootSystemData& rsd, Rng& rng) {
  const AlgebraElement l = sample_compact_algebra(rsd.sig, rng);
  AlgebraElement r = sample_compact_algebra(rsd.sig, rng);
  r -= m_part(l + r, rsd);
  return {OrbitPoint(l), OrbitPoint(r)};
}

inline ReducedPoint make_point(const CaseSetup& setup, const RealVector& q, const RealVector& p) {
  return {CartanVector(setup.sig, q), p, setup.xi_l, setup.xi_r};
}

}  // namespace rlab
