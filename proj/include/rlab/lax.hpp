#pragma once

// Lax matrices L(v) = (J)_- - v xi on the exp(A) slice, the Lax partner
// y = y_M + xi_M/2 - w^2(ad_q) xi_perp - (wF)(ad_q) xi'_perp with y_M fitted,
// spectral invariants and finite-difference Poisson brackets.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rlab/dynamics.hpp"
#include "rlab/reduction.hpp"

namespace rlab {

enum class Side { Left, Right };

inline std::string to_string(Side s) { return s == Side::Left ? "l" : "r"; }

struct LaxMatrix {
  Side side = Side::Left;
  double v = 0.0;
  AlgebraElement mat;
};

/// L^l(v) = (J^l)_- - v xi^l, L^r(v) = (J^r)_- - v xi^r with J^r = -e^{-q} J^l e^{q}.
inline LaxMatrix lax_matrix(const ReducedPoint& pt, double v, Side side, const RootSystemData& rsd,
                            double eps_reg = kDefaultRegularity) {
  if (side == Side::Left) {
    const AlgebraElement j = solve_constraint(pt, rsd, eps_reg);
    return {side, v, split_pm(j).minus - v * pt.xi_l.xi};
  }
  const AlgebraElement j = slice_right_momentum(pt, rsd, eps_reg);
  return {side, v, split_pm(j).minus - v * pt.xi_r.xi};
}

/// The part of the Lax partner fixed by the gauge slice (everything but y_M).
inline AlgebraElement lax_partner_base(const ReducedPoint& pt, Side side, const RootSystemData& rsd,
                                       double eps_reg = kDefaultRegularity) {
  const OrbitPoint& own = side == Side::Left ? pt.xi_l : pt.xi_r;
  const OrbitPoint& other = side == Side::Left ? pt.xi_r : pt.xi_l;
  return 0.5 * m_part(own.xi, rsd) -
         apply_spectral_function(SpectralFunction::InvSinhSq, pt.q, m_perp_part(own.xi, rsd), rsd,
                                 eps_reg) -
         apply_spectral_function(SpectralFunction::CothOverSinh, pt.q, m_perp_part(other.xi, rsd),
                                 rsd, eps_reg);
}

/// Threshold on the condition number of the y_M least-squares problem.
inline constexpr double kMaxFitCondition = 1e8;

struct LaxFit {
  AlgebraElement y;            // full partner including the fitted y_M
  RealVector y_m;              // coefficients on rsd.m_basis
  double residual = 0.0;       // max |L' - [y, L]| after the fit
  double rhs_scale = 0.0;      // max |L' - [y_base, L]| before the fit
  double condition = 1.0;
};

/// Fits y_M at time t along the projected flow so that L' = [y, L], with L'
/// from central differences of step h.
inline LaxFit fit_lax_partner(const GeodesicProjector& proj, const ReducedPoint& pt0, double t,
                              double v, Side side, const RootSystemData& rsd, double h = 1e-4,
                              double eps_reg = kDefaultRegularity,
                              double max_condition = kMaxFitCondition) {
  auto point_at = [&](double s) {
    const PhasePoint ph = proj.at(s);
    return ReducedPoint(CartanVector(pt0.sig(), ph.q), ph.p, pt0.xi_l, pt0.xi_r);
  };
  const ReducedPoint p0 = point_at(t);
  const ComplexMatrix l0 = lax_matrix(p0, v, side, rsd, eps_reg).mat.mat();
  const ComplexMatrix lp = lax_matrix(point_at(t + h), v, side, rsd, eps_reg).mat.mat();
  const ComplexMatrix lm = lax_matrix(point_at(t - h), v, side, rsd, eps_reg).mat.mat();
  const ComplexMatrix ldot = (lp - lm) / (2.0 * h);
  const ComplexMatrix y0 = lax_partner_base(p0, side, rsd, eps_reg).mat();
  const ComplexMatrix rhs = ldot - (y0 * l0 - l0 * y0);

  const Eigen::Index entries = rhs.size();
  const auto dim_m = static_cast<Eigen::Index>(rsd.m_basis.size());
  LaxFit fit{AlgebraElement(p0.sig(), y0), RealVector::Zero(dim_m), max_abs(rhs), max_abs(rhs), 1.0};
  if (dim_m == 0) return fit;

  Eigen::MatrixXd a(2 * entries, dim_m);
  for (Eigen::Index i = 0; i < dim_m; ++i) {
    const ComplexMatrix c = rsd.m_basis[i] * l0 - l0 * rsd.m_basis[i];
    a.col(i) << c.reshaped().real(), c.reshaped().imag();
  }
  Eigen::VectorXd b(2 * entries);
  b << rhs.reshaped().real(), rhs.reshaped().imag();

  // Directions of M that commute with L span an exact null space: they do not
  // enter [y, L] and are fixed to zero. Conditioning is judged on the rest.
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = solver.singularValues();
  const double floor = 1e-12 * std::max(1.0, max_abs(l0));
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > floor) ++rank;
  if (rank == 0) return fit;
  fit.condition = sv(0) / sv(rank - 1);
  if (fit.condition > max_condition)
    throw ConditioningError("fit_lax_partner: y_M least-squares problem is ill-conditioned (cond " +
                            std::to_string(fit.condition) + ")");
  solver.setThreshold(floor / sv(0));
  fit.y_m = solver.solve(b);

  const ComplexMatrix y = y0 + combine_centralizer(fit.y_m, rsd);
  fit.y = AlgebraElement(p0.sig(), y);
  fit.residual = max_abs(ComplexMatrix(ldot - (y * l0 - l0 * y)));
  return fit;
}

/// Spectrum of the Hermitian matrix i I L (real, ascending) and tr L^2,4,6.
struct SpectralSample {
  RealVector spectrum;            // eigenvalues of i I L
  Eigen::VectorXcd eigenvalues;   // eigenvalues of L, sorted by (re, im)
  double tr2 = 0, tr4 = 0, tr6 = 0;
};

/// I L is anti-Hermitian for L in su(m,n), so i I L is Hermitian. Its
/// spectrum is invariant under conjugation by G_+, which commutes with I.
inline SpectralSample spectral_invariants(const LaxMatrix& l) {
  const Signature& s = l.mat.sig();
  const ComplexMatrix& x = l.mat.mat();
  const double scale = std::max(1.0, max_abs(x));
  ComplexMatrix h = Complex(0, 1) * s.metric() * x;
  if (max_abs(ComplexMatrix(h - h.adjoint())) > 1e-10 * scale)
    throw DomainError("spectral_invariants: L is not in su(m,n) (i I L not Hermitian)");
  h = 0.5 * (h + h.adjoint());
  SpectralSample out;
  out.spectrum = eig_hermitian<double>(h, 1e-10).values;
  Eigen::ComplexEigenSolver<ComplexMatrix> ces(x, false);
  if (ces.info() != Eigen::Success) throw FactorizationError("spectral_invariants: eigensolver failed");
  std::vector<Complex> ev(ces.eigenvalues().data(), ces.eigenvalues().data() + x.rows());
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  out.eigenvalues = Eigen::Map<Eigen::VectorXcd>(ev.data(), x.rows());

  const ComplexMatrix x2 = x * x;
  const ComplexMatrix x4 = x2 * x2;
  const Complex t2 = x2.trace(), t4 = x4.trace(), t6 = (x4 * x2).trace();
  const double n = static_cast<double>(x.rows());
  auto check = [&](Complex t, int k) {
    if (std::abs(t.imag()) > 1e-11 * n * std::pow(scale * n, k))
      throw ConsistencyError("spectral_invariants: tr L^" + std::to_string(k) +
                             " has a non-negligible imaginary part");
    return t.real();
  };
  out.tr2 = check(t2, 2);
  out.tr4 = check(t4, 4);
  out.tr6 = check(t6, 6);
  return out;
}

struct SpectralRecord {
  std::vector<double> times;
  std::vector<SpectralSample> samples;
};

struct DriftReport {
  double v = 0.0;
  Side side = Side::Left;
  double max_drift = 0.0;        // sorted-spectrum displacement from t = 0
  double max_trace_drift = 0.0;  // relative drift of tr L^2,4,6
  double fit_residual = 0.0;     // worst post-fit Lax residual over the fit times
  double fit_condition = 0.0;
  std::vector<double> fit_times;
  std::vector<RealVector> y_m;   // fitted centralizer coefficients per fit time
  std::size_t samples = 0;
  std::optional<double> stop_time;
};

/// Isospectrality of L(v) along the projected flow of a spinless setup,
/// plus y_M fits at `fits` interior times of the regular window.
inline DriftReport invariant_drift(const ReducedPoint& pt, const IntegratorConfig& cfg, double v,
                                   Side side, const RootSystemData& rsd, int fits = 5,
                                   double h = 1e-4, SpectralRecord* record = nullptr) {
  const GeodesicProjector proj(pt, rsd, cfg.regularity_floor);
  DriftReport rep;
  rep.v = v;
  rep.side = side;
  SpectralSample first;
  double t_last = 0.0;
  const std::size_t steps = cfg.steps();
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    const PhasePoint ph = i == 0 ? PhasePoint{pt.q.q, pt.p} : proj.at(t);
    const auto reg = is_regular(ph.q, rsd, cfg.regularity_floor);
    if (!reg.regular) {
      rep.stop_time = t;
      break;
    }
    const ReducedPoint cur(CartanVector(pt.sig(), ph.q), ph.p, pt.xi_l, pt.xi_r);
    const SpectralSample s = spectral_invariants(lax_matrix(cur, v, side, rsd, cfg.regularity_floor));
    if (i == 0) first = s;
    rep.max_drift = std::max(rep.max_drift, max_abs(RealVector(s.spectrum - first.spectrum)));
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    rep.max_trace_drift = std::max(
        {rep.max_trace_drift, rel(s.tr2, first.tr2), rel(s.tr4, first.tr4), rel(s.tr6, first.tr6)});
    if (record) {
      record->times.push_back(t);
      record->samples.push_back(s);
    }
    t_last = t;
    ++rep.samples;
  }

  // Fit times stay 2h away from both ends of the regular window.
  for (int k = 1; k <= fits; ++k) {
    const double t = t_last * k / (fits + 1.0);
    if (t < 2 * h) continue;
    const LaxFit f = fit_lax_partner(proj, pt, t, v, side, rsd, h, cfg.regularity_floor);
    rep.fit_residual = std::max(rep.fit_residual, f.residual);
    rep.fit_condition = std::max(rep.fit_condition, f.condition);
    rep.fit_times.push_back(t);
    rep.y_m.push_back(f.y_m);
  }
  return rep;
}

/// Spectral drift of L(v) along an arbitrary (q, p) trajectory with fixed
/// spin data, e.g. a direct integration.
inline double trajectory_drift(const Trajectory& tr, const ReducedPoint& base, double v, Side side,
                               const RootSystemData& rsd, double eps_reg = kDefaultRegularity) {
  double drift = 0.0;
  RealVector first;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const ReducedPoint pt(CartanVector(base.sig(), tr.q[i]), tr.p[i], base.xi_l, base.xi_r);
    const RealVector s = spectral_invariants(lax_matrix(pt, v, side, rsd, eps_reg)).spectrum;
    if (i == 0) first = s;
    drift = std::max(drift, max_abs(RealVector(s - first)));
  }
  return drift;
}

using Observable = std::function<double(const RealVector& q, const RealVector& p)>;

struct BracketEstimate {
  double value = 0.0;         // estimate with step h
  double halved = 0.0;        // estimate with step h/2
  double disagreement = 0.0;
  double scale = 0.0;         // sum of |individual products|
  double extrapolated = 0.0;  // Richardson combination (4 halved - value) / 3
};

namespace detail {

inline double partial(const Observable& f, const RealVector& q, const RealVector& p, bool wrt_q,
                      Eigen::Index k, double h) {
  RealVector qp = q, qm = q, pp = p, pm = p;
  if (wrt_q) {
    qp(k) += h;
    qm(k) -= h;
  } else {
    pp(k) += h;
    pm(k) -= h;
  }
  return (f(qp, pp) - f(qm, pm)) / (2 * h);
}

inline std::pair<double, double> bracket_at(const Observable& f, const Observable& g,
                                            const RealVector& q, const RealVector& p, double h) {
  double sum = 0.0, scale = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    const double a = partial(f, q, p, true, k, h) * partial(g, q, p, false, k, h);
    const double b = partial(f, q, p, false, k, h) * partial(g, q, p, true, k, h);
    sum += a - b;
    scale += std::abs(a) + std::abs(b);
  }
  return {sum, scale};
}

}  // namespace detail

/// Canonical bracket {f, g} = sum_k (df/dq^k dg/dp^k - df/dp^k dg/dq^k) by
/// central differences. The estimate is repeated with h/2; if the two differ
/// by more than rel_tol times the size of the individual terms, roundoff
/// dominates and a ConditioningError is raised.
inline BracketEstimate poisson_bracket_fd(const Observable& f, const Observable& g,
                                          const RealVector& q, const RealVector& p, double h,
                                          double rel_tol = 1e-6) {
  if (q.size() != p.size()) throw DimensionError("poisson_bracket_fd: q and p differ in length");
  if (!(h > 0)) throw DomainError("poisson_bracket_fd: step must be positive");
  const auto [v1, s1] = detail::bracket_at(f, g, q, p, h);
  const auto [v2, s2] = detail::bracket_at(f, g, q, p, 0.5 * h);
  BracketEstimate out{v1, v2, std::abs(v1 - v2), std::max(s1, s2), (4.0 * v2 - v1) / 3.0};
  if (out.disagreement > rel_tol * std::max(1.0, out.scale))
    throw ConditioningError("poisson_bracket_fd: step-halving estimates disagree by " +
                            std::to_string(out.disagreement) + " (step too small or too large)");
  return out;
}

/// tr L(v)^k as an observable on (q, p) for fixed spin data.
inline Observable trace_power_observable(const ReducedPoint& base, double v, int k, Side side,
                                         const RootSystemData& rsd) {
  return [base, v, k, side, &rsd](const RealVector& q, const RealVector& p) {
    const ReducedPoint pt(CartanVector(base.sig(), q), p, base.xi_l, base.xi_r);
    const ComplexMatrix l = lax_matrix(pt, v, side, rsd).mat.mat();
    ComplexMatrix acc = ComplexMatrix::Identity(l.rows(), l.cols());
    for (int i = 0; i < k; ++i) acc = acc * l;
    return acc.trace().real();
  };
}

}  // namespace rlab
