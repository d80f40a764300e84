#pragma once

// Two routes to the reduced dynamics:
//  - projection: g(t) = exp(t J^l) g(0) pushed back to the exp(A) slice by
//    the G_+ x G_+ gauge action, read off as (q, p);
//  - direct: Stormer-Verlet integration of the BC_n Hamiltonian.
// With p the A-coordinates of J^l_A and <embed(p), embed(p)> = 2|p|^2, the
// projected curve obeys q' = dH/dp, p' = -dH/dq for H = H_red/2 with no
// rescaling of time.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rlab/kak.hpp"
#include "rlab/reduction.hpp"

namespace rlab {

struct GeodesicState {
  GroupElement g;
  AlgebraElement jl;
  OrbitPoint xi_l;
  OrbitPoint xi_r;

  /// Largest entry of Psi(g, J^l, xi^l, xi^r).
  double momentum_residual() const {
    const auto psi = momentum_map(g, jl, xi_l, xi_r);
    return std::max(max_abs(psi.left.mat()), max_abs(psi.right.mat()));
  }

  /// J^r = -g^{-1} J^l g.
  AlgebraElement right_momentum() const {
    return {g.sig, -(g.mat.inverse() * jl.mat() * g.mat)};
  }
};

struct IntegratorConfig {
  double dt = 1e-3;
  double t_max = 5.0;
  double regularity_floor = 1e-4;  // minimal allowed min_alpha |alpha(q)|
  // Direct route only: stop when q leaves the chamber. When off, only
  // singular points of the potential stop the run (a sinh^-2(q_k) wall whose
  // couplings cancel, g1^2 + g2^2/4 = 0, can be crossed).
  bool monitor_chamber = true;

  std::size_t steps() const {
    if (!(dt > 0) || !(t_max > 0)) throw DomainError("IntegratorConfig: dt and t_max must be positive");
    return static_cast<std::size_t>(std::llround(t_max / dt));
  }
};

enum class Method { Projection, Direct };

inline std::string to_string(Method m) { return m == Method::Projection ? "projection" : "direct"; }

/// Sampled (q, p, energy) curve. Truncated at the first sample that leaves the
/// regular region; stop_time/stop_reason record where and why.
struct Trajectory {
  Method method = Method::Projection;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<RealVector> q;
  std::vector<RealVector> p;
  std::vector<double> energy;
  std::optional<double> stop_time;
  std::string stop_reason;

  std::size_t size() const { return times.size(); }
  bool complete() const { return !stop_time.has_value(); }

  void push(double t, RealVector qs, RealVector ps, double e) {
    times.push_back(t);
    q.push_back(std::move(qs));
    p.push_back(std::move(ps));
    energy.push_back(e);
  }

  double energy_drift() const {
    double d = 0.0;
    for (double e : energy) d = std::max(d, std::abs(e - energy.front()));
    return d;
  }

  /// Throws RegularityError carrying the stop time if the run was truncated.
  void throw_if_truncated() const {
    if (stop_time)
      throw RegularityError(to_string(method) + " trajectory stopped at t = " +
                                std::to_string(*stop_time) + ": " + stop_reason,
                            stop_reason, 0.0, *stop_time);
  }
};

/// I(q, p, xi^l, xi^r) = (exp(q), J^l, xi^l, xi^r).
inline GeodesicState initial_state(const ReducedPoint& pt, const RootSystemData& rsd,
                                   double eps_reg = kDefaultRegularity) {
  AlgebraElement jl = solve_constraint(pt, rsd, eps_reg);
  return {exp_element(embed_cartan(pt.q)), std::move(jl), pt.xi_l, pt.xi_r};
}

/// exp(t J^l) g(0).
inline GroupElement geodesic_evolve(const GeodesicState& s0, double t) {
  return {s0.g.sig, mat_exp<double>(ComplexMatrix(t * s0.jl.mat())) * s0.g.mat};
}

struct PhasePoint {
  RealVector q;
  RealVector p;
};

/// Gauge g back to exp(q): (g_+^{-1} g h_+^{-1}, g_+^{-1} J^l g_+), then p is
/// the A-part of the transformed J^l. Independent of the M-ambiguity.
inline PhasePoint project_to_reduced(const GroupElement& g, const GeodesicState& s0,
                                     const RootSystemData& rsd,
                                     double eps_reg = kDefaultRegularity) {
  const KAKFactors f = kak_decompose(g, rsd, eps_reg);
  const ComplexMatrix jt = f.g_plus.mat.adjoint() * s0.jl.mat() * f.g_plus.mat;
  return {f.q.q, cartan_coefficients(jt, rsd)};
}

/// Evaluates the projected flow at arbitrary times in extended precision.
/// The leading singular values of exp(tJ) g(0) spread like e^{q^1 - q^n};
/// long double keeps the smaller ones accurate over desk-scale runs.
class GeodesicProjector {
public:
  using Real = long double;

  GeodesicProjector(const ReducedPoint& pt, const RootSystemData& rsd,
                    double eps_reg = kDefaultRegularity)
      : sig_(pt.sig()) {
    const AlgebraElement jl = solve_constraint(pt, rsd, eps_reg);
    j_ = jl.mat().cast<std::complex<Real>>();
    g0_ = mat_exp<Real>(CMatrixT<Real>(embed_cartan(pt.q).mat().cast<std::complex<Real>>()));
  }

  PhasePoint at(double t) const {
    const CMatrixT<Real> g = mat_exp<Real>(CMatrixT<Real>(Real(t) * j_)) * g0_;
    const auto frame = cartan_frame<Real>(g, sig_.n);
    const RVectorT<Real> p = frame_momenta<Real>(frame, j_, sig_.m);
    return {frame.q.template cast<double>(), p.template cast<double>()};
  }

  const Signature& sig() const { return sig_; }

private:
  Signature sig_;
  CMatrixT<Real> j_;
  CMatrixT<Real> g0_;
};

/// Samples the projected geodesic on t_i = i dt. Energy is H_BCn + s when
/// couplings are supplied, otherwise H_red/2 at the initial spin data.
inline Trajectory projected_trajectory(const ReducedPoint& pt, const IntegratorConfig& cfg,
                                       const RootSystemData& rsd,
                                       const std::optional<CouplingConstants>& cc = std::nullopt) {
  const GeodesicProjector proj(pt, rsd, cfg.regularity_floor);
  Trajectory tr;
  tr.method = Method::Projection;
  tr.dt = cfg.dt;
  const std::size_t steps = cfg.steps();
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    PhasePoint s = i == 0 ? PhasePoint{pt.q.q, pt.p} : proj.at(t);
    const auto reg = is_regular(s.q, rsd, cfg.regularity_floor);
    if (!reg.regular || !s.q.allFinite()) {
      tr.stop_time = t;
      tr.stop_reason = "wall " + reg.root + " (margin " + std::to_string(reg.margin) + ")";
      break;
    }
    double e;
    if (cc) {
      e = bcn_hamiltonian(s.q, s.p, *cc) + cc->energy_shift;
    } else {
      e = 0.5 * reduced_hamiltonian(ReducedPoint(CartanVector(pt.sig(), s.q), s.p, pt.xi_l, pt.xi_r),
                                    rsd, cfg.regularity_floor);
    }
    tr.push(t, std::move(s.q), std::move(s.p), e);
  }
  return tr;
}

struct ChamberMargin {
  double margin;     // min over positive roots of alpha(q), signed
  std::string wall;
};

/// Signed distance to the walls of q^1 > ... > q^n > 0.
inline ChamberMargin bcn_chamber_margin(const RealVector& q) {
  ChamberMargin out{std::numeric_limits<double>::infinity(), {}};
  auto consider = [&](double v, std::string name) {
    if (v < out.margin) out = {v, std::move(name)};
  };
  const auto n = q.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      consider(q(j) - q(k), "e" + std::to_string(j + 1) + "-e" + std::to_string(k + 1));
      consider(q(j) + q(k), "e" + std::to_string(j + 1) + "+e" + std::to_string(k + 1));
    }
    consider(q(j), "e" + std::to_string(j + 1));
  }
  return out;
}

/// Distance to the nearest singular hyperplane of the BC_n potential: walls
/// with vanishing coefficient are skipped.
inline ChamberMargin bcn_singular_margin(const RealVector& q, const CouplingConstants& cc) {
  ChamberMargin out{std::numeric_limits<double>::infinity(), {}};
  auto consider = [&](double v, std::string name) {
    if (std::abs(v) < out.margin) out = {std::abs(v), std::move(name)};
  };
  const auto n = q.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n && cc.g_sq != 0.0; ++k) {
      consider(q(j) - q(k), "e" + std::to_string(j + 1) + "-e" + std::to_string(k + 1));
      consider(q(j) + q(k), "e" + std::to_string(j + 1) + "+e" + std::to_string(k + 1));
    }
    if (cc.g1_sq + 0.25 * cc.g2_sq != 0.0) consider(q(j), "e" + std::to_string(j + 1));
  }
  return out;
}

/// Max relative deviation between the analytic BC_n gradient and central
/// differences with step h.
inline double gradient_self_check(const RealVector& q, const CouplingConstants& cc, double h = 1e-5) {
  const RealVector grad = bcn_gradient(q, cc);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    RealVector qp = q, qm = q;
    qp(k) += h;
    qm(k) -= h;
    const double fd = (bcn_potential(qp, cc) - bcn_potential(qm, cc)) / (2 * h);
    worst = std::max(worst, std::abs(fd - grad(k)) / std::max(1.0, std::abs(grad(k))));
  }
  return worst;
}

/// Kick-drift-kick Stormer-Verlet for the BC_n Hamiltonian.
inline Trajectory sutherland_integrate(const RealVector& q0, const RealVector& p0,
                                       const CouplingConstants& cc, const IntegratorConfig& cfg) {
  if (q0.size() != p0.size()) throw DimensionError("sutherland_integrate: q0 and p0 differ in length");
  const auto m0 = bcn_chamber_margin(q0);
  if (m0.margin < cfg.regularity_floor)
    throw RegularityError("sutherland_integrate: initial q is not inside the chamber", m0.wall,
                          m0.margin, 0.0);
  if (const double dev = gradient_self_check(q0, cc); dev > 1e-6)
    throw FactorizationError("sutherland_integrate: analytic force disagrees with finite differences (" +
                             std::to_string(dev) + ")");

  Trajectory tr;
  tr.method = Method::Direct;
  tr.dt = cfg.dt;
  const double dt = cfg.dt;
  const std::size_t steps = cfg.steps();
  RealVector q = q0, p = p0;
  RealVector grad = bcn_gradient(q, cc);
  tr.push(0.0, q, p, bcn_hamiltonian(q, p, cc) + cc.energy_shift);
  for (std::size_t i = 1; i <= steps; ++i) {
    p -= 0.5 * dt * grad;
    q += dt * p;
    const double t = static_cast<double>(i) * dt;
    const auto margin = cfg.monitor_chamber ? bcn_chamber_margin(q) : bcn_singular_margin(q, cc);
    if (margin.margin < cfg.regularity_floor || !q.allFinite()) {
      tr.stop_time = t;
      tr.stop_reason = "wall " + margin.wall + " (margin " + std::to_string(margin.margin) + ")";
      break;
    }
    grad = bcn_gradient(q, cc);
    p -= 0.5 * dt * grad;
    tr.push(t, q, p, bcn_hamiltonian(q, p, cc) + cc.energy_shift);
  }
  return tr;
}

/// Representative of (q, p) in the chamber modulo signed permutations.
inline PhasePoint weyl_canonical(const RealVector& q, const RealVector& p) {
  const auto n = q.size();
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return std::abs(q(a)) > std::abs(q(b)); });
  PhasePoint out{RealVector(n), RealVector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sgn = q(order[i]) < 0 ? -1.0 : 1.0;
    out.q(i) = sgn * q(order[i]);
    out.p(i) = sgn * p(order[i]);
  }
  return out;
}

struct ComparisonReport {
  double max_dq = 0.0;
  double max_dp = 0.0;
  double energy_drift_a = 0.0;
  double energy_drift_b = 0.0;
  double stop_time = 0.0;   // last compared time
  std::size_t samples = 0;
  bool truncated = false;
};

/// Sample-wise comparison over the common prefix of two trajectories on the
/// same grid.
inline ComparisonReport compare_trajectories(const Trajectory& a, const Trajectory& b) {
  if (a.size() == 0 || b.size() == 0) throw DimensionError("compare_trajectories: empty trajectory");
  const std::size_t n = std::min(a.size(), b.size());
  ComparisonReport r;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-12 * std::max(1.0, std::abs(a.times[i])))
      throw DimensionError("compare_trajectories: time grids differ");
    if (a.q[i].size() != b.q[i].size()) throw DimensionError("compare_trajectories: dimension mismatch");
    r.max_dq = std::max(r.max_dq, max_abs(RealVector(a.q[i] - b.q[i])));
    r.max_dp = std::max(r.max_dp, max_abs(RealVector(a.p[i] - b.p[i])));
  }
  r.energy_drift_a = a.energy_drift();
  r.energy_drift_b = b.energy_drift();
  r.samples = n;
  r.stop_time = a.times[n - 1];
  r.truncated = !a.complete() || !b.complete();
  return r;
}

/// As compare_trajectories, but each sample of b is first mapped into the
/// chamber by the Weyl group (signed permutations).
inline ComparisonReport compare_modulo_weyl(const Trajectory& a, const Trajectory& b) {
  Trajectory bc = b;
  for (std::size_t i = 0; i < bc.size(); ++i) {
    auto c = weyl_canonical(b.q[i], b.p[i]);
    bc.q[i] = std::move(c.q);
    bc.p[i] = std::move(c.p);
  }
  return compare_trajectories(a, bc);
}

}  // namespace rlab
