#include <gtest/gtest.h>

#include <cmath>

#include "rlab/lax.hpp"

using namespace rlab;

namespace {

RealVector vec(std::initializer_list<double> v) {
  RealVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

const RealVector kQ0 = vec({1.0, 0.4});
const RealVector kP0 = vec({0.3, -0.2});

IntegratorConfig window(double t_max) {
  IntegratorConfig c;
  c.t_max = t_max;
  return c;
}

}  // namespace

TEST(LaxMatrix, ZeroSpinsGiveEmbeddedMomentum) {
  const Signature sig(3, 2);
  const RootSystemData rsd = build_root_system(sig);
  const OrbitPoint zero(AlgebraElement::zero(sig));
  const ReducedPoint pt(CartanVector(sig, kQ0), vec({0.7, -0.25}), zero, zero);
  const LaxMatrix l = lax_matrix(pt, 0.0, Side::Left, rsd);
  EXPECT_LE(max_abs(ComplexMatrix(l.mat.mat() - embed_cartan(CartanVector(sig, pt.p)).mat())), 1e-15);
  const SpectralSample s = spectral_invariants(l);
  const RealVector expected = vec({-0.7, -0.25, 0.0, 0.25, 0.7});
  EXPECT_LE(max_abs(RealVector(s.spectrum - expected)), 1e-14);
  EXPECT_LE(max_abs(RealVector(s.eigenvalues.real() - expected)), 1e-14);
  EXPECT_LE(max_abs(RealVector(s.eigenvalues.imag())), 1e-14);
}

TEST(LaxMatrix, LinearInSpectralParameter) {
  const CaseSetup s = sun1n_setup(2, 3.0, 0.2, 0.1);
  const RootSystemData rsd = build_root_system(s.sig);
  const ReducedPoint pt = make_point(s, kQ0, kP0);
  for (Side side : {Side::Left, Side::Right}) {
    const OrbitPoint& xi = side == Side::Left ? s.xi_l : s.xi_r;
    const ComplexMatrix a = lax_matrix(pt, 0.7, side, rsd).mat.mat();
    const ComplexMatrix b = lax_matrix(pt, -1.3, side, rsd).mat.mat();
    EXPECT_LE(max_abs(ComplexMatrix(a - b - (-1.3 - 0.7) * xi.xi.mat())), 1e-13);
    EXPECT_LE(std::abs(a.trace()), 1e-13);
  }
}

TEST(LaxMatrix, PartsRecoverMomentumAndSpin) {
  const CaseSetup s = sumn_setup(4, 2, 2.0, 0.1);
  const RootSystemData rsd = build_root_system(s.sig);
  const ReducedPoint pt = make_point(s, kQ0, kP0);
  const double v = 0.7;
  const PlusMinus left = split_pm(lax_matrix(pt, v, Side::Left, rsd).mat);
  EXPECT_LE(max_abs(ComplexMatrix(left.minus.mat() - split_pm(solve_constraint(pt, rsd)).minus.mat())), 1e-12);
  EXPECT_LE(max_abs(ComplexMatrix(left.plus.mat() + v * s.xi_l.xi.mat())), 1e-12);
  const PlusMinus right = split_pm(lax_matrix(pt, v, Side::Right, rsd).mat);
  EXPECT_LE(max_abs(ComplexMatrix(right.minus.mat() - split_pm(slice_right_momentum(pt, rsd)).minus.mat())), 1e-12);
  EXPECT_LE(max_abs(ComplexMatrix(right.plus.mat() + v * s.xi_r.xi.mat())), 1e-12);
}

TEST(SpectralInvariants, TraceMatchesEigenvalues) {
  const CaseSetup s = sun1n_setup(2, 3.0, 0.2, 0.1);
  const RootSystemData rsd = build_root_system(s.sig);
  const SpectralSample sp = spectral_invariants(lax_matrix(make_point(s, kQ0, kP0), 0.7, Side::Left, rsd));
  Complex sum2 = 0.0, sum4 = 0.0;
  for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
    sum2 += std::pow(sp.eigenvalues(i), 2);
    sum4 += std::pow(sp.eigenvalues(i), 4);
  }
  EXPECT_NEAR(sum2.real(), sp.tr2, 1e-11 * std::max(1.0, std::abs(sp.tr2)));
  EXPECT_NEAR(sum4.real(), sp.tr4, 1e-10 * std::max(1.0, std::abs(sp.tr4)));
}

TEST(SpectralInvariants, InvariantUnderCompactConjugation) {
  Rng rng(1);
  const CaseSetup s = sumn_setup(4, 2, 2.0, 0.1);
  const RootSystemData rsd = build_root_system(s.sig);
  const LaxMatrix l = lax_matrix(make_point(s, kQ0, kP0), -1.3, Side::Right, rsd);
  const SpectralSample a = spectral_invariants(l);
  for (int i = 0; i < 10; ++i) {
    const GroupElement k = random_compact(s.sig, rng);
    const SpectralSample b = spectral_invariants({l.side, l.v, conjugate(k, l.mat)});
    EXPECT_LE(max_abs(RealVector(a.spectrum - b.spectrum)), 1e-12);
    EXPECT_NEAR(a.tr6, b.tr6, 1e-10 * std::max(1.0, std::abs(a.tr6)));
  }
}

TEST(SpectralInvariants, RejectsNonMember) {
  const Signature sig(2, 2);
  ComplexMatrix x = ComplexMatrix::Zero(4, 4);
  x(0, 0) = 1.0;
  x(1, 1) = -1.0;
  EXPECT_THROW(spectral_invariants({Side::Left, 0.0, AlgebraElement(sig, x)}), DomainError);
}

TEST(InvariantDrift, StandardRunIsIsospectral) {
  const CaseSetup s = sunn_setup(2, 2.0, 0.7, 0.3);
  const RootSystemData rsd = build_root_system(s.sig);
  for (Side side : {Side::Left, Side::Right})
    for (double v : {0.0, 0.7, -1.3}) {
      SpectralRecord rec;
      const DriftReport r = invariant_drift(make_point(s, kQ0, kP0), window(1.0), v, side, rsd, 3, 1e-4, &rec);
      EXPECT_LE(r.max_drift, 1e-6) << to_string(side) << " " << v;
      EXPECT_LE(r.max_trace_drift, 1e-6);
      EXPECT_LE(r.fit_residual, 1e-6) << to_string(side) << " " << v;
      EXPECT_EQ(r.fit_times.size(), 3u);
      EXPECT_EQ(rec.samples.size(), r.samples);
      EXPECT_FALSE(r.stop_time.has_value());
    }
}

TEST(InvariantDrift, FreeCaseHasNoDrift) {
  const Signature sig(2, 2);
  const RootSystemData rsd = build_root_system(sig);
  const OrbitPoint zero(AlgebraElement::zero(sig));
  const ReducedPoint pt(CartanVector(sig, vec({1.5, 0.6})), vec({0.3, 0.1}), zero, zero);
  const DriftReport r = invariant_drift(pt, window(1.0), 0.7, Side::Left, rsd, 2);
  EXPECT_LE(r.max_drift, 1e-12);
  EXPECT_LE(r.fit_residual, 1e-10);
  for (const auto& y : r.y_m) EXPECT_LE(max_abs(y), 1e-8);
}

TEST(InvariantDrift, WrongCouplingShowsUpOnDirectRoute) {
  const CaseSetup s = sunn_setup(2, 2.0, 0.7, 0.3);
  const RootSystemData rsd = build_root_system(s.sig);
  const ReducedPoint base = make_point(s, kQ0, kP0);
  CouplingConstants wrong = s.cc;
  wrong.g_sq *= 1.01;
  const double good = trajectory_drift(sutherland_integrate(kQ0, kP0, s.cc, window(2.0)), base, 0.7, Side::Left, rsd);
  const double bad = trajectory_drift(sutherland_integrate(kQ0, kP0, wrong, window(2.0)), base, 0.7, Side::Left, rsd);
  EXPECT_GT(bad, 1e-3);
  EXPECT_GT(bad, 100 * good);
  const DriftReport proj = invariant_drift(base, window(2.0), 0.7, Side::Left, rsd, 0);
  EXPECT_LE(proj.max_drift, 1e-6);
}

TEST(LaxFit, StandardPointResidual) {
  const CaseSetup s = sunn_setup(2, 2.0, 0.7, 0.3);
  const RootSystemData rsd = build_root_system(s.sig);
  const ReducedPoint pt = make_point(s, kQ0, kP0);
  const GeodesicProjector proj(pt, rsd);
  for (Side side : {Side::Left, Side::Right}) {
    const LaxFit f = fit_lax_partner(proj, pt, 0.2, 0.7, side, rsd, 1e-4);
    EXPECT_LE(f.residual, 1e-6) << to_string(side);
    EXPECT_LE(f.y.membership_residual(), 1e-10);
  }
}

// The post-fit residual is the central-difference error in L', so it must
// shrink by 4 when the step is halved, on every setup and both sides.
TEST(LaxFit, ResidualIsSecondOrderInStep) {
  for (const CaseSetup& s : {sunn_setup(2, 2.0, 0.7, 0.3), sun1n_setup(2, 3.0, 0.2, 0.1), sumn_setup(4, 2, 2.0, 0.1)}) {
    const RootSystemData rsd = build_root_system(s.sig);
    const ReducedPoint pt = make_point(s, kQ0, kP0);
    const GeodesicProjector proj(pt, rsd);
    for (Side side : {Side::Left, Side::Right}) {
      const LaxFit a = fit_lax_partner(proj, pt, 0.2, 0.7, side, rsd, 1e-4);
      const LaxFit b = fit_lax_partner(proj, pt, 0.2, 0.7, side, rsd, 5e-5);
      EXPECT_NEAR(a.residual / b.residual, 4.0, 0.05) << to_string(s.kind) << " " << to_string(side);
      EXPECT_LE(a.residual, 1e-5 * a.rhs_scale);
      EXPECT_LE(a.condition, kMaxFitCondition);
    }
  }
}

TEST(LaxFit, IllConditionedFitIsReported) {
  const CaseSetup s = sun1n_setup(2, 3.0, 0.2, 0.1);
  const RootSystemData rsd = build_root_system(s.sig);
  const ReducedPoint pt = make_point(s, kQ0, kP0);
  const GeodesicProjector proj(pt, rsd);
  const LaxFit f = fit_lax_partner(proj, pt, 0.2, 0.7, Side::Right, rsd);
  EXPECT_GT(f.condition, 1.2);
  EXPECT_THROW(fit_lax_partner(proj, pt, 0.2, 0.7, Side::Right, rsd, 1e-4, kDefaultRegularity, 1.2),
               ConditioningError);
}

TEST(PoissonBracket, CanonicalPairs) {
  const Observable q1 = [](const RealVector& q, const RealVector&) { return q(0); };
  const Observable p1 = [](const RealVector&, const RealVector& p) { return p(0); };
  const Observable p2 = [](const RealVector&, const RealVector& p) { return p(1); };
  EXPECT_NEAR(poisson_bracket_fd(q1, p1, kQ0, kP0, 1e-4).value, 1.0, 1e-9);
  EXPECT_NEAR(poisson_bracket_fd(q1, p2, kQ0, kP0, 1e-4).value, 0.0, 1e-9);
  EXPECT_THROW(poisson_bracket_fd(q1, p1, kQ0, vec({1.0}), 1e-4), DimensionError);
  EXPECT_THROW(poisson_bracket_fd(q1, p1, kQ0, kP0, 0.0), DomainError);
}

TEST(PoissonBracket, HamiltonianWithItself) {
  const CaseSetup s = sunn_setup(2, 2.0, 0.7, 0.3);
  const Observable h = [&](const RealVector& q, const RealVector& p) { return bcn_hamiltonian(q, p, s.cc); };
  EXPECT_LE(std::abs(poisson_bracket_fd(h, h, kQ0, kP0, 1e-5).value), 1e-12);
}

TEST(PoissonBracket, TracesOfLaxPowersAreInInvolution) {
  Rng rng(2);
  const CaseSetup s = sunn_setup(2, 2.0, 0.7, 0.3);
  const RootSystemData rsd = build_root_system(s.sig);
  const ReducedPoint base = make_point(s, kQ0, kP0);
  const Observable f = trace_power_observable(base, 0.7, 2, Side::Left, rsd);
  const Observable g = trace_power_observable(base, -1.3, 4, Side::Left, rsd);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const RealVector q = sample_chamber(2, rng, 0.3, 2.0, 0.15);
    const RealVector p = sample_momenta(2, rng);
    worst = std::max(worst, std::abs(poisson_bracket_fd(f, g, q, p, 1e-5).value));
  }
  EXPECT_LE(worst, 1e-6);
}

// Same observables with a coarse step: the estimate falls as h^2 and the
// Richardson combination removes it.
TEST(PoissonBracket, InvolutionResidualIsTruncationError) {
  Rng rng(2);
  const CaseSetup s = sunn_setup(2, 2.0, 0.7, 0.3);
  const RootSystemData rsd = build_root_system(s.sig);
  const ReducedPoint base = make_point(s, kQ0, kP0);
  const Observable f = trace_power_observable(base, 0.7, 2, Side::Left, rsd);
  const Observable g = trace_power_observable(base, -1.3, 4, Side::Left, rsd);
  for (int i = 0; i < 20; ++i) {
    const RealVector q = sample_chamber(2, rng, 0.3, 2.0, 0.15);
    const RealVector p = sample_momenta(2, rng);
    const BracketEstimate e = poisson_bracket_fd(f, g, q, p, 1e-3, 1.0);
    EXPECT_NEAR(e.value / e.halved, 4.0, 0.01);
    EXPECT_LE(std::abs(e.extrapolated), 1e-9 * e.scale);
  }
}

TEST(PoissonBracket, NonCommutingObservablesAreDetected) {
  // control: tr L^2 against q1 does not vanish
  const CaseSetup s = sunn_setup(2, 2.0, 0.7, 0.3);
  const RootSystemData rsd = build_root_system(s.sig);
  const Observable f = trace_power_observable(make_point(s, kQ0, kP0), 0.7, 2, Side::Left, rsd);
  const Observable q1 = [](const RealVector& q, const RealVector&) { return q(0); };
  EXPECT_GT(std::abs(poisson_bracket_fd(f, q1, kQ0, kP0, 1e-5).value), 0.1);
}

TEST(PoissonBracket, TinyStepIsDiagnosed) {
  const CaseSetup s = sunn_setup(2, 2.0, 0.7, 0.3);
  const RootSystemData rsd = build_root_system(s.sig);
  const ReducedPoint base = make_point(s, kQ0, kP0);
  const Observable f = trace_power_observable(base, 0.7, 2, Side::Left, rsd);
  const Observable g = trace_power_observable(base, -1.3, 4, Side::Left, rsd);
  EXPECT_THROW(poisson_bracket_fd(f, g, kQ0, kP0, 1e-13), ConditioningError);
}
