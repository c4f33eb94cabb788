#include <doctest.h>

#include <cmath>

#include "chfem/diagnostics.hpp"
#include "chfem/errors.hpp"
#include "chfem/galerkin_periodic.hpp"
#include "chfem/projections.hpp"
#include "chfem/time_integration.hpp"

using namespace chfem;

TEST_SUITE_BEGIN("galerkin_periodic");

TEST_CASE("constant states are fixed points of both schemes") {
  const SplineSpace s = SplineSpace::periodic(32, 4, -2.0, 2.0);
  PeriodicGalerkin engine(s, default_rule(4));
  std::vector<double> c(s.dim(), 1.7), out(s.dim());
  engine.standard_rhs(c, out);
  for (double v : out) CHECK(std::abs(v) < 1e-12);
  engine.modified_rhs(c, c, out);
  for (double v : out) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("standard scheme rejects piecewise linears") {
  const SplineSpace s = SplineSpace::periodic(16, 2, 0.0, 1.0);
  PeriodicGalerkin engine(s, default_rule(2));
  std::vector<double> c(s.dim(), 0.0), out(s.dim());
  CHECK_THROWS_AS(engine.standard_rhs(c, out), Error);
}

TEST_CASE("velocity recovery: constants and the analytic Helmholtz pair") {
  const SplineSpace s = SplineSpace::periodic(64, 4, 0.0, 1.0);
  PeriodicGalerkin engine(s, default_rule(4));

  std::vector<double> m(s.dim(), 2.5), u(s.dim());
  engine.recover_velocity(m, u);
  for (double v : u) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));

  // m = (1 + 4 pi^2) sin(2 pi x)  =>  u = sin(2 pi x)
  FunctionHandle fm;
  const double amp = 1.0 + 4.0 * M_PI * M_PI;
  fm.value = [=](double x) { return amp * std::sin(2 * M_PI * x); };
  const CoefficientArray mh = l2_project(s, fm, engine.rule());
  CoefficientArray uh(s);
  engine.recover_velocity(mh.c, uh.c);
  const double err = norm_error(
      uh, [](double x) { return std::sin(2 * M_PI * x); },
      [](double x) { return 2 * M_PI * std::cos(2 * M_PI * x); }, NormKind::L2, false,
      engine.rule());
  CHECK(err < 5e-6);  // O(h^4) at h = 1/64
}

TEST_CASE("forward Helmholtz then recovery is the identity") {
  const SplineSpace s = SplineSpace::periodic(48, 3, -1.0, 1.0);
  PeriodicGalerkin engine(s, default_rule(3));
  CoefficientArray u(s);
  for (int i = 0; i < s.dim(); ++i) u.c[i] = std::cos(0.3 * i);
  // m defined by (m,phi) = A(u,phi)
  std::vector<double> m(s.dim());
  engine.h1().matvec(u.c.data(), m.data());
  engine.mass().solve_factored(m.data());
  std::vector<double> u2(s.dim());
  engine.recover_velocity(m, u2);
  for (int i = 0; i < s.dim(); ++i) CHECK(u2[i] == doctest::Approx(u.c[i]).epsilon(1e-10));
}

TEST_CASE("standard rhs is consistent with the travelling-wave ansatz") {
  // for the exact wave, u_t = -V u_x; the discrete rhs applied to the
  // projected profile must match -V d/dx(profile) to O(h^4)
  const WaveParams wp = WaveParams::from_speed(1.0, 4.0);
  ProfileSpec spec;
  spec.name = "smooth-tw";
  spec.kappa = 1.0;
  spec.V = 4.0;
  double errs[2];
  int idx = 0;
  for (int N : {250, 500}) {
    const SplineSpace s = SplineSpace::periodic(N, 4, -50.0, 50.0);
    PeriodicGalerkin engine(s, default_rule(4));
    const CoefficientArray uh = h1_project(s, make_profile(spec), engine.rule());
    CoefficientArray w(s);
    engine.standard_rhs(uh.c, w.c);
    const double err = norm_error(
        w, [&](double x) { return -4.0 * smooth_tw_profile_deriv(wp, x); },
        nullptr, NormKind::L2, false, engine.rule());
    errs[idx++] = err;
  }
  CHECK(errs[1] < errs[0] / 10.0);  // at least close to the 16x of O(h^4)
  CHECK(errs[1] < 1e-3);
}

TEST_CASE("modified rhs vanishes on constants via SimState wrapper") {
  const SplineSpace s = SplineSpace::periodic(24, 2, 0.0, 1.0);
  PeriodicGalerkin engine(s, default_rule(2));
  SimState st;
  st.scheme = Scheme::modified;
  st.primary = CoefficientArray(s, std::vector<double>(s.dim(), 3.0));
  st.velocity = CoefficientArray(s, std::vector<double>(s.dim(), 3.0));
  const CoefficientArray w = engine.modified_rhs(st);
  for (double v : w.c) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("stale velocity cache is rejected") {
  const SplineSpace s = SplineSpace::periodic(24, 3, 0.0, 1.0);
  PeriodicGalerkin engine(s, default_rule(3));
  SimState st;
  st.scheme = Scheme::modified;
  st.primary = CoefficientArray(s, std::vector<double>(s.dim(), 1.0));
  st.velocity = CoefficientArray(s, std::vector<double>(s.dim(), 2.0));  // wrong
  CHECK_THROWS_AS(engine.modified_rhs(st), Error);
}

TEST_CASE("cross-scheme agreement on a smooth run") {
  RunConfig cfg;
  cfg.scheme = Scheme::standard;
  cfg.r = 4;
  cfg.N = 256;
  cfg.a = -50;
  cfg.b = 50;
  cfg.profile.name = "smooth-tw";
  cfg.profile.kappa = 1.0;
  cfg.profile.V = 4.0;
  cfg.T = 0.5;
  cfg.dt = 100.0 / 256 / 10;
  const ReferenceSolution ref = *make_reference(cfg.profile, 100.0);
  const QuadratureRule rule = default_rule(4);

  const Trajectory t_std = evolve(cfg);
  cfg.scheme = Scheme::modified;
  const Trajectory t_mod = evolve(cfg);

  const CoefficientArray& u_std = t_std.last.primary;
  const CoefficientArray& u_mod = *t_mod.last.velocity;
  const double e_std = norm_error(u_std, ref, 0.5, NormKind::L2, true, rule);
  const double e_mod = norm_error(u_mod, ref, 0.5, NormKind::L2, true, rule);
  double diff2 = 0, norm2 = 0;
  const SplineSpace& s = *u_std.space;
  for (int e = 0; e < s.elements(); ++e)
    for (int q = 0; q < rule.n; ++q) {
      const double x = s.breakpoint(e) + 0.5 * (rule.nodes[q] + 1) * s.h();
      const double w = 0.5 * rule.weights[q] * s.h();
      const double d = eval_spline(u_std, x, 0) - eval_spline(u_mod, x, 0);
      const double v = ref.value(x, 0.5);
      diff2 += w * d * d;
      norm2 += w * v * v;
    }
  const double diff = std::sqrt(diff2 / norm2);
  CHECK(diff <= e_std + e_mod);
}

TEST_SUITE_END();
