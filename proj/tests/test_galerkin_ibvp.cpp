#include <doctest.h>

#include <cmath>

#include "chfem/diagnostics.hpp"
#include "chfem/errors.hpp"
#include "chfem/galerkin_ibvp.hpp"
#include "chfem/time_integration.hpp"

using namespace chfem;

namespace {

SplineSpace uniform_dirichlet(int N, int r) {
  std::vector<double> bp;
  for (int i = 0; i <= N; ++i) bp.push_back(double(i) / N);
  return SplineSpace::dirichlet(std::move(bp), r);
}

}  // namespace

TEST_SUITE_BEGIN("galerkin_ibvp");

TEST_CASE("zero state, zero forcing: zero rhs") {
  const SplineSpace s = uniform_dirichlet(16, 2);
  DirichletGalerkin engine(s, default_rule(2));
  std::vector<double> m(s.dim(), 0.0), u(s.dim(), 0.0), out(s.dim());
  engine.rhs(m, u, 0.0, ForcingPair{}, out);
  for (double v : out) CHECK(v == 0.0);

  FunctionHandle zero;
  zero.value = [](double) { return 0.0; };
  zero.deriv = [](double) { return 0.0; };
  zero.deriv2 = [](double) { return 0.0; };
  const SimState st = engine.initial(zero);
  for (double v : st.primary.c) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("manufactured profile satisfies all boundary conditions") {
  const ManufacturedSolution ms;
  for (double t : {0.0, 0.7, 1.0}) {
    CHECK(std::abs(ms.u(0.0, t)) < 1e-12);
    CHECK(std::abs(ms.u(1.0, t)) < 1e-12);
    CHECK(std::abs(ms.m(0.0, t)) < 1e-12);
    CHECK(std::abs(ms.m(1.0, t)) < 1e-12);
  }
  // m = u - u_xx by finite differences
  const double h = 1e-5;
  for (double x : {0.2, 0.5, 0.8}) {
    const double uxx = (ms.u(x + h, 0.3) - 2 * ms.u(x, 0.3) + ms.u(x - h, 0.3)) / (h * h);
    CHECK(ms.m(x, 0.3) == doctest::Approx(ms.u(x, 0.3) - uxx).epsilon(1e-5));
  }
  // g_m is the residual of the transport equation (finite-difference check)
  for (double x : {0.3, 0.6}) {
    const double t = 0.4;
    const double mt = (ms.m(x, t + h) - ms.m(x, t - h)) / (2 * h);
    const double resid = mt + ms.u(x, t) * ms.mx(x, t) + 2 * ms.ux(x, t) * ms.m(x, t);
    CHECK(ms.g_m(x, t) == doctest::Approx(resid).epsilon(1e-8));
  }
}

TEST_CASE("initialization: m is the projected Helmholtz image of u0") {
  // u0 = sin(pi x): m0 = (1 + pi^2) sin(pi x)
  FunctionHandle u0;
  u0.value = [](double x) { return std::sin(M_PI * x); };
  u0.deriv = [](double x) { return M_PI * std::cos(M_PI * x); };
  u0.deriv2 = [](double x) { return -M_PI * M_PI * std::sin(M_PI * x); };
  std::vector<double> errs, hs;
  for (int N : {32, 64, 128}) {
    const SplineSpace s = uniform_dirichlet(N, 2);
    DirichletGalerkin engine(s, default_rule(2));
    const SimState st = engine.initial(u0);
    const double amp = 1.0 + M_PI * M_PI;
    errs.push_back(norm_error(
        st.primary, [=](double x) { return amp * std::sin(M_PI * x); },
        [=](double x) { return amp * M_PI * std::cos(M_PI * x); }, NormKind::L2, false,
        engine.rule()));
    hs.push_back(1.0 / N);
  }
  const std::vector<double> rates = convergence_rates(errs, hs);
  CHECK(std::abs(rates.back() - 2.0) < 0.1);
}

TEST_CASE("boundary-violating initial data is rejected") {
  const SplineSpace s = uniform_dirichlet(16, 2);
  DirichletGalerkin engine(s, default_rule(2));
  FunctionHandle bad;
  bad.value = [](double x) { return std::cos(M_PI * x); };
  bad.deriv = [](double x) { return -M_PI * std::sin(M_PI * x); };
  bad.deriv2 = [](double x) { return -M_PI * M_PI * std::cos(M_PI * x); };
  CHECK_THROWS_AS(engine.initial(bad), Error);
}

TEST_CASE("uniform-mesh manufactured rates are r for both m and u") {
  RunConfig cfg;
  cfg.scheme = Scheme::ibvp;
  cfg.r = 2;
  cfg.a = 0;
  cfg.b = 1;
  cfg.mesh = MeshKind::uniform;
  cfg.profile.name = "manufactured-ibvp";
  cfg.T = 0.4;
  const ManufacturedSolution ms;
  std::vector<double> em, eu, hs;
  for (int N : {64, 128, 256}) {
    cfg.N = N;
    cfg.dt = 0.1 / N;
    const Trajectory traj = evolve(cfg);
    REQUIRE(traj.status == RunStatus::ok);
    const QuadratureRule rule = default_rule(2);
    const double T = cfg.T;
    eu.push_back(norm_error(
        *traj.last.velocity, [&](double x) { return ms.u(x, T); },
        [&](double x) { return ms.ux(x, T); }, NormKind::L2, false, rule));
    em.push_back(norm_error(
        traj.last.primary, [&](double x) { return ms.m(x, T); },
        [&](double x) { return ms.mx(x, T); }, NormKind::L2, false, rule));
    hs.push_back(1.0 / N);
  }
  CHECK(std::abs(convergence_rates(eu, hs).back() - 2.0) < 0.25);
  CHECK(std::abs(convergence_rates(em, hs).back() - 2.0) < 0.35);
}

TEST_CASE("boundary values stay zero along a run") {
  RunConfig cfg;
  cfg.scheme = Scheme::ibvp;
  cfg.r = 4;
  cfg.N = 32;
  cfg.a = 0;
  cfg.b = 1;
  cfg.mesh = MeshKind::quasiuniform_alternating;
  cfg.profile.name = "manufactured-ibvp";
  cfg.T = 0.5;
  cfg.dt = 1.0 / 320;
  cfg.checkpoint_times = {0.0, 0.25, 0.5};
  std::vector<CheckpointHook> hooks;
  hooks.push_back([](const SimState& st) {
    CHECK(std::abs(eval_spline(*st.velocity, 0.0, 0)) < 1e-12);
    CHECK(std::abs(eval_spline(*st.velocity, 1.0, 0)) < 1e-12);
    CHECK(std::abs(eval_spline(st.primary, 0.0, 0)) < 1e-12);
    CHECK(std::abs(eval_spline(st.primary, 1.0, 0)) < 1e-12);
  });
  const Trajectory traj = evolve(cfg, hooks);
  CHECK(traj.status == RunStatus::ok);
}

TEST_CASE("zero-valued forcing handles reproduce the unforced scheme") {
  const SplineSpace s = uniform_dirichlet(24, 2);
  DirichletGalerkin engine(s, default_rule(2));
  const ManufacturedSolution ms;
  const SimState st = engine.initial(ms.initial());
  ForcingPair zero;
  zero.g_m = [](double, double) { return 0.0; };
  zero.g_u = [](double, double) { return 0.0; };
  std::vector<double> a(s.dim()), b(s.dim());
  engine.rhs(st.primary.c, st.velocity->c, 0.0, ForcingPair{}, a);
  engine.rhs(st.primary.c, st.velocity->c, 0.0, zero, b);
  for (int i = 0; i < s.dim(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_SUITE_END();
