#include "chfem/time_integration.hpp"

#include <algorithm>
#include <cmath>

#include "chfem/errors.hpp"

namespace chfem {

double nominal_speed(const RunConfig& cfg) {
  if (cfg.profile.name == "smooth-tw") return cfg.profile.V;
  if (cfg.profile.name == "peakon") {
    double vmax = cfg.profile.amplitudes.empty() ? 1.0 : 0.0;
    for (double c : cfg.profile.amplitudes) vmax = std::max(vmax, c);
    return vmax;
  }
  throw Error("nominal_speed: profile has no nominal wave speed; give dt instead of courant");
}

double resolve_dt(const RunConfig& cfg, double h) {
  if (cfg.dt && cfg.courant) throw Error("RunConfig: give exactly one of dt and courant");
  if (cfg.dt) {
    if (!(*cfg.dt > 0)) throw Error("RunConfig: dt must be positive");
    return *cfg.dt;
  }
  if (cfg.courant) {
    if (!(*cfg.courant > 0)) throw Error("RunConfig: courant must be positive");
    return *cfg.courant * h / nominal_speed(cfg);
  }
  throw Error("RunConfig: one of dt / courant is required");
}

SplineSpace build_space(const RunConfig& cfg) {
  if (cfg.N < 1) throw Error("RunConfig: N must be positive");
  if (cfg.scheme == Scheme::ibvp) {
    std::vector<double> bp;
    bp.reserve(cfg.N + 1);
    const double L = cfg.b - cfg.a;
    if (cfg.mesh == MeshKind::quasiuniform_alternating) {
      // element widths alternating h/2, 3h/2 with h = L/N
      if (cfg.N % 2 != 0) throw Error("quasiuniform-alternating mesh needs an even element count");
      const double h = L / cfg.N;
      bp.push_back(cfg.a);
      for (int e = 0; e < cfg.N; ++e) bp.push_back(bp.back() + (e % 2 == 0 ? 0.5 * h : 1.5 * h));
      bp.back() = cfg.b;
    } else {
      for (int i = 0; i <= cfg.N; ++i) bp.push_back(cfg.a + L * i / cfg.N);
    }
    return SplineSpace::dirichlet(std::move(bp), cfg.r);
  }
  if (cfg.mesh == MeshKind::quasiuniform_alternating)
    throw Error("quasiuniform meshes are only supported for the ibvp scheme");
  return SplineSpace::periodic(cfg.N, cfg.r, cfg.a, cfg.b);
}

void rk4_step_generic(std::vector<double>& y, double t, double dt,
                      const std::function<void(const std::vector<double>&, double,
                                               std::vector<double>&)>& rhs,
                      std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
                      std::vector<double>& k4, std::vector<double>& ytmp) {
  const size_t n = y.size();
  k1.resize(n);
  k2.resize(n);
  k3.resize(n);
  k4.resize(n);
  ytmp.resize(n);
  rhs(y, t, k1);
  for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * dt * k1[i];
  rhs(ytmp, t + 0.5 * dt, k2);
  for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * dt * k2[i];
  rhs(ytmp, t + 0.5 * dt, k3);
  for (size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt * k3[i];
  rhs(ytmp, t + dt, k4);
  for (size_t i = 0; i < n; ++i)
    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Scheme adapters: the ODE unknown, its rhs, and the velocity map.
struct SchemeOps {
  std::function<void(const std::vector<double>&, double, std::vector<double>&)> rhs;
  std::function<void(const std::vector<double>&, double, std::vector<double>&)> velocity;
  std::function<double(const std::vector<double>&, double)> h1_norm_of_velocity;
};

SchemeOps make_ops(Scheme scheme, const PeriodicGalerkin* pg, const DirichletGalerkin* dg,
                   const ForcingPair* forcing) {
  SchemeOps ops;
  static const ForcingPair no_forcing{};
  const ForcingPair* fp = forcing ? forcing : &no_forcing;
  switch (scheme) {
    case Scheme::standard:
      ops.rhs = [pg](const std::vector<double>& y, double, std::vector<double>& out) {
        pg->standard_rhs(y, out);
      };
      ops.velocity = [](const std::vector<double>& y, double, std::vector<double>& u) { u = y; };
      ops.h1_norm_of_velocity = [pg](const std::vector<double>& y, double) {
        return pg->h1_norm(y);
      };
      break;
    case Scheme::modified:
      ops.rhs = [pg](const std::vector<double>& y, double, std::vector<double>& out) {
        std::vector<double> u(y.size());
        pg->recover_velocity(y, u);
        pg->modified_rhs(y, u, out);
      };
      ops.velocity = [pg](const std::vector<double>& y, double, std::vector<double>& u) {
        u.resize(y.size());
        pg->recover_velocity(y, u);
      };
      ops.h1_norm_of_velocity = [pg](const std::vector<double>& y, double) {
        std::vector<double> u(y.size());
        pg->recover_velocity(y, u);
        return pg->h1_norm(u);
      };
      break;
    case Scheme::ibvp:
      ops.rhs = [dg, fp](const std::vector<double>& y, double t, std::vector<double>& out) {
        std::vector<double> u(y.size());
        dg->recover_velocity(y, t, *fp, u);
        dg->rhs(y, u, t, *fp, out);
      };
      ops.velocity = [dg, fp](const std::vector<double>& y, double t, std::vector<double>& u) {
        u.resize(y.size());
        dg->recover_velocity(y, t, *fp, u);
      };
      ops.h1_norm_of_velocity = [dg, fp](const std::vector<double>& y, double t) {
        std::vector<double> u(y.size());
        dg->recover_velocity(y, t, *fp, u);
        return dg->h1_norm(u);
      };
      break;
  }
  return ops;
}

}  // namespace

SimState rk4_step(const SimState& state, double dt, const PeriodicGalerkin& engine) {
  if (state.scheme == Scheme::ibvp) throw Error("rk4_step: ibvp state with a periodic engine");
  SchemeOps ops = make_ops(state.scheme, &engine, nullptr, nullptr);
  SimState out = state;
  std::vector<double> k1, k2, k3, k4, ytmp;
  std::vector<double> y = state.primary.c;
  rk4_step_generic(y, state.t, dt, ops.rhs, k1, k2, k3, k4, ytmp);
  if (!all_finite(y)) throw Error("rk4_step: non-finite state after step (instability)");
  out.t = state.t + dt;
  out.primary.c = std::move(y);
  if (state.scheme == Scheme::modified) {
    CoefficientArray u(engine.space());
    engine.recover_velocity(out.primary.c, u.c);
    out.velocity = std::move(u);
  }
  return out;
}

SimState rk4_step(const SimState& state, double dt, const DirichletGalerkin& engine,
                  const ForcingPair& forcing) {
  if (state.scheme != Scheme::ibvp) throw Error("rk4_step: non-ibvp state with a dirichlet engine");
  SchemeOps ops = make_ops(state.scheme, nullptr, &engine, &forcing);
  SimState out = state;
  std::vector<double> k1, k2, k3, k4, ytmp;
  std::vector<double> y = state.primary.c;
  rk4_step_generic(y, state.t, dt, ops.rhs, k1, k2, k3, k4, ytmp);
  if (!all_finite(y)) throw Error("rk4_step: non-finite state after step (instability)");
  out.t = state.t + dt;
  out.primary.c = std::move(y);
  CoefficientArray u(engine.space());
  engine.recover_velocity(out.primary.c, out.t, forcing, u.c);
  out.velocity = std::move(u);
  return out;
}

Trajectory evolve(const RunConfig& cfg, const std::vector<CheckpointHook>& hooks,
                  bool store_states, const ForcingPair* forcing) {
  if (cfg.T < 0) throw Error("RunConfig: T must be nonnegative");
  auto space_owner = std::make_shared<SplineSpace>(build_space(cfg));
  const SplineSpace& space = *space_owner;
  const QuadratureRule rule = cfg.quad_n ? gauss_legendre(*cfg.quad_n) : default_rule(cfg.r);
  const double dt = cfg.T > 0 ? resolve_dt(cfg, space.h()) : 1.0;

  std::optional<PeriodicGalerkin> pg;
  std::optional<DirichletGalerkin> dg;
  SimState state;
  state.t = 0;
  state.scheme = cfg.scheme;
  if (cfg.scheme == Scheme::ibvp) {
    dg.emplace(space, rule);
    ManufacturedSolution ms;
    FunctionHandle u0 =
        cfg.profile.name == "manufactured-ibvp" ? ms.initial() : make_profile(cfg.profile);
    state = dg->initial(u0);
  } else {
    pg.emplace(space, rule, cfg.k);
    FunctionHandle u0 = make_profile(cfg.profile);
    CoefficientArray uh = project(space, u0, rule, cfg.projection);
    if (cfg.scheme == Scheme::standard) {
      state.primary = std::move(uh);
    } else {
      // m from the compatibility relation (m,phi) = A(u,phi), so the pair
      // satisfies the discrete Helmholtz identity exactly at t = 0.
      CoefficientArray m(space);
      pg->h1().matvec(uh.c.data(), m.c.data());
      pg->mass().solve_factored(m.c);
      state.primary = std::move(m);
      state.velocity = std::move(uh);
    }
  }

  static const ForcingPair no_forcing{};
  const ForcingPair* fp = forcing ? forcing : &no_forcing;
  if (cfg.scheme == Scheme::ibvp && cfg.profile.name == "manufactured-ibvp" && !forcing) {
    static const ManufacturedSolution ms{};
    static const ForcingPair ms_forcing = ms.forcing();
    fp = &ms_forcing;
  }
  SchemeOps ops = make_ops(cfg.scheme, pg ? &*pg : nullptr, dg ? &*dg : nullptr, fp);

  Trajectory traj;
  traj.space = space_owner;
  traj.dt = dt;
  const double norm0 = ops.h1_norm_of_velocity(state.primary.c, 0.0);

  std::vector<double> checkpoints = cfg.checkpoint_times;
  if (checkpoints.empty()) checkpoints = {0.0, cfg.T};
  std::sort(checkpoints.begin(), checkpoints.end());
  for (double c : checkpoints)
    if (c < -1e-12 || c > cfg.T * (1 + 1e-12) + 1e-12)
      throw Error("RunConfig: checkpoint times must lie within [0,T]");
  if (checkpoints.front() > 0.0) checkpoints.insert(checkpoints.begin(), 0.0);
  if (checkpoints.back() < cfg.T) checkpoints.push_back(cfg.T);

  auto emit = [&](const SimState& s) {
    for (const auto& hook : hooks) hook(s);
    if (store_states) traj.states.push_back(s);
    traj.last = s;
  };
  auto with_velocity = [&](SimState& s) {
    if (cfg.scheme != Scheme::standard) {
      std::vector<double> u;
      ops.velocity(s.primary.c, s.t, u);
      s.velocity = CoefficientArray(space, std::move(u));
    }
  };

  with_velocity(state);
  emit(state);
  if (cfg.T == 0) return traj;

  std::vector<double> k1, k2, k3, k4, ytmp;
  int step = 0;
  const double eps = 1e-9 * dt;
  for (size_t cp = 1; cp < checkpoints.size(); ++cp) {
    const double target = checkpoints[cp];
    if (target <= state.t + eps) continue;
    const double seg_start = state.t;
    const int full_steps = static_cast<int>(std::floor((target - seg_start) / dt + 1e-9));
    for (int i = 0; i < full_steps + 1; ++i) {
      double step_dt;
      if (i < full_steps)
        step_dt = dt;
      else {
        step_dt = target - state.t;  // remainder step to land on the checkpoint
        if (step_dt <= eps) break;
      }
      rk4_step_generic(state.primary.c, state.t, step_dt, ops.rhs, k1, k2, k3, k4, ytmp);
      state.t = (i < full_steps) ? seg_start + (i + 1) * dt : target;
      ++step;
      if (!all_finite(state.primary.c) ||
          !(ops.h1_norm_of_velocity(state.primary.c, state.t) <= 10.0 * norm0)) {
        traj.status = RunStatus::instability;
        traj.abort_step = step;
        traj.abort_time = state.t;
        traj.steps_taken = step;
        return traj;
      }
    }
    state.t = target;
    with_velocity(state);
    emit(state);
  }
  traj.steps_taken = step;
  return traj;
}

double stability_probe(const RunConfig& tmpl, std::vector<double> courant_grid) {
  if (courant_grid.empty()) throw Error("stability_probe: empty grid");
  for (size_t i = 1; i < courant_grid.size(); ++i)
    if (!(courant_grid[i] > courant_grid[i - 1]))
      throw Error("stability_probe: grid must be strictly increasing");

  auto stable = [&](double courant) {
    RunConfig cfg = tmpl;
    cfg.dt.reset();
    cfg.courant = courant;
    cfg.checkpoint_times = {0.0, cfg.T};
    Trajectory t = evolve(cfg);
    return t.status == RunStatus::ok;
  };

  double lo = -1, hi = -1;  // largest stable / smallest unstable
  for (double c : courant_grid) {
    if (stable(c))
      lo = c;
    else {
      hi = c;
      break;
    }
  }
  if (lo < 0) return courant_grid.front();  // nothing stable: lower grid bound
  if (hi < 0) return courant_grid.back();   // everything stable: upper grid bound
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace chfem
