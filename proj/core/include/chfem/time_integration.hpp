#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chfem/exact_solutions.hpp"
#include "chfem/galerkin_ibvp.hpp"
#include "chfem/galerkin_periodic.hpp"

namespace chfem {

enum class MeshKind { uniform, quasiuniform_alternating };

// Description of one simulation: space, scheme, initial profile, time
// stepping. Fully deterministic; no random state anywhere.
struct RunConfig {
  Scheme scheme = Scheme::standard;
  int r = 4;
  int N = 0;
  double a = 0, b = 1;
  MeshKind mesh = MeshKind::uniform;
  ProfileSpec profile;
  double T = 0;
  std::optional<double> dt;       // exactly one of dt / courant
  std::optional<double> courant;  // V dt / h with V the nominal wave speed
  double tau = 1.0;               // indicator speed-smoothing window
  ProjectionKind projection = ProjectionKind::h1;
  std::optional<int> quad_n;
  double k = 0.0;
  std::vector<double> checkpoint_times;  // defaults to {0, T}
};

// Nominal wave speed of the configured profile (peakon max amplitude, smooth
// wave V); throws if courant-based stepping is requested without one.
double nominal_speed(const RunConfig& cfg);
double resolve_dt(const RunConfig& cfg, double h);
SplineSpace build_space(const RunConfig& cfg);

enum class RunStatus { ok, instability };

struct Trajectory {
  RunStatus status = RunStatus::ok;
  int abort_step = -1;
  double abort_time = 0;
  double dt = 0;
  int steps_taken = 0;
  std::shared_ptr<const SplineSpace> space;  // owns the space the states reference
  SimState last;                             // last finite checkpoint state
  std::vector<SimState> states;              // all checkpoints when store_states
};

using CheckpointHook = std::function<void(const SimState&)>;

// Classical four-stage RK4 step (weights 1/6,1/3,1/3,1/6, nodes 0,1/2,1/2,1).
// System schemes re-run the velocity recovery at every stage evaluation.
// Throws Error if the stepped state is non-finite.
SimState rk4_step(const SimState& state, double dt, const PeriodicGalerkin& engine);
SimState rk4_step(const SimState& state, double dt, const DirichletGalerkin& engine,
                  const ForcingPair& forcing = {});

// Generic RK4 stage driver for plain ODE systems (used by the schemes and by
// scalar test problems). rhs(y, t, dydt).
void rk4_step_generic(std::vector<double>& y, double t, double dt,
                      const std::function<void(const std::vector<double>&, double,
                                               std::vector<double>&)>& rhs,
                      std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
                      std::vector<double>& k4, std::vector<double>& ytmp);

// Integrates the configured problem to T, invoking the registered hooks at
// every checkpoint. A run is aborted (status = instability) when a
// coefficient turns non-finite or the H1 norm of the velocity exceeds ten
// times its initial value; the last finite checkpoint is retained.
Trajectory evolve(const RunConfig& cfg, const std::vector<CheckpointHook>& hooks = {},
                  bool store_states = false, const ForcingPair* forcing = nullptr);

// Largest courant value on the grid whose run stays stable to T, refined by
// bisection between the stability boundary grid points to resolution 0.01.
// Returns the grid bounds when every (or no) point is stable.
double stability_probe(const RunConfig& tmpl, std::vector<double> courant_grid);

}  // namespace chfem
