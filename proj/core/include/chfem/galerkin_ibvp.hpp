#pragma once

#include <functional>
#include <span>

#include "chfem/galerkin_periodic.hpp"
#include "chfem/projections.hpp"

namespace chfem {

// Optional sources for the Dirichlet system scheme: g_m is added to the
// right-hand side of the transport equation for m, g_u to the velocity
// recovery. Null members reproduce the unforced scheme exactly.
struct ForcingPair {
  std::function<double(double, double)> g_m;  // (x, t)
  std::function<double(double, double)> g_u;
};

// Semidiscretization of the homogeneous-Dirichlet system on a (quasi)uniform
// mesh:  (m, phi) = A(u, phi),  (m_t, chi) = -(u m_x, chi) - 2(u_x m, chi) + (g_m, chi).
// Assembly and solves run in extended precision: the refinement study drives
// u errors to the 1e-12 scale, below the double rounding floor of the H1
// Gram solve (condition number ~ h^-2).
class DirichletGalerkin {
 public:
  DirichletGalerkin(const SplineSpace& space, QuadratureRule rule);

  const SplineSpace& space() const { return *space_; }
  const QuadratureRule& rule() const { return rule_; }
  int dim() const { return space_->dim(); }

  // m-coefficients = L2 projection of u0 - u0'', u-coefficients = H1 projection
  // of u0. Throws if |u0| at either endpoint exceeds 1e-8.
  SimState initial(const FunctionHandle& u0) const;

  void recover_velocity(std::span<const double> m, double t, const ForcingPair& forcing,
                        std::span<double> u) const;
  void rhs(std::span<const double> m, std::span<const double> u, double t,
           const ForcingPair& forcing, std::span<double> dmdt) const;

  // Contract-level wrapper; verifies the cached-velocity invariant.
  CoefficientArray rhs(const SimState& state, const ForcingPair& forcing, double t) const;

  double l2_norm(std::span<const double> u) const;
  double h1_norm(std::span<const double> u) const;

  const BandedSystem& mass() const { return mass_; }
  const BandedSystem& h1() const { return h1_; }

 private:
  std::vector<long double> load_ld(const std::function<double(double, double)>& g, double t) const;

  const SplineSpace* space_;
  QuadratureRule rule_;
  BandedSystem mass_;  // double systems back the matvecs (norms, residual checks)
  BandedSystem h1_;
  BandedSystemT<long double> mass_ld_;  // extended systems back every solve
  BandedSystemT<long double> h1_ld_;
  std::vector<int> span_;
  // per-element basis values at the quadrature nodes, extended precision:
  // [element][q][d in 0..1][order]
  std::vector<long double> table_ld_;
  std::vector<long double> nodes_ld_;
  std::vector<long double> jw_ld_;
};

// The verification solution used by the convergence study on quasiuniform
// meshes: u(x,t) = e^t [x sin(pi x) - (pi/6)(x - 1/2) + (2pi/3)(x - 1/2)^3]
// on [0,1], which vanishes together with u_xx at both endpoints. The source
// g_m = m_t + u m_x + 2 u_x m closes the method of manufactured solutions;
// the velocity recovery stays unforced.
class ManufacturedSolution {
 public:
  double u(double x, double t) const;
  double ux(double x, double t) const;
  double m(double x, double t) const;
  double mx(double x, double t) const;
  double g_m(double x, double t) const;

  FunctionHandle initial() const;
  ForcingPair forcing() const;
};

}  // namespace chfem
