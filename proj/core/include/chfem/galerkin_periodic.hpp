#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chfem/assembly.hpp"
#include "chfem/spline_space.hpp"

namespace chfem {

enum class Scheme { standard, modified, ibvp };

// Evolving unknown of a semidiscretization: u-coefficients for the standard
// scheme, m-coefficients plus the recovered velocity for the system schemes.
struct SimState {
  Scheme scheme = Scheme::standard;
  double t = 0;
  CoefficientArray primary;                  // u (standard) or m (system form)
  std::optional<CoefficientArray> velocity;  // cached u for system schemes
};

// Semidiscrete right-hand sides of the two periodic schemes, exposed as maps
// for the method of lines. The mass and H1 Gram systems are assembled and
// factorized once at construction and reused every stage.
class PeriodicGalerkin {
 public:
  PeriodicGalerkin(const SplineSpace& space, QuadratureRule rule, double k = 0.0);

  const SplineSpace& space() const { return *space_; }
  const QuadratureRule& rule() const { return rule_; }
  int dim() const { return space_->dim(); }
  double dispersion_k() const { return k_; }

  // Standard scheme (order >= 3): w with
  //   A(w, phi) = -2k(u_x, phi) - 3(u u_x, phi) - (u_x^2, phi')/2 - (u u_xx, phi').
  void standard_rhs(std::span<const double> u, std::span<double> dudt) const;

  // Discrete Helmholtz inversion: A(u, phi_i) = (m, phi_i) for all i.
  void recover_velocity(std::span<const double> m, std::span<double> u) const;

  // Modified scheme (order >= 2): w with
  //   (w, phi) = -2k(u_x, phi) - ((m u)_x, phi) - (m u_x, phi),
  // the product derivative evaluated at quadrature nodes as m_x u + m u_x.
  void modified_rhs(std::span<const double> m, std::span<const double> u,
                    std::span<double> dmdt) const;

  // Contract-level wrappers over SimState. The modified wrapper verifies the
  // cached-velocity invariant (residual of A(u,phi) = (m,phi) below 1e-10).
  CoefficientArray standard_rhs(const SimState& state) const;
  CoefficientArray modified_rhs(const SimState& state) const;
  CoefficientArray recover_velocity(const CoefficientArray& m) const;

  double l2_norm(std::span<const double> u) const;
  double h1_norm(std::span<const double> u) const;

  const BandedSystem& mass() const { return mass_; }
  const BandedSystem& h1() const { return h1_; }
  const BasisTable& table() const { return table_; }

 private:
  const SplineSpace* space_;
  QuadratureRule rule_;
  BasisTable table_;
  double k_;
  BandedSystem mass_;
  BandedSystem h1_;
  std::vector<int> span_;  // element -> r global indices
  mutable std::vector<double> work_;
};

}  // namespace chfem
