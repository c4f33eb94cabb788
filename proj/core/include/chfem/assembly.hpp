#pragma once

#include <functional>
#include <span>

#include "chfem/banded.hpp"
#include "chfem/quadrature.hpp"
#include "chfem/spline_space.hpp"

namespace chfem {

enum class GramForm { mass, stiffness, h1 };

// Gram matrix of the basis in the requested form:
//   mass      (phi_i, phi_j)
//   stiffness (phi_i', phi_j')
//   h1        mass + stiffness
// The rule must have at least `order` nodes so the polynomial integrands are
// integrated exactly. The returned system is factorized on first solve.
BandedSystem assemble_gram(const SplineSpace& space, GramForm form, const QuadratureRule& rule);

// Load vector with components (f, phi_i) + (fprime, phi_i') where either
// callable may be null. Elements containing a split point are integrated on
// the two sub-intervals so kinked integrands keep full quadrature accuracy.
std::vector<double> assemble_load(const SplineSpace& space, const QuadratureRule& rule,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& fprime = nullptr,
                                  std::span<const double> split_points = {});

// Collocation matrix B_j(x_i) at the Greville points (interpolation system).
BandedSystem assemble_collocation(const SplineSpace& space);

}  // namespace chfem
