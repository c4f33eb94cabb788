#pragma once

#include <functional>
#include <vector>

#include "chfem/assembly.hpp"
#include "chfem/spline_space.hpp"

namespace chfem {

enum class Smoothness { smooth, lipschitz };

// A function of x with optional derivatives, evaluable anywhere in the
// domain. Lipschitz handles list their kink locations so quadrature can split
// elements there; their derivatives are the piecewise classical values and
// are never requested at a kink.
struct FunctionHandle {
  std::function<double(double)> value;
  std::function<double(double)> deriv;   // optional
  std::function<double(double)> deriv2;  // optional
  Smoothness tag = Smoothness::smooth;
  std::vector<double> kinks;  // ascending
};

enum class ProjectionKind { h1, l2, interp };

// L2 projection: (P f, phi_i) = (f, phi_i) for all i.
CoefficientArray l2_project(const SplineSpace& space, const FunctionHandle& f,
                            const QuadratureRule& rule);

// H1 ("elliptic") projection: (P f, phi_i) + ((P f)', phi_i') = (f, phi_i) + (f', phi_i').
// Requires f.deriv.
CoefficientArray h1_project(const SplineSpace& space, const FunctionHandle& f,
                            const QuadratureRule& rule);

// Spline matching f at the Greville abscissae.
CoefficientArray interpolate(const SplineSpace& space, const FunctionHandle& f);

CoefficientArray project(const SplineSpace& space, const FunctionHandle& f,
                         const QuadratureRule& rule, ProjectionKind kind);

}  // namespace chfem
