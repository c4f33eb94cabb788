#pragma once

#include <vector>

namespace chfem {

// Gauss-Legendre rule on the reference interval [-1,1].
// Exact for polynomials of degree <= 2n-1; weights positive and summing to 2.
struct QuadratureRule {
  int n = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Rule with n nodes, 1 <= n <= 10.
QuadratureRule gauss_legendre(int n);

// Per-element default used by the schemes: 5 nodes for order >= 3, 3 nodes for order 2.
QuadratureRule default_rule(int spline_order);

}  // namespace chfem
