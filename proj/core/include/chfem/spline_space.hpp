#pragma once

#include <span>
#include <vector>

#include "chfem/quadrature.hpp"

namespace chfem {

enum class SpaceKind { periodic_uniform, dirichlet };

// Space of splines of order r (piecewise degree r-1, smoothness C^{r-2}) over a
// 1D mesh. Two flavours:
//   - periodic_uniform: uniform mesh on [a,b], basis of N wrapped uniform B-splines;
//   - dirichlet: arbitrary strictly increasing breakpoints, clamped B-spline basis
//     with the two endpoint functions removed, so every basis function vanishes
//     at both ends (dim = N + r - 3 for N elements).
class SplineSpace {
 public:
  static SplineSpace periodic(int elements, int order, double a, double b);
  static SplineSpace dirichlet(std::vector<double> breakpoints, int order);

  SpaceKind kind() const { return kind_; }
  bool periodic_kind() const { return kind_ == SpaceKind::periodic_uniform; }
  int order() const { return r_; }
  int dim() const { return dim_; }
  int elements() const { return elements_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double length() const { return b_ - a_; }
  // Uniform width for periodic meshes, maximum width otherwise.
  double h() const { return h_; }

  double breakpoint(int i) const;
  double element_width(int e) const;
  // Element containing x; x == b maps to the last element, periodic x wraps first.
  int element_of(double x) const;
  // Wrap x into [a,b) (identity for dirichlet spaces).
  double wrap(double x) const;

  // Global index of the i-th (0 <= i < order) basis function supported on
  // element e. Periodic indices wrap mod dim; dirichlet returns -1 for the
  // removed endpoint functions.
  int span_index(int element, int i) const;

  // Values of the `order` local basis functions and their derivatives
  // 0..nd at x, which must lie in element `element`. Layout: out[d*order + i].
  // Derivative orders above r-1 evaluate to zero.
  void basis_values(int element, double x, int nd, double* out) const;
  // Extended-precision evaluation for the ill-conditioned boundary-value
  // pipeline (same knots, long double arithmetic).
  void basis_values_ld(int element, long double x, int nd, long double* out) const;

  // Greville abscissae, one per basis function (collocation points for
  // interpolation).
  std::vector<double> greville_points() const;

 private:
  SplineSpace() = default;
  double knot(int i) const;  // virtual uniform knots (periodic) or clamped array

  SpaceKind kind_ = SpaceKind::periodic_uniform;
  int r_ = 0;
  int dim_ = 0;
  int elements_ = 0;
  double a_ = 0, b_ = 0, h_ = 0;
  std::vector<double> breakpoints_;  // dirichlet only
  std::vector<double> knots_;        // dirichlet only (clamped)
};

// Coefficients of a spline with respect to the B-spline basis of `space`.
// The referenced space must outlive the array.
struct CoefficientArray {
  const SplineSpace* space = nullptr;
  std::vector<double> c;

  CoefficientArray() = default;
  CoefficientArray(const SplineSpace& s, std::vector<double> coeffs);
  explicit CoefficientArray(const SplineSpace& s);
};

// d-th derivative (0 <= d <= 2) of the spline at x. Derivatives are the
// element-interior piecewise values; x outside the domain throws for
// dirichlet spaces and wraps for periodic ones.
double eval_spline(const CoefficientArray& u, double x, int deriv = 0);

// Basis values and derivatives tabulated at the quadrature nodes of every
// element. Uniform periodic meshes share a single block across elements.
class BasisTable {
 public:
  BasisTable(const SplineSpace& space, const QuadratureRule& rule, int nderiv);

  int nq() const { return nq_; }
  int nderiv() const { return nderiv_; }
  // Block layout: [q][d][order], contiguous.
  const double* block(int element) const {
    return shared_ ? vals_.data() : vals_.data() + static_cast<size_t>(element) * block_size_;
  }
  double node(int element, int q) const { return nodes_[static_cast<size_t>(element) * nq_ + q]; }
  // Quadrature weight times the element jacobian.
  double weight(int element, int q) const {
    return shared_ ? jw_[q] : jw_[static_cast<size_t>(element) * nq_ + q];
  }

 private:
  int nq_ = 0, nderiv_ = 0;
  bool shared_ = false;
  size_t block_size_ = 0;
  std::vector<double> vals_;
  std::vector<double> nodes_;
  std::vector<double> jw_;
};

}  // namespace chfem
