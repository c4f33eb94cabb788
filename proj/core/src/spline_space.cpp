#include "chfem/spline_space.hpp"

#include <algorithm>
#include <cmath>

#include "chfem/errors.hpp"

namespace chfem {

SplineSpace SplineSpace::periodic(int elements, int order, double a, double b) {
  if (order < 2) throw Error("SplineSpace: order must be >= 2");
  if (elements < 2 * order)
    throw Error("SplineSpace: periodic mesh needs at least 2r elements (basis supports overlap)");
  if (!(b > a)) throw Error("SplineSpace: empty domain");
  SplineSpace s;
  s.kind_ = SpaceKind::periodic_uniform;
  s.r_ = order;
  s.elements_ = elements;
  s.dim_ = elements;
  s.a_ = a;
  s.b_ = b;
  s.h_ = (b - a) / elements;
  return s;
}

SplineSpace SplineSpace::dirichlet(std::vector<double> breakpoints, int order) {
  if (order < 2) throw Error("SplineSpace: order must be >= 2");
  if (breakpoints.size() < 2) throw Error("SplineSpace: need at least two breakpoints");
  for (size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw Error("SplineSpace: breakpoints must be strictly increasing");
  const int n = static_cast<int>(breakpoints.size()) - 1;
  if (n + order - 3 < 1) throw Error("SplineSpace: mesh too coarse for this order");
  SplineSpace s;
  s.kind_ = SpaceKind::dirichlet;
  s.r_ = order;
  s.elements_ = n;
  s.dim_ = n + order - 3;
  s.a_ = breakpoints.front();
  s.b_ = breakpoints.back();
  double hmax = 0;
  for (int e = 0; e < n; ++e) hmax = std::max(hmax, breakpoints[e + 1] - breakpoints[e]);
  s.h_ = hmax;
  // clamped knot vector: r copies of each endpoint
  s.knots_.resize(static_cast<size_t>(n) + 2 * order - 1);
  for (int i = 0; i < order; ++i) s.knots_[i] = s.a_;
  for (int i = 1; i < n; ++i) s.knots_[order - 1 + i] = breakpoints[i];
  for (int i = 0; i < order; ++i) s.knots_[n + order - 1 + i] = s.b_;
  s.breakpoints_ = std::move(breakpoints);
  return s;
}

double SplineSpace::breakpoint(int i) const {
  if (kind_ == SpaceKind::periodic_uniform) return a_ + i * h_;
  return breakpoints_[i];
}

double SplineSpace::element_width(int e) const {
  if (kind_ == SpaceKind::periodic_uniform) return h_;
  return breakpoints_[e + 1] - breakpoints_[e];
}

double SplineSpace::wrap(double x) const {
  if (kind_ != SpaceKind::periodic_uniform) return x;
  const double L = b_ - a_;
  double y = std::fmod(x - a_, L);
  if (y < 0) y += L;
  return a_ + y;
}

int SplineSpace::element_of(double x) const {
  if (kind_ == SpaceKind::periodic_uniform) {
    const double y = wrap(x);
    int e = static_cast<int>(std::floor((y - a_) / h_));
    return std::clamp(e, 0, elements_ - 1);
  }
  const double tol = 1e-12 * (b_ - a_);
  if (x < a_ - tol || x > b_ + tol) throw Error("eval: point outside the domain");
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  int e = static_cast<int>(it - breakpoints_.begin()) - 1;
  return std::clamp(e, 0, elements_ - 1);
}

int SplineSpace::span_index(int element, int i) const {
  if (kind_ == SpaceKind::periodic_uniform) {
    int g = (element - r_ + 1 + i) % dim_;
    if (g < 0) g += dim_;
    return g;
  }
  const int g = element + i - 1;  // full-basis index minus the removed left function
  return (g >= 0 && g < dim_) ? g : -1;
}

double SplineSpace::knot(int i) const {
  if (kind_ == SpaceKind::periodic_uniform) return a_ + i * h_;
  return knots_[i];
}

namespace {

// Cox-de Boor triangle with stored knot differences (standard derivative
// algorithm for B-spline bases). Knots are supplied by an accessor so the
// same code serves double and extended-precision evaluation.
template <class Real, class KnotFn>
void basis_values_impl(int r, int span, Real x, int nd, Real* out, KnotFn&& knot) {
  const int p = r - 1;
  const int nders = std::min(nd, p);
  Real ndu[12][12], left[12], right[12];
  ndu[0][0] = Real(1);
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knot(span + 1 - j);
    right[j] = knot(span + j) - x;
    Real saved = Real(0);
    for (int t = 0; t < j; ++t) {
      ndu[j][t] = right[t + 1] + left[j - t];
      const Real temp = ndu[t][j - 1] / ndu[j][t];
      ndu[t][j] = saved + right[t + 1] * temp;
      saved = left[j - t] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int i = 0; i <= p; ++i) out[i] = ndu[i][p];

  Real a2[2][12];
  for (int i = 0; i <= p; ++i) {
    int s1 = 0, s2 = 1;
    a2[0][0] = Real(1);
    for (int d = 1; d <= nders; ++d) {
      Real dval = Real(0);
      const int rk = i - d, pk = p - d;
      if (i >= d) {
        a2[s2][0] = a2[s1][0] / ndu[pk + 1][rk];
        dval = a2[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (i - 1 <= pk) ? d - 1 : p - i;
      for (int t = j1; t <= j2; ++t) {
        a2[s2][t] = (a2[s1][t] - a2[s1][t - 1]) / ndu[pk + 1][rk + t];
        dval += a2[s2][t] * ndu[rk + t][pk];
      }
      if (i <= pk) {
        a2[s2][d] = -a2[s1][d - 1] / ndu[pk + 1][i];
        dval += a2[s2][d] * ndu[i][pk];
      }
      out[d * r + i] = dval;
      std::swap(s1, s2);
    }
  }
  Real factor = Real(p);
  for (int d = 1; d <= nders; ++d) {
    for (int i = 0; i <= p; ++i) out[d * r + i] *= factor;
    factor *= Real(p - d);
  }
  for (int d = nders + 1; d <= nd; ++d)
    for (int i = 0; i <= p; ++i) out[d * r + i] = Real(0);
}

}  // namespace

void SplineSpace::basis_values(int element, double x, int nd, double* out) const {
  const int span = kind_ == SpaceKind::periodic_uniform ? element : element + r_ - 1;
  basis_values_impl<double>(r_, span, x, nd, out, [this](int i) { return knot(i); });
}

void SplineSpace::basis_values_ld(int element, long double x, int nd, long double* out) const {
  const int span = kind_ == SpaceKind::periodic_uniform ? element : element + r_ - 1;
  basis_values_impl<long double>(r_, span, x, nd, out,
                                 [this](int i) { return static_cast<long double>(knot(i)); });
}

std::vector<double> SplineSpace::greville_points(void) const {
  std::vector<double> pts(dim_);
  if (kind_ == SpaceKind::periodic_uniform) {
    for (int j = 0; j < dim_; ++j) pts[j] = a_ + (j + 0.5 * r_) * h_;
    return pts;
  }
  for (int g = 0; g < dim_; ++g) {
    const int j = g + 1;  // full-basis index
    double s = 0;
    for (int t = 1; t < r_; ++t) s += knots_[j + t];
    pts[g] = s / (r_ - 1);
  }
  return pts;
}

CoefficientArray::CoefficientArray(const SplineSpace& s, std::vector<double> coeffs)
    : space(&s), c(std::move(coeffs)) {
  if (static_cast<int>(c.size()) != s.dim())
    throw Error("CoefficientArray: length does not match space dimension");
}

CoefficientArray::CoefficientArray(const SplineSpace& s)
    : space(&s), c(static_cast<size_t>(s.dim()), 0.0) {}

double eval_spline(const CoefficientArray& u, double x, int deriv) {
  if (deriv < 0 || deriv > 2) throw Error("eval_spline: derivative order must be 0..2");
  const SplineSpace& s = *u.space;
  const double y = s.wrap(x);
  const int e = s.element_of(y);
  double vals[36];
  s.basis_values(e, y, deriv, vals);
  double acc = 0;
  const int r = s.order();
  for (int i = 0; i < r; ++i) {
    const int g = s.span_index(e, i);
    if (g >= 0) acc += u.c[g] * vals[deriv * r + i];
  }
  return acc;
}

BasisTable::BasisTable(const SplineSpace& space, const QuadratureRule& rule, int nderiv) {
  nq_ = rule.n;
  nderiv_ = nderiv;
  const int r = space.order();
  const int ne = space.elements();
  block_size_ = static_cast<size_t>(nq_) * (nderiv + 1) * r;
  shared_ = space.kind() == SpaceKind::periodic_uniform;
  nodes_.resize(static_cast<size_t>(ne) * nq_);
  for (int e = 0; e < ne; ++e) {
    const double x0 = space.breakpoint(e);
    const double w = space.element_width(e);
    for (int q = 0; q < nq_; ++q)
      nodes_[static_cast<size_t>(e) * nq_ + q] = x0 + 0.5 * (rule.nodes[q] + 1.0) * w;
  }
  const int nblocks = shared_ ? 1 : ne;
  vals_.resize(block_size_ * nblocks);
  jw_.resize(shared_ ? nq_ : static_cast<size_t>(ne) * nq_);
  for (int e = 0; e < nblocks; ++e) {
    const double w = space.element_width(e);
    for (int q = 0; q < nq_; ++q) {
      double* out = vals_.data() + static_cast<size_t>(e) * block_size_ +
                    static_cast<size_t>(q) * (nderiv + 1) * r;
      space.basis_values(e, nodes_[static_cast<size_t>(e) * nq_ + q], nderiv, out);
    }
    for (int q = 0; q < nq_; ++q) jw_[static_cast<size_t>(e) * nq_ + q] = 0.5 * w * rule.weights[q];
  }
}

}  // namespace chfem
