#include "chfem/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "chfem/errors.hpp"

namespace chfem {

BandedSystem assemble_gram(const SplineSpace& space, GramForm form, const QuadratureRule& rule) {
  if (rule.n < space.order())
    throw Error("assemble_gram: quadrature rule needs at least r nodes for exact Gram entries");
  const int r = space.order();
  BandedSystem sys(space.dim(), r - 1, space.periodic_kind());
  BasisTable table(space, rule, 1);
  const int nq = table.nq();
  for (int e = 0; e < space.elements(); ++e) {
    const double* blk = table.block(e);
    for (int q = 0; q < nq; ++q) {
      const double w = table.weight(e, q);
      const double* B0 = blk + static_cast<size_t>(q) * 2 * r;
      const double* B1 = B0 + r;
      for (int i = 0; i < r; ++i) {
        const int gi = space.span_index(e, i);
        if (gi < 0) continue;
        for (int j = 0; j < r; ++j) {
          const int gj = space.span_index(e, j);
          if (gj < 0) continue;
          double v = 0;
          if (form != GramForm::stiffness) v += B0[i] * B0[j];
          if (form != GramForm::mass) v += B1[i] * B1[j];
          sys.add(gi, gj, w * v);
        }
      }
    }
  }
  return sys;
}

namespace {

// Quadrature of f*phi_i (+ fprime*phi_i') over [x0,x1] inside element e.
void accumulate_load(const SplineSpace& space, const QuadratureRule& rule, int e, double x0,
                     double x1, const std::function<double(double)>& f,
                     const std::function<double(double)>& fprime, std::vector<double>& load) {
  const int r = space.order();
  double vals[36];
  const double half = 0.5 * (x1 - x0);
  for (int q = 0; q < rule.n; ++q) {
    const double x = x0 + half * (rule.nodes[q] + 1.0);
    const double w = half * rule.weights[q];
    space.basis_values(e, x, fprime ? 1 : 0, vals);
    const double fv = f ? f(x) : 0.0;
    const double fd = fprime ? fprime(x) : 0.0;
    for (int i = 0; i < r; ++i) {
      const int g = space.span_index(e, i);
      if (g < 0) continue;
      double v = 0;
      if (f) v += fv * vals[i];
      if (fprime) v += fd * vals[r + i];
      load[g] += w * v;
    }
  }
}

}  // namespace

std::vector<double> assemble_load(const SplineSpace& space, const QuadratureRule& rule,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& fprime,
                                  std::span<const double> split_points) {
  std::vector<double> load(space.dim(), 0.0);
  std::vector<double> splits(split_points.begin(), split_points.end());
  for (double& s : splits) s = space.wrap(s);
  std::sort(splits.begin(), splits.end());
  for (int e = 0; e < space.elements(); ++e) {
    const double x0 = space.breakpoint(e);
    const double x1 = space.breakpoint(e + 1);
    double cur = x0;
    for (double s : splits) {
      if (s > cur + 1e-14 && s < x1 - 1e-14) {
        accumulate_load(space, rule, e, cur, s, f, fprime, load);
        cur = s;
      }
    }
    accumulate_load(space, rule, e, cur, x1, f, fprime, load);
  }
  return load;
}

BandedSystem assemble_collocation(const SplineSpace& space) {
  const int r = space.order();
  BandedSystem sys(space.dim(), r - 1, space.periodic_kind());
  const std::vector<double> pts = space.greville_points();
  double vals[36];
  for (int g = 0; g < space.dim(); ++g) {
    const double x = space.wrap(pts[g]);
    const int e = space.element_of(x);
    space.basis_values(e, x, 0, vals);
    for (int i = 0; i < r; ++i) {
      const int gj = space.span_index(e, i);
      if (gj >= 0 && vals[i] != 0.0) sys.add(g, gj, vals[i]);
    }
  }
  return sys;
}

}  // namespace chfem
