#include "chfem/projections.hpp"

#include "chfem/errors.hpp"

namespace chfem {

CoefficientArray l2_project(const SplineSpace& space, const FunctionHandle& f,
                            const QuadratureRule& rule) {
  if (!f.value) throw Error("l2_project: function not evaluable");
  BandedSystem mass = assemble_gram(space, GramForm::mass, rule);
  std::vector<double> load = assemble_load(space, rule, f.value, nullptr, f.kinks);
  mass.solve_inplace(load);
  return CoefficientArray(space, std::move(load));
}

CoefficientArray h1_project(const SplineSpace& space, const FunctionHandle& f,
                            const QuadratureRule& rule) {
  if (!f.value) throw Error("h1_project: function not evaluable");
  if (!f.deriv) throw Error("h1_project: derivative unavailable");
  BandedSystem h1 = assemble_gram(space, GramForm::h1, rule);
  std::vector<double> load = assemble_load(space, rule, f.value, f.deriv, f.kinks);
  h1.solve_inplace(load);
  return CoefficientArray(space, std::move(load));
}

CoefficientArray interpolate(const SplineSpace& space, const FunctionHandle& f) {
  if (!f.value) throw Error("interpolate: function not evaluable");
  BandedSystem colloc = assemble_collocation(space);
  const std::vector<double> pts = space.greville_points();
  std::vector<double> rhs(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) rhs[i] = f.value(space.wrap(pts[i]));
  colloc.solve_inplace(rhs);
  return CoefficientArray(space, std::move(rhs));
}

CoefficientArray project(const SplineSpace& space, const FunctionHandle& f,
                         const QuadratureRule& rule, ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::l2:
      return l2_project(space, f, rule);
    case ProjectionKind::interp:
      return interpolate(space, f);
    case ProjectionKind::h1:
    default:
      return h1_project(space, f, rule);
  }
}

}  // namespace chfem
