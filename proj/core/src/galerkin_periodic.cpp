#include "chfem/galerkin_periodic.hpp"

#include <cmath>

#include "chfem/errors.hpp"

namespace chfem {

PeriodicGalerkin::PeriodicGalerkin(const SplineSpace& space, QuadratureRule rule, double k)
    : space_(&space),
      rule_(std::move(rule)),
      table_(space, rule_, 2),
      k_(k),
      mass_(assemble_gram(space, GramForm::mass, rule_)),
      h1_(assemble_gram(space, GramForm::h1, rule_)) {
  if (!space.periodic_kind()) throw Error("PeriodicGalerkin: needs a periodic space");
  mass_.factorize();
  h1_.factorize();
  const int r = space.order();
  span_.resize(static_cast<size_t>(space.elements()) * r);
  for (int e = 0; e < space.elements(); ++e)
    for (int i = 0; i < r; ++i) span_[static_cast<size_t>(e) * r + i] = space.span_index(e, i);
  work_.resize(space.dim());
}

void PeriodicGalerkin::standard_rhs(std::span<const double> u, std::span<double> dudt) const {
  if (space_->order() < 3)
    throw Error("standard scheme needs order >= 3 (u_xx not representable; use the modified scheme)");
  const int r = space_->order();
  const int nq = table_.nq();
  const int ne = space_->elements();
  std::vector<double>& load = work_;
  std::fill(load.begin(), load.end(), 0.0);
  const double* blk = table_.block(0);
  const size_t qstride = static_cast<size_t>(3) * r;
  for (int e = 0; e < ne; ++e) {
    const int* sp = span_.data() + static_cast<size_t>(e) * r;
    for (int q = 0; q < nq; ++q) {
      const double w = table_.weight(e, q);
      const double* B0 = blk + q * qstride;
      const double* B1 = B0 + r;
      const double* B2 = B1 + r;
      double uu = 0, ux = 0, uxx = 0;
      for (int i = 0; i < r; ++i) {
        const double ci = u[sp[i]];
        uu += ci * B0[i];
        ux += ci * B1[i];
        uxx += ci * B2[i];
      }
      // A(w,phi) = -2k(u_x,phi) - 3(u u_x,phi) - (u_x^2,phi')/2 - (u u_xx,phi')
      const double a = -w * (3.0 * uu * ux + 2.0 * k_ * ux);
      const double b = -w * (0.5 * ux * ux + uu * uxx);
      for (int i = 0; i < r; ++i) load[sp[i]] += a * B0[i] + b * B1[i];
    }
  }
  std::copy(load.begin(), load.end(), dudt.begin());
  h1_.solve_factored(dudt.data());
}

void PeriodicGalerkin::recover_velocity(std::span<const double> m, std::span<double> u) const {
  mass_.matvec(m.data(), u.data());
  h1_.solve_factored(u.data());
}

void PeriodicGalerkin::modified_rhs(std::span<const double> m, std::span<const double> u,
                                    std::span<double> dmdt) const {
  const int r = space_->order();
  const int nq = table_.nq();
  const int ne = space_->elements();
  std::vector<double>& load = work_;
  std::fill(load.begin(), load.end(), 0.0);
  const double* blk = table_.block(0);
  const size_t qstride = static_cast<size_t>(3) * r;
  for (int e = 0; e < ne; ++e) {
    const int* sp = span_.data() + static_cast<size_t>(e) * r;
    for (int q = 0; q < nq; ++q) {
      const double w = table_.weight(e, q);
      const double* B0 = blk + q * qstride;
      const double* B1 = B0 + r;
      double mm = 0, mx = 0, uu = 0, ux = 0;
      for (int i = 0; i < r; ++i) {
        const double mi = m[sp[i]];
        const double ui = u[sp[i]];
        mm += mi * B0[i];
        mx += mi * B1[i];
        uu += ui * B0[i];
        ux += ui * B1[i];
      }
      // (w,phi) = -((m u)_x + m u_x + 2k u_x, phi), (m u)_x = m_x u + m u_x
      const double a = -w * (uu * mx + 2.0 * mm * ux + 2.0 * k_ * ux);
      for (int i = 0; i < r; ++i) load[sp[i]] += a * B0[i];
    }
  }
  std::copy(load.begin(), load.end(), dmdt.begin());
  mass_.solve_factored(dmdt.data());
}

CoefficientArray PeriodicGalerkin::standard_rhs(const SimState& state) const {
  if (state.scheme != Scheme::standard) throw Error("standard_rhs: state is not a standard-scheme state");
  CoefficientArray out(*space_);
  standard_rhs(state.primary.c, out.c);
  return out;
}

CoefficientArray PeriodicGalerkin::recover_velocity(const CoefficientArray& m) const {
  CoefficientArray u(*space_);
  recover_velocity(m.c, u.c);
  return u;
}

CoefficientArray PeriodicGalerkin::modified_rhs(const SimState& state) const {
  if (state.scheme != Scheme::modified) throw Error("modified_rhs: state is not a modified-scheme state");
  if (!state.velocity) throw Error("modified_rhs: velocity cache missing");
  // cached-velocity invariant: A(u,phi) = (m,phi) residual below 1e-10
  std::vector<double> lhs(space_->dim()), rhs(space_->dim());
  h1_.matvec(state.velocity->c.data(), lhs.data());
  mass_.matvec(state.primary.c.data(), rhs.data());
  double num = 0, den = 0;
  for (int i = 0; i < space_->dim(); ++i) {
    num += (lhs[i] - rhs[i]) * (lhs[i] - rhs[i]);
    den += rhs[i] * rhs[i];
  }
  if (num > 1e-20 * std::max(den, 1e-30))
    throw Error("modified_rhs: stale cached velocity (recover_velocity must follow every m update)");
  CoefficientArray out(*space_);
  modified_rhs(state.primary.c, state.velocity->c, out.c);
  return out;
}

double PeriodicGalerkin::l2_norm(std::span<const double> u) const {
  std::vector<double> y(space_->dim());
  mass_.matvec(u.data(), y.data());
  double s = 0;
  for (int i = 0; i < space_->dim(); ++i) s += u[i] * y[i];
  return std::sqrt(std::max(0.0, s));
}

double PeriodicGalerkin::h1_norm(std::span<const double> u) const {
  std::vector<double> y(space_->dim());
  h1_.matvec(u.data(), y.data());
  double s = 0;
  for (int i = 0; i < space_->dim(); ++i) s += u[i] * y[i];
  return std::sqrt(std::max(0.0, s));
}

}  // namespace chfem
