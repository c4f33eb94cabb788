#include "chfem/galerkin_ibvp.hpp"

#include <cmath>

#include "chfem/errors.hpp"

namespace chfem {

namespace {

using LD = long double;

BandedSystemT<LD> assemble_gram_ld(const SplineSpace& space, GramForm form,
                                   const QuadratureRule& rule) {
  const int r = space.order();
  BandedSystemT<LD> sys(space.dim(), r - 1, false);
  LD vals[24];
  for (int e = 0; e < space.elements(); ++e) {
    const LD x0 = space.breakpoint(e);
    const LD w_el = space.element_width(e);
    for (int q = 0; q < rule.n; ++q) {
      const LD x = x0 + (LD(rule.nodes[q]) + 1.0L) / 2.0L * w_el;
      const LD w = 0.5L * w_el * LD(rule.weights[q]);
      space.basis_values_ld(e, x, 1, vals);
      for (int i = 0; i < r; ++i) {
        const int gi = space.span_index(e, i);
        if (gi < 0) continue;
        for (int j = 0; j < r; ++j) {
          const int gj = space.span_index(e, j);
          if (gj < 0) continue;
          LD v = 0;
          if (form != GramForm::stiffness) v += vals[i] * vals[j];
          if (form != GramForm::mass) v += vals[r + i] * vals[r + j];
          sys.add(gi, gj, w * v);
        }
      }
    }
  }
  return sys;
}

}  // namespace

DirichletGalerkin::DirichletGalerkin(const SplineSpace& space, QuadratureRule rule)
    : space_(&space),
      rule_(std::move(rule)),
      mass_(assemble_gram(space, GramForm::mass, rule_)),
      h1_(assemble_gram(space, GramForm::h1, rule_)),
      mass_ld_(assemble_gram_ld(space, GramForm::mass, rule_)),
      h1_ld_(assemble_gram_ld(space, GramForm::h1, rule_)) {
  if (space.periodic_kind()) throw Error("DirichletGalerkin: needs a dirichlet space");
  mass_.factorize();
  h1_.factorize();
  mass_ld_.factorize();
  h1_ld_.factorize();
  const int r = space.order();
  const int ne = space.elements();
  span_.resize(static_cast<size_t>(ne) * r);
  for (int e = 0; e < ne; ++e)
    for (int i = 0; i < r; ++i) span_[static_cast<size_t>(e) * r + i] = space.span_index(e, i);

  const int nq = rule_.n;
  table_ld_.resize(static_cast<size_t>(ne) * nq * 2 * r);
  nodes_ld_.resize(static_cast<size_t>(ne) * nq);
  jw_ld_.resize(static_cast<size_t>(ne) * nq);
  for (int e = 0; e < ne; ++e) {
    const LD x0 = space.breakpoint(e);
    const LD w_el = space.element_width(e);
    for (int q = 0; q < nq; ++q) {
      const size_t at = static_cast<size_t>(e) * nq + q;
      nodes_ld_[at] = x0 + (LD(rule_.nodes[q]) + 1.0L) / 2.0L * w_el;
      jw_ld_[at] = 0.5L * w_el * LD(rule_.weights[q]);
      space.basis_values_ld(e, nodes_ld_[at], 1, table_ld_.data() + at * 2 * r);
    }
  }
}

std::vector<LD> DirichletGalerkin::load_ld(const std::function<double(double, double)>& g,
                                           double t) const {
  const int r = space_->order();
  const int nq = rule_.n;
  std::vector<LD> load(space_->dim(), 0.0L);
  for (int e = 0; e < space_->elements(); ++e) {
    const int* sp = span_.data() + static_cast<size_t>(e) * r;
    for (int q = 0; q < nq; ++q) {
      const size_t at = static_cast<size_t>(e) * nq + q;
      const LD* B0 = table_ld_.data() + at * 2 * r;
      const LD wg = jw_ld_[at] * LD(g(static_cast<double>(nodes_ld_[at]), t));
      for (int i = 0; i < r; ++i)
        if (sp[i] >= 0) load[sp[i]] += wg * B0[i];
    }
  }
  return load;
}

SimState DirichletGalerkin::initial(const FunctionHandle& u0) const {
  if (!u0.value) throw Error("ibvp initial: function not evaluable");
  const double tol = 1e-8;
  if (std::abs(u0.value(space_->a())) > tol || std::abs(u0.value(space_->b())) > tol)
    throw Error("ibvp initial: u0 violates the homogeneous boundary conditions");
  SimState state;
  state.scheme = Scheme::ibvp;
  state.t = 0;
  // m(0) = L2 projection of u0 - u0''; with u0'' available the loads are
  // direct, otherwise the integrated-by-parts form (u0,phi) + (u0',phi').
  const int r = space_->order();
  const int nq = rule_.n;
  std::vector<LD> load(space_->dim(), 0.0L);
  const bool direct = static_cast<bool>(u0.deriv2);
  if (!direct && !u0.deriv) throw Error("ibvp initial: derivative unavailable");
  for (int e = 0; e < space_->elements(); ++e) {
    const int* sp = span_.data() + static_cast<size_t>(e) * r;
    for (int q = 0; q < nq; ++q) {
      const size_t at = static_cast<size_t>(e) * nq + q;
      const LD* B0 = table_ld_.data() + at * 2 * r;
      const LD* B1 = B0 + r;
      const double x = static_cast<double>(nodes_ld_[at]);
      const LD w = jw_ld_[at];
      if (direct) {
        const LD f = LD(u0.value(x)) - LD(u0.deriv2(x));
        for (int i = 0; i < r; ++i)
          if (sp[i] >= 0) load[sp[i]] += w * f * B0[i];
      } else {
        const LD f = u0.value(x);
        const LD fp = u0.deriv(x);
        for (int i = 0; i < r; ++i)
          if (sp[i] >= 0) load[sp[i]] += w * (f * B0[i] + fp * B1[i]);
      }
    }
  }
  mass_ld_.solve_factored(load);
  CoefficientArray m(*space_);
  for (int i = 0; i < space_->dim(); ++i) m.c[i] = static_cast<double>(load[i]);
  state.primary = std::move(m);
  CoefficientArray u(*space_);
  recover_velocity(state.primary.c, 0.0, ForcingPair{}, u.c);
  state.velocity = std::move(u);
  return state;
}

void DirichletGalerkin::recover_velocity(std::span<const double> m, double t,
                                         const ForcingPair& forcing, std::span<double> u) const {
  std::vector<LD> rhs(space_->dim());
  std::vector<LD> m_ld(m.begin(), m.end());
  mass_ld_.matvec(m_ld.data(), rhs.data());
  if (forcing.g_u) {
    const std::vector<LD> extra = load_ld(forcing.g_u, t);
    for (int i = 0; i < space_->dim(); ++i) rhs[i] += extra[i];
  }
  h1_ld_.solve_factored(rhs);
  for (int i = 0; i < space_->dim(); ++i) u[i] = static_cast<double>(rhs[i]);
}

void DirichletGalerkin::rhs(std::span<const double> m, std::span<const double> u, double t,
                            const ForcingPair& forcing, std::span<double> dmdt) const {
  const int r = space_->order();
  const int nq = rule_.n;
  std::vector<LD> load(space_->dim(), 0.0L);
  for (int e = 0; e < space_->elements(); ++e) {
    const int* sp = span_.data() + static_cast<size_t>(e) * r;
    for (int q = 0; q < nq; ++q) {
      const size_t at = static_cast<size_t>(e) * nq + q;
      const LD* B0 = table_ld_.data() + at * 2 * r;
      const LD* B1 = B0 + r;
      LD mm = 0, mx = 0, uu = 0, ux = 0;
      for (int i = 0; i < r; ++i) {
        const int g = sp[i];
        if (g < 0) continue;
        mm += LD(m[g]) * B0[i];
        mx += LD(m[g]) * B1[i];
        uu += LD(u[g]) * B0[i];
        ux += LD(u[g]) * B1[i];
      }
      // (w,chi) = -(u m_x, chi) - 2(u_x m, chi) + (g_m, chi)
      LD a = -(uu * mx + 2.0L * ux * mm);
      if (forcing.g_m) a += LD(forcing.g_m(static_cast<double>(nodes_ld_[at]), t));
      const LD wa = jw_ld_[at] * a;
      for (int i = 0; i < r; ++i)
        if (sp[i] >= 0) load[sp[i]] += wa * B0[i];
    }
  }
  mass_ld_.solve_factored(load);
  for (int i = 0; i < space_->dim(); ++i) dmdt[i] = static_cast<double>(load[i]);
}

CoefficientArray DirichletGalerkin::rhs(const SimState& state, const ForcingPair& forcing,
                                        double t) const {
  if (state.scheme != Scheme::ibvp) throw Error("ibvp rhs: state is not an ibvp state");
  if (!state.velocity) throw Error("ibvp rhs: velocity cache missing");
  std::vector<double> lhs(space_->dim()), rv(space_->dim());
  h1_.matvec(state.velocity->c.data(), lhs.data());
  mass_.matvec(state.primary.c.data(), rv.data());
  if (forcing.g_u) {
    auto g = [&](double x) { return forcing.g_u(x, t); };
    const std::vector<double> extra = assemble_load(*space_, rule_, g, nullptr);
    for (int i = 0; i < space_->dim(); ++i) rv[i] += extra[i];
  }
  double num = 0, den = 0;
  for (int i = 0; i < space_->dim(); ++i) {
    num += (lhs[i] - rv[i]) * (lhs[i] - rv[i]);
    den += rv[i] * rv[i];
  }
  if (num > 1e-20 * std::max(den, 1e-30))
    throw Error("ibvp rhs: stale cached velocity");
  CoefficientArray out(*space_);
  rhs(state.primary.c, state.velocity->c, t, forcing, out.c);
  return out;
}

double DirichletGalerkin::l2_norm(std::span<const double> u) const {
  std::vector<double> y(space_->dim());
  mass_.matvec(u.data(), y.data());
  double s = 0;
  for (int i = 0; i < space_->dim(); ++i) s += u[i] * y[i];
  return std::sqrt(std::max(0.0, s));
}

double DirichletGalerkin::h1_norm(std::span<const double> u) const {
  std::vector<double> y(space_->dim());
  h1_.matvec(u.data(), y.data());
  double s = 0;
  for (int i = 0; i < space_->dim(); ++i) s += u[i] * y[i];
  return std::sqrt(std::max(0.0, s));
}

namespace {

constexpr double kPi = 3.14159265358979323846;

double psi(double x) {
  const double d = x - 0.5;
  return x * std::sin(kPi * x) - (kPi / 6.0) * d + (2.0 * kPi / 3.0) * d * d * d;
}
double psi1(double x) {
  const double d = x - 0.5;
  return std::sin(kPi * x) + kPi * x * std::cos(kPi * x) - kPi / 6.0 + 2.0 * kPi * d * d;
}
double psi2(double x) {
  const double d = x - 0.5;
  return 2.0 * kPi * std::cos(kPi * x) - kPi * kPi * x * std::sin(kPi * x) + 4.0 * kPi * d;
}
double psi3(double x) {
  return -3.0 * kPi * kPi * std::sin(kPi * x) - kPi * kPi * kPi * x * std::cos(kPi * x) + 4.0 * kPi;
}

}  // namespace

double ManufacturedSolution::u(double x, double t) const { return std::exp(t) * psi(x); }
double ManufacturedSolution::ux(double x, double t) const { return std::exp(t) * psi1(x); }
double ManufacturedSolution::m(double x, double t) const { return std::exp(t) * (psi(x) - psi2(x)); }
double ManufacturedSolution::mx(double x, double t) const { return std::exp(t) * (psi1(x) - psi3(x)); }

double ManufacturedSolution::g_m(double x, double t) const {
  const double et = std::exp(t);
  const double p = psi(x), p1 = psi1(x), p2 = psi2(x), p3 = psi3(x);
  // m_t + u m_x + 2 u_x m with u = e^t psi, m = e^t (psi - psi'')
  return et * (p - p2) + et * et * (p * (p1 - p3) + 2.0 * p1 * (p - p2));
}

FunctionHandle ManufacturedSolution::initial() const {
  FunctionHandle f;
  f.value = [](double x) { return psi(x); };
  f.deriv = [](double x) { return psi1(x); };
  f.deriv2 = [](double x) { return psi2(x); };
  return f;
}

ForcingPair ManufacturedSolution::forcing() const {
  ForcingPair fp;
  fp.g_m = [ms = *this](double x, double t) { return ms.g_m(x, t); };
  return fp;
}

}  // namespace chfem
