#include "chfem/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chfem/errors.hpp"

namespace chfem {

namespace {

// Walks all quadrature points, splitting elements at the given x-locations
// (ascending, already wrapped into the domain). fn(element, x, weight).
template <typename Fn>
void for_each_quad_point(const SplineSpace& s, const QuadratureRule& rule,
                         std::span<const double> splits, Fn&& fn) {
  for (int e = 0; e < s.elements(); ++e) {
    const double x0 = s.breakpoint(e);
    const double x1 = s.breakpoint(e + 1);
    double cur = x0;
    auto emit = [&](double lo, double hi) {
      const double half = 0.5 * (hi - lo);
      for (int q = 0; q < rule.n; ++q)
        fn(e, lo + half * (rule.nodes[q] + 1.0), half * rule.weights[q]);
    };
    for (double sp : splits) {
      if (sp > cur + 1e-14 && sp < x1 - 1e-14) {
        emit(cur, sp);
        cur = sp;
      }
    }
    emit(cur, x1);
  }
}

void spline_at(const SplineSpace& s, const std::vector<double>& c, int e, double x, double* u,
               double* ux) {
  double vals[36];
  const int r = s.order();
  s.basis_values(e, x, ux ? 1 : 0, vals);
  double v0 = 0, v1 = 0;
  for (int i = 0; i < r; ++i) {
    const int g = s.span_index(e, i);
    if (g < 0) continue;
    v0 += c[g] * vals[i];
    if (ux) v1 += c[g] * vals[r + i];
  }
  *u = v0;
  if (ux) *ux = v1;
}

}  // namespace

Invariants invariants_single(const CoefficientArray& u, const QuadratureRule& rule, double k) {
  const SplineSpace& s = *u.space;
  Invariants inv;
  for_each_quad_point(s, rule, {}, [&](int e, double x, double w) {
    double uu, ux;
    spline_at(s, u.c, e, x, &uu, &ux);
    inv.H0 += w * uu;
    inv.H1 += w * (uu * uu + ux * ux);
    inv.H2 += w * (uu * (uu * uu + ux * ux) + 2.0 * k * uu * uu);
  });
  return inv;
}

Invariants invariants_system(const CoefficientArray& m, const CoefficientArray& u,
                             const QuadratureRule& rule, double k) {
  if (m.space != u.space) throw Error("invariants_system: mismatched spaces");
  const SplineSpace& s = *u.space;
  Invariants inv;
  for_each_quad_point(s, rule, {}, [&](int e, double x, double w) {
    double mm, uu, ux;
    spline_at(s, m.c, e, x, &mm, nullptr);
    spline_at(s, u.c, e, x, &uu, &ux);
    inv.H0 += w * mm;
    inv.H1 += w * mm * uu;
    inv.H2 += w * (uu * uu * mm - uu * ux * ux + 2.0 * k * uu * uu);
  });
  return inv;
}

InvariantRecord invariant_record(double t, const Invariants& now, const Invariants& initial) {
  InvariantRecord rec;
  rec.t = t;
  rec.value = now;
  auto drift = [](double cur, double init) -> double {
    if (cur == 0.0) return std::numeric_limits<double>::infinity();
    const double rel = std::abs((cur - init) / cur);
    return rel > 0 ? std::log10(rel) : -std::numeric_limits<double>::infinity();
  };
  rec.E0 = drift(now.H0, initial.H0);
  rec.E1 = drift(now.H1, initial.H1);
  rec.E2 = drift(now.H2, initial.H2);
  return rec;
}

double discrete_max_node(const CoefficientArray& u, const QuadratureRule& rule) {
  const SplineSpace& s = *u.space;
  double best_x = s.a(), best_v = -std::numeric_limits<double>::infinity();
  for_each_quad_point(s, rule, {}, [&](int e, double x, double) {
    double v;
    spline_at(s, u.c, e, x, &v, nullptr);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  });
  return best_x;
}

namespace {

double bisect_deriv_zero(const CoefficientArray& u, double lo, double hi) {
  double flo = eval_spline(u, lo, 1);
  double fhi = eval_spline(u, hi, 1);
  if (flo * fhi > 0) throw Error("locate_peak: empty bracket (no derivative sign change)");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = eval_spline(u, mid, 1);
    if ((flo >= 0 && fm >= 0) || (flo < 0 && fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-12 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double locate_peak(const CoefficientArray& u, double hint, PeakMode mode) {
  const SplineSpace& s = *u.space;
  const double h = s.h();
  if (mode == PeakMode::mesh_node) {
    double best_x = s.breakpoint(0), best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.elements() + (s.periodic_kind() ? 0 : 1); ++i) {
      const double x = s.breakpoint(i);
      const double v = eval_spline(u, x, 0);
      if (v > best_v) {
        best_v = v;
        best_x = x;
      }
    }
    return best_x;
  }
  if (mode == PeakMode::peakon) {
    const double x = bisect_deriv_zero(u, hint - 2.0 * h, hint + 2.0 * h);
    return s.wrap(x);
  }
  // smooth: Newton on u' = 0 with bisection fallback
  double x = hint;
  bool converged = false;
  for (int it = 0; it < 60; ++it) {
    const double d1 = eval_spline(u, x, 1);
    const double d2 = eval_spline(u, x, 2);
    if (d2 == 0.0) break;
    const double step = d1 / d2;
    x -= step;
    if (std::abs(x - hint) > 10.0 * h) break;  // diverging
    if (std::abs(step) < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged) x = bisect_deriv_zero(u, hint - 2.0 * h, hint + 2.0 * h);
  return s.wrap(x);
}

namespace {

// Wrap y into [-L/2, L/2); identity when L <= 0.
double wrap_half(double y, double L) {
  if (L <= 0) return y;
  double z = std::fmod(y + 0.5 * L, L);
  if (z < 0) z += L;
  return z - 0.5 * L;
}

// zeta^2(s) = int (u_h - ref(.,s))^2 / norm0sq over the domain.
double shape_zeta_sq(const CoefficientArray& u, const ReferenceSolution& ref, double s,
                     const QuadratureRule& rule, double norm0sq) {
  const SplineSpace& sp = *u.space;
  const std::vector<double> splits = ref.kinks(s, sp.a());
  double acc = 0;
  for_each_quad_point(sp, rule, splits, [&](int e, double x, double w) {
    double uh;
    spline_at(sp, u.c, e, x, &uh, nullptr);
    const double d = uh - ref.value(x, s);
    acc += w * d * d;
  });
  return acc / norm0sq;
}

// d/ds zeta^2 = 2 V int (u_h - ref) * ref_x / norm0sq (translation in s).
double shape_zeta_sq_deriv(const CoefficientArray& u, const ReferenceSolution& ref, double s,
                           const QuadratureRule& rule, double norm0sq) {
  const SplineSpace& sp = *u.space;
  const std::vector<double> splits = ref.kinks(s, sp.a());
  double acc = 0;
  for_each_quad_point(sp, rule, splits, [&](int e, double x, double w) {
    double uh;
    spline_at(sp, u.c, e, x, &uh, nullptr);
    acc += w * (uh - ref.value(x, s)) * ref.deriv_x(x, s);
  });
  return 2.0 * ref.speed() * acc / norm0sq;
}

}  // namespace

IndicatorRecord indicators(const CoefficientArray& u, const ReferenceSolution& ref, double t,
                           double tau, std::optional<double> prev_x_star_unwrapped,
                           const QuadratureRule& rule, bool with_shape) {
  const SplineSpace& sp = *u.space;
  const double L = ref.domain_length();
  IndicatorRecord rec;
  rec.t = t;
  rec.tau = tau;

  const double hint = discrete_max_node(u, rule);
  PeakMode mode;
  if (sp.order() == 2)
    mode = PeakMode::mesh_node;
  else
    mode = ref.lipschitz() ? PeakMode::peakon : PeakMode::smooth;
  rec.x_star = locate_peak(u, hint, mode);

  const double predicted = ref.crest(t);
  rec.x_star_unwrapped = predicted + wrap_half(rec.x_star - sp.wrap(predicted), L);
  rec.e_amp = std::abs(eval_spline(u, rec.x_star, 0) - ref.amplitude()) / std::abs(ref.amplitude());
  rec.e_phase = std::abs(rec.x_star_unwrapped - predicted);
  if (prev_x_star_unwrapped && tau > 0) {
    const double vh = (rec.x_star_unwrapped - *prev_x_star_unwrapped) / tau;
    rec.e_speed = std::abs(ref.speed() - vh);
  }
  if (!with_shape) return rec;

  // shape error: minimize zeta(s) near s = t (Newton on d/ds zeta^2 with a
  // finite-difference slope, expanding-bracket bisection as fallback)
  double norm0sq = 0;
  {
    const std::vector<double> splits = ref.kinks(0.0, sp.a());
    for_each_quad_point(sp, rule, splits, [&](int, double x, double w) {
      const double v = ref.value(x, 0.0);
      norm0sq += w * v * v;
    });
  }
  const double zeta_t = shape_zeta_sq(u, ref, t, rule, norm0sq);
  double z_best = zeta_t;
  {
    double s = t + rec.e_phase / std::max(ref.speed(), 1e-30) *
                       ((rec.x_star_unwrapped > predicted) ? 1.0 : -1.0);
    bool newton_ok = false;
    const double delta = std::max(1e-7, 1e-7 * std::abs(t));
    for (int it = 0; it < 40; ++it) {
      const double g = shape_zeta_sq_deriv(u, ref, s, rule, norm0sq);
      const double gp =
          (shape_zeta_sq_deriv(u, ref, s + delta, rule, norm0sq) -
           shape_zeta_sq_deriv(u, ref, s - delta, rule, norm0sq)) /
          (2 * delta);
      if (!(std::isfinite(g)) || !(std::isfinite(gp)) || gp == 0.0) break;
      const double step = g / gp;
      s -= step;
      if (std::abs(s - t) > std::max(1.0, 4.0 * rec.e_phase / std::max(ref.speed(), 1e-30)) + 1.0)
        break;
      if (std::abs(step) < 1e-12 * (1.0 + std::abs(t))) {
        newton_ok = true;
        break;
      }
    }
    if (!newton_ok) {
      // bracket the minimizer: g < 0 left of it, g > 0 right of it
      double w = std::max(sp.h(), 2.0 * rec.e_phase / std::max(ref.speed(), 1e-30));
      double lo = t - w, hi = t + w;
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        if (shape_zeta_sq_deriv(u, ref, lo, rule, norm0sq) < 0 &&
            shape_zeta_sq_deriv(u, ref, hi, rule, norm0sq) > 0) {
          ok = true;
          break;
        }
        w *= 2;
        lo = t - w;
        hi = t + w;
      }
      if (ok) {
        for (int it = 0; it < 100; ++it) {
          const double mid = 0.5 * (lo + hi);
          (shape_zeta_sq_deriv(u, ref, mid, rule, norm0sq) < 0 ? lo : hi) = mid;
          if (hi - lo < 1e-12 * (1.0 + std::abs(t))) break;
        }
        s = 0.5 * (lo + hi);
        newton_ok = true;
      }
    }
    if (newton_ok) {
      const double z = shape_zeta_sq(u, ref, s, rule, norm0sq);
      if (z < z_best) z_best = z;
    }
  }
  rec.e_shape = std::sqrt(std::max(0.0, z_best));
  return rec;
}

double norm_error(const CoefficientArray& u, const std::function<double(double)>& exact,
                  const std::function<double(double)>& exact_dx, NormKind kind, bool normalized,
                  const QuadratureRule& rule, std::span<const double> split_points) {
  const SplineSpace& s = *u.space;
  std::vector<double> splits(split_points.begin(), split_points.end());
  for (double& x : splits) x = s.wrap(x);
  std::sort(splits.begin(), splits.end());

  if (kind == NormKind::Linf) {
    double emax = 0, fmax = 0;
    auto visit = [&](double x) {
      const double d = std::abs(eval_spline(u, x, 0) - exact(x));
      emax = std::max(emax, d);
      fmax = std::max(fmax, std::abs(exact(x)));
    };
    for_each_quad_point(s, rule, splits, [&](int, double x, double) { visit(x); });
    for (int i = 0; i <= s.elements(); ++i) visit(s.breakpoint(i));
    return normalized ? emax / fmax : emax;
  }

  const bool need_dx = kind == NormKind::H1;
  if (need_dx && !exact_dx) throw Error("norm_error: H1 norm needs the exact derivative");
  double err = 0, nrm = 0;
  for_each_quad_point(s, rule, splits, [&](int e, double x, double w) {
    double uh, uhx;
    spline_at(s, u.c, e, x, &uh, need_dx ? &uhx : nullptr);
    const double f = exact(x);
    double e2 = (uh - f) * (uh - f);
    double f2 = f * f;
    if (need_dx) {
      const double fx = exact_dx(x);
      e2 += (uhx - fx) * (uhx - fx);
      f2 += fx * fx;
    }
    err += w * e2;
    nrm += w * f2;
  });
  const double abs_err = std::sqrt(std::max(0.0, err));
  return normalized ? abs_err / std::sqrt(std::max(nrm, 1e-300)) : abs_err;
}

double norm_error(const CoefficientArray& u, const ReferenceSolution& ref, double t, NormKind kind,
                  bool normalized, const QuadratureRule& rule) {
  const std::vector<double> splits = ref.kinks(t, u.space->a());
  return norm_error(
      u, [&](double x) { return ref.value(x, t); }, [&](double x) { return ref.deriv_x(x, t); },
      kind, normalized, rule, splits);
}

std::vector<double> convergence_rates(std::span<const double> errors, std::span<const double> hs) {
  if (errors.size() != hs.size()) throw Error("convergence_rates: length mismatch");
  if (errors.size() < 2) throw Error("convergence_rates: need at least two levels");
  for (double e : errors)
    if (!(e > 0)) throw Error("convergence_rates: errors must be positive");
  std::vector<double> rates;
  for (size_t i = 1; i < errors.size(); ++i)
    rates.push_back(std::log(errors[i - 1] / errors[i]) / std::log(hs[i - 1] / hs[i]));
  return rates;
}

}  // namespace chfem
