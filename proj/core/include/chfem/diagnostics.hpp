#pragma once

#include <functional>
#include <optional>
#include <span>

#include "chfem/exact_solutions.hpp"
#include "chfem/spline_space.hpp"

namespace chfem {

// Conserved integrals in single-equation form:
//   H0 = int u,  H1 = int (u^2 + u_x^2),  H2 = int u (u^2 + u_x^2 + 2 k u).
struct Invariants {
  double H0 = 0, H1 = 0, H2 = 0;
};

Invariants invariants_single(const CoefficientArray& u, const QuadratureRule& rule, double k = 0);

// System form: H0 = int m, H1 = int m u, H2 = int (u^2 m - u u_x^2 + 2 k u^2).
Invariants invariants_system(const CoefficientArray& m, const CoefficientArray& u,
                             const QuadratureRule& rule, double k = 0);

struct InvariantRecord {
  double t = 0;
  Invariants value;
  // log10 relative drifts, defined for t >= dt.
  std::optional<double> E0, E1, E2;
};

InvariantRecord invariant_record(double t, const Invariants& now, const Invariants& initial);

enum class PeakMode { smooth, peakon, mesh_node };

// Quadrature node (or mesh node) where the spline attains its discrete max.
double discrete_max_node(const CoefficientArray& u, const QuadratureRule& rule);

// Peak location: Newton on u' = 0 (tolerance 1e-10) for smooth profiles with
// bisection fallback, sign-change bisection of u' on an interval of length 4h
// around the hint for peakons, and the argmax mesh node for mesh_node
// (piecewise linear) profiles.
double locate_peak(const CoefficientArray& u, double hint, PeakMode mode);

struct IndicatorRecord {
  double t = 0;
  double x_star = 0;            // wrapped into the domain
  double x_star_unwrapped = 0;  // continuous track used for phase/speed
  double e_amp = 0;
  double e_phase = 0;
  std::optional<double> e_speed;  // needs the peak location at t - tau
  double e_shape = 0;
  double tau = 0;
};

// Amplitude, phase, speed and shape errors of a numerical travelling wave
// against its exact reference. prev_x_star_unwrapped is the unwrapped peak
// location at t - tau (from the previous record). with_shape = false skips
// the shape-error minimization (cheap peak tracking between measurements).
IndicatorRecord indicators(const CoefficientArray& u, const ReferenceSolution& ref, double t,
                           double tau, std::optional<double> prev_x_star_unwrapped,
                           const QuadratureRule& rule, bool with_shape = true);

enum class NormKind { L2, H1, Linf };

// Quadrature norm of u_h - exact (Linf: max over quadrature nodes and
// breakpoints). `normalized` divides by the same norm of the exact function.
// Split points mark kinks of the exact function.
double norm_error(const CoefficientArray& u, const std::function<double(double)>& exact,
                  const std::function<double(double)>& exact_dx, NormKind kind, bool normalized,
                  const QuadratureRule& rule, std::span<const double> split_points = {});

// Convenience overload against a travelling reference at time t.
double norm_error(const CoefficientArray& u, const ReferenceSolution& ref, double t, NormKind kind,
                  bool normalized, const QuadratureRule& rule);

// rate_l = log(e_{l-1}/e_l) / log(h_{l-1}/h_l); errors must be positive.
std::vector<double> convergence_rates(std::span<const double> errors, std::span<const double> hs);

}  // namespace chfem
