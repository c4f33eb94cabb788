#include "chfem/exact_solutions.hpp"

#include <cmath>

#include "chfem/errors.hpp"

namespace chfem {

WaveParams WaveParams::from_kp(double kappa, double p, double center0) {
  if (!(kappa > 0) || !(p > 0) || !(kappa * p < 1))
    throw Error("WaveParams: need kappa > 0, p > 0, kappa*p < 1");
  WaveParams wp;
  wp.kappa = kappa;
  wp.p = p;
  wp.c_tilde = 2 * kappa * kappa / (1 - kappa * kappa * p * p);
  wp.V = wp.c_tilde + kappa * kappa;
  wp.center0 = center0;
  return wp;
}

WaveParams WaveParams::from_speed(double kappa, double V, double center0) {
  if (!(kappa > 0)) throw Error("WaveParams: kappa must be positive");
  const double ct = V - kappa * kappa;
  if (!(V > 3 * kappa * kappa))
    throw Error("WaveParams: no smooth wave of this speed (need V > 3 kappa^2)");
  const double p = std::sqrt((ct - 2 * kappa * kappa) / (ct * kappa * kappa));
  return from_kp(kappa, p, center0);
}

double smooth_tw_xi(const WaveParams& wp, double theta) {
  const double kp = wp.kappa * wp.p;
  double logterm;
  if (theta > 0) {
    const double em = std::exp(-theta);
    logterm = std::log(((1 + kp) * em + (1 - kp)) / ((1 - kp) * em + (1 + kp)));
  } else {
    const double ep = std::exp(theta);
    logterm = std::log(((1 + kp) + (1 - kp) * ep) / ((1 - kp) + (1 + kp) * ep));
  }
  return theta / kp + logterm;
}

double smooth_tw_dxi_dtheta(const WaveParams& wp, double theta) {
  const double kp = wp.kappa * wp.p;
  double t1, t2;
  if (theta > 0) {
    const double em = std::exp(-theta);
    t1 = (1 - kp) / ((1 + kp) * em + (1 - kp));
    t2 = (1 + kp) / ((1 - kp) * em + (1 + kp));
  } else {
    const double ep = std::exp(theta);
    t1 = (1 - kp) * ep / ((1 + kp) + (1 - kp) * ep);
    t2 = (1 + kp) * ep / ((1 - kp) + (1 + kp) * ep);
  }
  return 1.0 / kp + t1 - t2;
}

double smooth_tw_theta(const WaveParams& wp, double xi, double theta_guess) {
  double theta = theta_guess;
  for (int it = 0; it < 60; ++it) {
    const double f = smooth_tw_xi(wp, theta) - xi;
    const double fp = smooth_tw_dxi_dtheta(wp, theta);
    const double step = f / fp;
    theta -= step;
    if (std::abs(step) < 1e-13 * (1.0 + std::abs(theta))) return theta;
  }
  // Bisection fallback; the map is strictly increasing and theta/(kappa p)
  // dominates, so a guaranteed bracket around kappa*p*xi exists.
  const double kp = wp.kappa * wp.p;
  const double span = kp * std::abs(std::log((1 - kp) / (1 + kp))) + 1.0;
  double lo = kp * xi - span, hi = kp * xi + span;
  double flo = smooth_tw_xi(wp, lo) - xi;
  double fhi = smooth_tw_xi(wp, hi) - xi;
  for (int it = 0; it < 100 && flo * fhi > 0; ++it) {
    lo -= span;
    hi += span;
    flo = smooth_tw_xi(wp, lo) - xi;
    fhi = smooth_tw_xi(wp, hi) - xi;
  }
  if (flo * fhi > 0) throw Error("smooth_tw_theta: failed to bracket (map should be monotone)");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = smooth_tw_xi(wp, mid) - xi;
    (fm <= 0 ? lo : hi) = mid;
    if (hi - lo < 1e-12 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

double sech2_half(double theta) {
  const double e = std::exp(-std::abs(theta));
  const double s = 2 * std::sqrt(e) / (1 + e);
  return s * s;
}

double profile_from_theta(const WaveParams& wp, double theta) {
  const double s = sech2_half(theta);
  const double cp2 = wp.c_tilde * wp.p * wp.p;
  return wp.kappa * wp.kappa + wp.c_tilde * cp2 * s / (2 + cp2 * s);
}

double dprofile_dtheta(const WaveParams& wp, double theta) {
  const double s = sech2_half(theta);
  const double cp2 = wp.c_tilde * wp.p * wp.p;
  const double e = std::exp(-std::abs(theta));
  const double tanh_half = (theta >= 0 ? 1.0 : -1.0) * (1 - e) / (1 + e);
  const double dsdtheta = -s * tanh_half;
  const double denom = 2 + cp2 * s;
  return 2 * wp.c_tilde * cp2 / (denom * denom) * dsdtheta;
}

}  // namespace

double smooth_tw_profile(const WaveParams& wp, double xi) {
  const double theta = smooth_tw_theta(wp, xi, wp.kappa * wp.p * xi);
  return profile_from_theta(wp, theta);
}

double smooth_tw_profile_deriv(const WaveParams& wp, double xi) {
  const double theta = smooth_tw_theta(wp, xi, wp.kappa * wp.p * xi);
  return dprofile_dtheta(wp, theta) / smooth_tw_dxi_dtheta(wp, theta);
}

double smooth_tw_eval(const WaveParams& wp, double x, double t) {
  return smooth_tw_profile(wp, x - wp.center0 - wp.V * t);
}

double smooth_tw_amplitude(const WaveParams& wp) {
  const double cp2 = wp.c_tilde * wp.p * wp.p;
  return wp.kappa * wp.kappa + wp.c_tilde * cp2 / (2 + cp2);
}

double SmoothTwEvaluator::value_at_xi(double xi) {
  const double start = have_guess_ ? guess_ : wp_.kappa * wp_.p * xi;
  guess_ = smooth_tw_theta(wp_, xi, start);
  have_guess_ = true;
  return profile_from_theta(wp_, guess_);
}

double SmoothTwEvaluator::deriv_at_xi(double xi) {
  const double start = have_guess_ ? guess_ : wp_.kappa * wp_.p * xi;
  guess_ = smooth_tw_theta(wp_, xi, start);
  have_guess_ = true;
  return dprofile_dtheta(wp_, guess_) / smooth_tw_dxi_dtheta(wp_, guess_);
}

double peakon_eval(const PeakonParams& pk, double x, double t) {
  return pk.c * std::exp(-std::abs(x - pk.center0 - pk.c * t));
}

FunctionHandle make_profile(const ProfileSpec& spec) {
  FunctionHandle f;
  if (spec.name == "gaussian-bump") {
    f.value = [](double x) { return 1.0 + std::exp(-x * x); };
    f.deriv = [](double x) { return -2.0 * x * std::exp(-x * x); };
    f.deriv2 = [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); };
    return f;
  }
  if (spec.name == "rational-6.10" || spec.name == "rational") {
    f.value = [](double x) { return 10.0 / ((3.0 + std::abs(x)) * (3.0 + std::abs(x))); };
    f.deriv = [](double x) {
      const double d = 3.0 + std::abs(x);
      return (x >= 0 ? -1.0 : 1.0) * 20.0 / (d * d * d);
    };
    f.deriv2 = [](double x) {
      const double d = 3.0 + std::abs(x);
      return 60.0 / (d * d * d * d);
    };
    f.tag = Smoothness::lipschitz;
    f.kinks = {0.0};
    return f;
  }
  if (spec.name == "plateau-6.11" || spec.name == "plateau") {
    const double c = spec.amplitudes.empty() ? 0.6 : spec.amplitudes[0];
    f.value = [c](double x) {
      if (x <= -5.0) return c * std::exp(x + 5.0);
      if (x >= 5.0) return c * std::exp(-x + 5.0);
      return c;
    };
    f.deriv = [c](double x) {
      if (x < -5.0) return c * std::exp(x + 5.0);
      if (x > 5.0) return -c * std::exp(-x + 5.0);
      return 0.0;
    };
    f.deriv2 = [c](double x) {
      if (x < -5.0) return c * std::exp(x + 5.0);
      if (x > 5.0) return c * std::exp(-x + 5.0);
      return 0.0;
    };
    f.tag = Smoothness::lipschitz;
    f.kinks = {-5.0, 5.0};
    return f;
  }
  if (spec.name == "peakon") {
    std::vector<double> amps = spec.amplitudes.empty() ? std::vector<double>{1.0} : spec.amplitudes;
    std::vector<double> ctrs = spec.centers.empty()
                                   ? std::vector<double>(amps.size(), 0.0)
                                   : spec.centers;
    if (amps.size() != ctrs.size()) throw Error("peakon profile: amplitude/center count mismatch");
    for (double c : amps)
      if (!(c > 0)) throw Error("peakon profile: amplitudes must be positive");
    f.value = [amps, ctrs](double x) {
      double s = 0;
      for (size_t i = 0; i < amps.size(); ++i) s += amps[i] * std::exp(-std::abs(x - ctrs[i]));
      return s;
    };
    f.deriv = [amps, ctrs](double x) {
      double s = 0;
      for (size_t i = 0; i < amps.size(); ++i) {
        const double d = x - ctrs[i];
        s += (d >= 0 ? -1.0 : 1.0) * amps[i] * std::exp(-std::abs(d));
      }
      return s;
    };
    f.tag = Smoothness::lipschitz;
    f.kinks = ctrs;
    return f;
  }
  if (spec.name == "smooth-tw") {
    const double c0 = spec.centers.empty() ? 0.0 : spec.centers[0];
    const WaveParams wp = WaveParams::from_speed(spec.kappa, spec.V, c0);
    f.value = [wp](double x) { return smooth_tw_profile(wp, x - wp.center0); };
    f.deriv = [wp](double x) { return smooth_tw_profile_deriv(wp, x - wp.center0); };
    return f;
  }
  throw Error("unknown profile: " + spec.name);
}

ReferenceSolution ReferenceSolution::smooth_wave(const WaveParams& wp, double domain_length) {
  ReferenceSolution ref;
  ref.speed_ = wp.V;
  ref.amplitude_ = smooth_tw_amplitude(wp);
  ref.center0_ = wp.center0;
  ref.domain_length_ = domain_length;
  ref.lipschitz_ = false;
  ref.wave_ = wp;
  return ref;
}

ReferenceSolution ReferenceSolution::peakon(const PeakonParams& pk, double domain_length) {
  ReferenceSolution ref;
  ref.speed_ = pk.c;
  ref.amplitude_ = pk.c;
  ref.center0_ = pk.center0;
  ref.domain_length_ = domain_length;
  ref.lipschitz_ = true;
  ref.peakon_ = pk;
  return ref;
}

double ReferenceSolution::wrap_frame(double xi) const {
  if (domain_length_ <= 0) return xi;
  double y = std::fmod(xi + 0.5 * domain_length_, domain_length_);
  if (y < 0) y += domain_length_;
  return y - 0.5 * domain_length_;
}

double ReferenceSolution::value(double x, double t) const {
  const double xi = wrap_frame(x - center0_ - speed_ * t);
  if (wave_) return smooth_tw_profile(*wave_, xi);
  return peakon_->c * std::exp(-std::abs(xi));
}

double ReferenceSolution::deriv_x(double x, double t) const {
  const double xi = wrap_frame(x - center0_ - speed_ * t);
  if (wave_) return smooth_tw_profile_deriv(*wave_, xi);
  return (xi >= 0 ? -1.0 : 1.0) * peakon_->c * std::exp(-std::abs(xi));
}

std::vector<double> ReferenceSolution::kinks(double t, double a) const {
  if (!lipschitz_) return {};
  double pos = crest(t);
  if (domain_length_ > 0) {
    double y = std::fmod(pos - a, domain_length_);
    if (y < 0) y += domain_length_;
    pos = a + y;
  }
  return {pos};
}

std::optional<ReferenceSolution> make_reference(const ProfileSpec& spec, double domain_length) {
  if (spec.name == "smooth-tw") {
    const double c0 = spec.centers.empty() ? 0.0 : spec.centers[0];
    return ReferenceSolution::smooth_wave(WaveParams::from_speed(spec.kappa, spec.V, c0),
                                          domain_length);
  }
  if (spec.name == "peakon" && spec.amplitudes.size() <= 1) {
    PeakonParams pk;
    pk.c = spec.amplitudes.empty() ? 1.0 : spec.amplitudes[0];
    pk.center0 = spec.centers.empty() ? 0.0 : spec.centers[0];
    return ReferenceSolution::peakon(pk, domain_length);
  }
  return std::nullopt;
}

}  // namespace chfem
