#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chfem/projections.hpp"

namespace chfem {

// Parameters of the smooth single-pulse travelling wave. The wave profile is
// given parametrically: u = kappa^2 + ct^2 p^2 sech^2(theta/2) / (2 + ct p^2 sech^2(theta/2))
// with xi = theta/(kappa p) + log(((1+kappa p) + (1-kappa p) e^theta) /
// ((1-kappa p) + (1+kappa p) e^theta)), xi the moving-frame coordinate.
// `center0` is the initial crest position.
struct WaveParams {
  double kappa = 0;
  double p = 0;
  double c_tilde = 0;  // 2 kappa^2 / (1 - kappa^2 p^2)
  double V = 0;        // c_tilde + kappa^2
  double center0 = 0;

  static WaveParams from_kp(double kappa, double p, double center0 = 0);
  // Inverts the speed relations: p = sqrt((V - 3 kappa^2) / ((V - kappa^2) kappa^2)).
  // Throws for V <= 3 kappa^2 (no smooth wave of that speed).
  static WaveParams from_speed(double kappa, double V, double center0 = 0);
};

// Forward parametric map theta -> xi (strictly increasing).
double smooth_tw_xi(const WaveParams& wp, double theta);
double smooth_tw_dxi_dtheta(const WaveParams& wp, double theta);
// Safeguarded Newton solve of xi(theta) = xi to absolute tolerance 1e-10.
double smooth_tw_theta(const WaveParams& wp, double xi, double theta_guess);
// Profile and its xi-derivative in the moving frame.
double smooth_tw_profile(const WaveParams& wp, double xi);
double smooth_tw_profile_deriv(const WaveParams& wp, double xi);
// u(x,t) = profile(x - V t - center0 + V*0) with the crest at center0 + V t.
double smooth_tw_eval(const WaveParams& wp, double x, double t);
// Peak value, kappa^2 + ct^2 p^2 / (2 + ct p^2).
double smooth_tw_amplitude(const WaveParams& wp);

// Stateful evaluator reusing the previous theta as the Newton start; much
// faster for sweeps over nearby points.
class SmoothTwEvaluator {
 public:
  explicit SmoothTwEvaluator(const WaveParams& wp) : wp_(wp) {}
  double value_at_xi(double xi);
  double deriv_at_xi(double xi);

 private:
  WaveParams wp_;
  double guess_ = 0;
  bool have_guess_ = false;
};

// Peakon c * exp(-|x - c t - center0|); speed equals amplitude.
struct PeakonParams {
  double c = 0;
  double center0 = 0;
};
double peakon_eval(const PeakonParams& pk, double x, double t);

// Named initial profiles for the experiments. `centers`/`amplitudes` describe
// superposed peakons; smooth-tw uses (kappa, V); plateau uses amplitudes[0]
// as the plateau level.
struct ProfileSpec {
  std::string name;  // gaussian-bump | rational-6.10 | plateau-6.11 | peakon | smooth-tw | manufactured-ibvp
  double kappa = 1.0;
  double V = 0.0;
  std::vector<double> amplitudes;
  std::vector<double> centers;
};

FunctionHandle make_profile(const ProfileSpec& spec);

// Exact travelling reference for error measurement: single smooth wave or
// single peakon. `domain_length > 0` evaluates at the wrapped moving-frame
// coordinate (periodic runs).
class ReferenceSolution {
 public:
  static ReferenceSolution smooth_wave(const WaveParams& wp, double domain_length);
  static ReferenceSolution peakon(const PeakonParams& pk, double domain_length);

  double speed() const { return speed_; }
  double amplitude() const { return amplitude_; }
  double center0() const { return center0_; }
  bool lipschitz() const { return lipschitz_; }
  double domain_length() const { return domain_length_; }

  double value(double x, double t) const;
  double deriv_x(double x, double t) const;
  // d/dt at fixed x (translation: -V * du/dx).
  double deriv_t(double x, double t) const { return -speed_ * deriv_x(x, t); }
  // Kink positions inside [a, a+L) at time t (peakon case; empty otherwise).
  std::vector<double> kinks(double t, double a) const;
  // Crest position at time t, unwrapped.
  double crest(double t) const { return center0_ + speed_ * t; }

 private:
  double wrap_frame(double xi) const;

  double speed_ = 0, amplitude_ = 0, center0_ = 0, domain_length_ = 0;
  bool lipschitz_ = false;
  std::optional<WaveParams> wave_;
  std::optional<PeakonParams> peakon_;
};

// Reference for single-pulse profiles (peakon with one component, smooth-tw);
// nullopt for profiles without a closed-form evolution.
std::optional<ReferenceSolution> make_reference(const ProfileSpec& spec, double domain_length);

}  // namespace chfem
