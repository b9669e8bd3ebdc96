// Hilbert transform (modulo a constant) of the step profiles:
//   K h(x) = lim_{eps->0} (1/pi) int h(y) [chi_{|x-y|>=eps}/(x-y) + chi_{|y|>1}/y] dy.
#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "nondini/profile.hpp"

namespace nondini {

// A real value or the typed -infinity sentinel. Never carries a floating-point infinity.
struct KValue {
  bool neg_inf = false;
  double value = 0.0;  // meaningful only when !neg_inf

  static KValue finite(double v) { return {false, v}; }
  static KValue minus_infinity() { return {true, 0.0}; }
  // exp(-K): +inf magnitude is reported through the flag, so callers branch explicitly.
  bool is_finite() const { return !neg_inf; }
};

// int_a^b dy/(x-y) = log|x-a| - log|x-b| for x outside [a,b].
double pv_log_integral(double a, double b, double x);

// K applied to the Heaviside step: (1/pi) log|x|.
KValue K_heaviside(double x);

struct ProfileK {
  KValue value;
  // Kf(x) - c a_k K S(x - x_k) for the nearest jump x_k; finite everywhere.
  double regular_part = 0.0;
  int nearest = -1;
};

struct Bracket {
  double lower;
  double upper;
  std::string region;
};

class HilbertEvaluator {
 public:
  explicit HilbertEvaluator(TangentProfile profile, double quad_tol = 1e-10);

  const TangentProfile& profile() const { return profile_; }
  double quad_tol() const { return quad_tol_; }

  // K of the C1 step H-tilde, evaluated from the region formulas.
  KValue K_Htilde(double x) const;
  // K of the single step used by this profile (Heaviside or H-tilde).
  KValue K_step(double x) const;
  ProfileK K_profile(double x) const { return K_profile(x, 0.0); }
  // Kf(base + offset), arguments formed as in eval_profile(p, base, offset).
  ProfileK K_profile(double base, double offset) const;
  // Finite part of Kf: the -inf sentinel maps to nothing; callers must check is_finite.
  double K_profile_value(double x) const;

  // Bracket on pi * K H-tilde(x) for 0 < x < x0 from the monotonicity and sup-derivative estimates.
  std::pair<double, double> decay_bounds(double x) const;
  // Region-appropriate bracket on pi * K H-tilde(x) for any x != 0.
  Bracket region_bracket(double x) const;
  // The literal bracket at x = x_star with log x0 lower and -(1-f(x0)) log 2 + f(x0) log x0 upper.
  Bracket literal_bracket_at_x_star() const;

  // int_0^{x*} H-tilde(y)/(w - y) dy from the moment series; valid when far_field(w).
  bool far_field(std::complex<double> w) const;
  std::complex<double> cauchy_far(std::complex<double> w) const;

  double K_at_x0() const { return k_x0_; }
  double K_at_x_star() const { return k_xstar_; }

 private:
  double pi_K_Htilde(double x) const;

  TangentProfile profile_;
  double quad_tol_;
  double k_x0_ = 0.0, k_xstar_ = 0.0;
  std::vector<double> moments_;  // int_0^{x*} H y^n dy / x*^(n+1)
};

struct OracleResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::vector<double> eps;
  std::vector<double> raw;  // truncated integrals per eps
};

// Symmetric-excision quadrature of K f at x, extrapolated in eps.
OracleResult pv_quadrature_oracle(const TangentProfile& p, double x, std::vector<double> eps_sequence,
                                  double quad_tol = 1e-11);
// eps_j = 2^-j * dist(x, jumps), j = 0..10.
OracleResult pv_quadrature_oracle(const TangentProfile& p, double x, double quad_tol = 1e-11);

// Distance from x to the jump set {x_k} and 0.
double distance_to_jumps(const TangentProfile& p, double x);

}  // namespace nondini
