// Modified Heaviside step, its monotone bridge, and the tangent-angle profile f.
#pragma once

#include <memory>
#include <vector>

#include "nondini/modulus.hpp"

namespace nondini {

inline constexpr double kPi = 3.14159265358979323846;

// Monotone C1 piecewise cubic Hermite on [x0, x_star] from (v0, d0) to (1, 0).
struct BridgeSpline {
  double x0 = 0, x_star = 0;
  double v0 = 0, v1 = 1;
  double d0 = 0, d1 = 0;
  std::vector<double> knots, values, slopes;
  double g_lip = 0;  // sup |g'|

  double operator()(double x) const;
  double derivative(double x) const;
};

BridgeSpline build_bridge(double x0, double x_star, double v0, double d0);
BridgeSpline build_bridge(const SmoothedModulus& sm);

// 0 on (-inf,0], theta-tilde on (0,x0], bridge on (x0,x_star), 1 on [x_star,inf).
class Htilde {
 public:
  Htilde(SmoothedModulus sm, BridgeSpline bridge);
  explicit Htilde(const SmoothedModulus& sm) : Htilde(sm, build_bridge(sm)) {}

  double operator()(double x) const;
  double derivative(double x) const;  // one-sided from the right at knots; x != 0
  // sup of H-tilde' over [a,b] with 0 < a <= b, by dense sampling plus local refinement.
  double sup_derivative(double a, double b) const;

  const SmoothedModulus& modulus() const { return sm_; }
  const BridgeSpline& bridge() const { return bridge_; }
  double x0() const { return sm_.x0; }
  double x_star() const { return sm_.x_star; }

 private:
  SmoothedModulus sm_;
  BridgeSpline bridge_;
};

double eval_Htilde(const SmoothedModulus& sm, const BridgeSpline& bridge, double x);

// sup_{|x|<=r} |H-tilde(x) - H-tilde(0)|, equal to theta-tilde(r) by monotonicity.
double modulus_at_origin(const SmoothedModulus& sm, const BridgeSpline& bridge, double r);

enum class ProfileMode { Lipschitz, C1 };
const char* to_string(ProfileMode m);

// f(x) = c * sum_k a_k * S(x - x_k) with S the Heaviside step or H-tilde.
struct TangentProfile {
  ProfileMode mode = ProfileMode::C1;
  double c = 1.0;
  std::vector<double> a;
  std::vector<double> x;
  std::shared_ptr<const Htilde> step;  // C1 mode only
  double tail_tol = 1e-8;

  double c_prime() const;
  size_t size() const { return a.size(); }
  // delta_k: distance from x_k to the rest of the jump set (including 0).
  double delta(size_t k) const;
  // x lies on a jump location
  bool is_jump(double x) const;
  // Right end of the region where f is non-constant.
  double support_right() const;
  double support_left() const;
};

TangentProfile make_profile(ProfileMode mode, double c, std::vector<double> a, std::vector<double> x,
                            std::shared_ptr<const Htilde> step = nullptr);

// x_k = 2^-k, a_k = 2^-k for k = 1..K, c chosen so c * sum a_k = c_prime.
TangentProfile default_profile(ProfileMode mode, std::shared_ptr<const Htilde> step, int K = 20,
                               double c_prime = kPi / 4);

// f = 0: the half-plane itself.
TangentProfile flat_profile();

// Single step of height c at 0: the wedge.
TangentProfile wedge_profile(double c);

double eval_profile(const TangentProfile& p, double x);
// f(base + offset) with each shifted argument formed as (base - x_k) + offset, so a small
// offset from a jump base keeps full relative precision.
double eval_profile(const TangentProfile& p, double base, double offset);
double profile_derivative(const TangentProfile& p, double x);

}  // namespace nondini
