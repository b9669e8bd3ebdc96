#include "nondini/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nondini {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr int kMoments = 48;
constexpr double kFarRatio = 1.0 / 3.0;  // (1/3)^48 ~ 1e-23

// Knots of H-tilde plus dyadic points 2^-j down to scale/16 inside (lo, hi).
std::vector<double> step_breakpoints(const Htilde& H, double lo, double hi, double scale,
                                     std::initializer_list<double> extra) {
  std::vector<double> pts(H.bridge().knots.begin(), H.bridge().knots.end());
  const double floor = std::max(scale / 16, 1e-300);
  for (int j = 0; j < 1070; ++j) {
    const double d = std::ldexp(1.0, -j);
    if (d < floor) break;
    if (d > lo && d < hi) pts.push_back(d);
  }
  for (double e : extra) pts.push_back(e);
  return sorted_unique(std::move(pts), lo, hi);
}

// 0*log(0) terms are zero here: the coefficient vanishes exactly at the endpoint.
double weighted_log(double w, double arg) { return w == 0.0 ? 0.0 : w * std::log(arg); }

}  // namespace

double pv_log_integral(double a, double b, double x) {
  if (!(a < b)) throw std::domain_error("pv_log_integral needs a < b");
  if (x >= a && x <= b) throw std::domain_error("pv_log_integral needs x outside [a,b]");
  return std::log(std::abs(x - a)) - std::log(std::abs(x - b));
}

KValue K_heaviside(double x) {
  if (x == 0) return KValue::minus_infinity();
  return KValue::finite(std::log(std::abs(x)) / kPi);
}

HilbertEvaluator::HilbertEvaluator(TangentProfile profile, double quad_tol)
    : profile_(std::move(profile)), quad_tol_(quad_tol) {
  if (!(quad_tol_ > 0)) throw std::invalid_argument("quad_tol must be positive");
  if (profile_.mode == ProfileMode::C1) {
    if (!profile_.step) throw std::invalid_argument("C1 profile without H-tilde");
    const Htilde& H = *profile_.step;
    const double xs = H.x_star();
    const auto pts = step_breakpoints(H, 0.0, xs, 1e-300, {});
    for (int n = 0; n < kMoments; ++n) {
      auto f = [&](double y) { return H(y) * std::pow(y / xs, n); };
      moments_.push_back(value_or_throw(integrate_breakpoints<double>(f, pts, {1e-17, 1e-15, 4000}), "moments") / xs);
    }
    k_x0_ = pi_K_Htilde(profile_.step->x0()) / kPi;
    k_xstar_ = pi_K_Htilde(profile_.step->x_star()) / kPi;
  }
}

double HilbertEvaluator::pi_K_Htilde(double x) const {
  const Htilde& H = *profile_.step;
  const double x0 = H.x0(), xs = H.x_star();
  const QuadOptions opt{0.5 * kPi * quad_tol_, 0.0, 4000};
  auto integrate = [&](auto&& f, double lo, double hi, double scale, std::initializer_list<double> extra) {
    return value_or_throw(integrate_breakpoints<double>(f, step_breakpoints(H, lo, hi, scale, extra), opt),
                          "K H-tilde");
  };

  if (far_field(x)) return cauchy_far(x).real() + std::log(std::abs(x - xs));
  if (x < 0) {
    // int_0^{x*} H(y)/(x-y) dy + log(x* - x)
    auto f = [&](double y) { return H(y) / (x - y); };
    return integrate(f, 0.0, xs, -x, {}) + std::log(xs - x);
  }
  if (x < xs) {
    // PV int_0^{x*} H/(x-y) = H(x)[log x - log(x*-x)] + int_0^{x*} (H(y)-H(x))/(x-y) dy.
    // For x < x0 the singular piece is the PV over [0,x0] plus a regular integral on [x0,x*];
    // for x0 < x the split is [0,x0] regular plus a PV over [x0,x*]. Both reduce to this.
    const double hx = H(x);
    const double dx = x == x0 ? H.derivative(x0) : H.derivative(x);
    auto f = [&](double y) { return y == x ? -dx : (H(y) - hx) / (x - y); };
    const double regular = integrate(f, 0.0, xs, x, {x, 0.5 * x, x0});
    return hx * std::log(x) + weighted_log(1.0 - hx, xs - x) + regular;
  }
  if (x == xs) {
    // int_0^{x0} H/(x*-y) + int_{x0}^{x*} (H-1)/(x*-y) + log(x* - x0), written as one integral.
    auto f = [&](double y) { return (H(y) - 1.0) / (xs - y); };
    return integrate(f, 0.0, xs, xs, {}) + std::log(xs);
  }
  // x > x*: int_0^{x*} H/(x-y) + log(x - x*) = int_0^{x*} (H-1)/(x-y) + log x.
  auto f = [&](double y) { return (H(y) - 1.0) / (x - y); };
  return integrate(f, 0.0, xs, x, {}) + std::log(x);
}

bool HilbertEvaluator::far_field(std::complex<double> w) const {
  return !moments_.empty() && std::abs(w) * kFarRatio >= profile_.step->x_star();
}

std::complex<double> HilbertEvaluator::cauchy_far(std::complex<double> w) const {
  // 1/(w - y) = sum_n y^n / w^(n+1)
  const double xs = profile_.step->x_star();
  const std::complex<double> q = xs / w;
  std::complex<double> s = 0.0, qn = q;
  for (double m : moments_) {
    s += m * qn;
    qn *= q;
  }
  return s;
}

KValue HilbertEvaluator::K_Htilde(double x) const {
  if (!profile_.step) throw std::logic_error("K_Htilde needs a C1 profile");
  if (x == 0) return KValue::minus_infinity();
  return KValue::finite(pi_K_Htilde(x) / kPi);
}

KValue HilbertEvaluator::K_step(double x) const {
  return profile_.mode == ProfileMode::Lipschitz ? K_heaviside(x) : K_Htilde(x);
}

ProfileK HilbertEvaluator::K_profile(double base, double offset) const {
  ProfileK out;
  const auto& p = profile_;
  if (p.size() == 0) {
    out.value = KValue::finite(0.0);
    return out;
  }
  auto arg = [&](size_t k) { return (base - p.x[k]) + offset; };
  int nearest = 0;
  for (size_t k = 1; k < p.size(); ++k)
    if (std::abs(arg(k)) < std::abs(arg(static_cast<size_t>(nearest)))) nearest = static_cast<int>(k);
  double rest = 0.0;
  KValue own;
  for (size_t k = 0; k < p.size(); ++k) {
    KValue v = K_step(arg(k));
    if (static_cast<int>(k) == nearest)
      own = v;
    else
      rest += p.c * p.a[k] * v.value;  // only the nearest term can be singular
  }
  out.nearest = nearest;
  out.regular_part = rest;
  out.value = own.neg_inf ? KValue::minus_infinity()
                          : KValue::finite(rest + p.c * p.a[static_cast<size_t>(nearest)] * own.value);
  return out;
}

double HilbertEvaluator::K_profile_value(double x) const {
  ProfileK k = K_profile(x);
  if (k.value.neg_inf) throw std::domain_error("Kf is -infinity at a jump location");
  return k.value.value;
}

std::pair<double, double> HilbertEvaluator::decay_bounds(double x) const {
  const Htilde& H = *profile_.step;
  const double x0 = H.x0(), xs = H.x_star();
  if (!(x > 0 && x < x0)) throw std::domain_error("decay_bounds needs 0 < x < x0");
  const double f = H(x), f0 = H(x0);
  const double s1 = H.sup_derivative(x, x0);
  const double s2 = H.sup_derivative(0.5 * x, x);
  const double lower = (1 - f) * std::log(x0 - x) + f * std::log(x) - s1 * (x0 - x) - s2 * 0.5 * x - f0 * kLn2;
  const double upper = (1 - f0) * std::log(xs - x) + (f0 - f) * std::log(x0 - x) + f * std::log(x);
  return {lower, upper};
}

Bracket HilbertEvaluator::region_bracket(double x) const {
  const Htilde& H = *profile_.step;
  const double x0 = H.x0(), xs = H.x_star();
  const double f0 = H(x0);
  const double glip = H.bridge().g_lip;
  if (x == 0) throw std::domain_error("no finite bracket at 0");
  if (x < 0) return {(1 - f0) * std::log(x0 - x) + f0 * std::log(-x), std::log(xs - x), "left"};
  if (x < x0) {
    auto [lo, hi] = decay_bounds(x);
    return {lo, hi, "near_origin"};
  }
  if (x == x0) {
    const double s = H.sup_derivative(0.5 * x0, x0);
    return {f0 * std::log(0.5 * x0) + (1 - f0) * std::log(xs - x0) - glip * (xs - x0) - s * 0.5 * x0,
            f0 * std::log(x0) + (1 - f0) * std::log(xs - x0), "at_x0"};
  }
  if (x < xs) {
    const double f = H(x);
    return {f * std::log(x - x0) + weighted_log(1 - f, xs - x) - glip * (xs - x0),
            (f - f0) * std::log(x - x0) + f0 * std::log(x) + weighted_log(1 - f, xs - x), "bridge"};
  }
  if (x == xs)
    return {std::log(xs - x0) - glip * (xs - x0), f0 * std::log(xs) + (1 - f0) * std::log(xs - x0), "at_x_star"};
  return {std::log(x - xs), std::log(x), "right"};
}

Bracket HilbertEvaluator::literal_bracket_at_x_star() const {
  const Htilde& H = *profile_.step;
  const double x0 = H.x0(), f0 = H(x0);
  return {std::log(x0), -(1 - f0) * kLn2 + f0 * std::log(x0), "at_x_star_literal"};
}

double distance_to_jumps(const TangentProfile& p, double x) {
  double d = std::abs(x);
  for (double xk : p.x) d = std::min(d, std::abs(x - xk));
  return d;
}

OracleResult pv_quadrature_oracle(const TangentProfile& p, double x, std::vector<double> eps, double quad_tol) {
  OracleResult out;
  out.eps = eps;
  if (eps.size() < 2) throw std::invalid_argument("oracle needs at least two eps values");
  for (size_t j = 0; j < eps.size(); ++j) {
    if (!(eps[j] > 0)) throw std::invalid_argument("eps values must be positive");
    if (j > 0 && !(eps[j] < eps[j - 1])) throw std::invalid_argument("eps values must decrease");
  }
  if (p.size() == 0) {
    out.raw.assign(eps.size(), 0.0);
    return out;
  }
  const double L = p.support_left();
  const double A = std::max({p.support_right(), 1.0, x + eps.front()}) + 1.0;
  const double cp = p.c_prime();

  // Features of f: jump points and, in C1 mode, the knots of each shifted H-tilde
  // together with dyadic points accumulating at each x_k from the right.
  std::vector<double> feats{-1.0, 1.0};
  for (double xk : p.x) {
    feats.push_back(xk);
    if (p.mode == ProfileMode::C1) {
      for (double kn : p.step->bridge().knots) feats.push_back(xk + kn);
      for (int j = 0; j < 45; ++j) feats.push_back(xk + std::ldexp(p.step->x0(), -j));
    }
  }

  const QuadOptions opt{quad_tol, 0.0, 20000};
  for (double e : eps) {
    auto g = [&](double y) {
      double k = 1.0 / (x - y);
      if (std::abs(y) > 1) k += 1.0 / y;
      return eval_profile(p, y) * k;
    };
    auto piece = [&](double lo, double hi) {
      if (!(hi > lo)) return 0.0;
      std::vector<double> pts(feats);
      for (double d = e; d < 4.0; d *= 2) {
        pts.push_back(x - d);
        pts.push_back(x + d);
      }
      pts = sorted_unique(std::move(pts), lo, hi);
      return value_or_throw(integrate_breakpoints<double>(g, pts, opt), "pv oracle");
    };
    double total = piece(L, std::min(x - e, A)) + piece(std::max(x + e, L), A);
    // int_A^inf c' [1/(x-y) + 1/y] dy
    total += cp * (std::log(A - x) - std::log(A));
    out.raw.push_back(total / kPi);
  }
  // Linear-in-eps extrapolation from consecutive pairs.
  auto extrap = [&](size_t j) {
    const double e0 = eps[j], e1 = eps[j + 1];
    return (e0 * out.raw[j + 1] - e1 * out.raw[j]) / (e0 - e1);
  };
  const size_t n = eps.size();
  out.value = extrap(n - 2);
  out.error_estimate = n >= 3 ? std::abs(out.value - extrap(n - 3)) : std::abs(out.raw[n - 1] - out.raw[n - 2]);
  if (!std::isfinite(out.value)) throw std::runtime_error("pv oracle extrapolation produced a non-finite value");
  return out;
}

OracleResult pv_quadrature_oracle(const TangentProfile& p, double x, double quad_tol) {
  const double d = distance_to_jumps(p, x);
  if (!(d > 0)) throw std::domain_error("oracle point sits on a jump");
  std::vector<double> eps;
  for (int j = 0; j <= 10; ++j) eps.push_back(std::ldexp(d, -j));
  return pv_quadrature_oracle(p, x, eps, quad_tol);
}

}  // namespace nondini
