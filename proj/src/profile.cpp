#include "nondini/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nondini {

namespace {

double hermite_value(double xa, double xb, double ya, double yb, double ma, double mb, double x) {
  const double h = xb - xa;
  const double t = (x - xa) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * h * ma + (-2 * t3 + 3 * t2) * yb +
         (t3 - t2) * h * mb;
}

double hermite_slope(double xa, double xb, double ya, double yb, double ma, double mb, double x) {
  const double h = xb - xa;
  const double t = (x - xa) / h;
  const double t2 = t * t;
  return (6 * t2 - 6 * t) * ya / h + (3 * t2 - 4 * t + 1) * ma + (-6 * t2 + 6 * t) * yb / h +
         (3 * t2 - 2 * t) * mb;
}

// Max of |p'| on one cubic piece; p' is quadratic in t.
double piece_max_slope(double xa, double xb, double ya, double yb, double ma, double mb) {
  double best = std::max(std::abs(ma), std::abs(mb));
  // p' = A t^2 + B t + ma with t in [0,1]
  const double h = xb - xa;
  const double d = (yb - ya) / h;
  const double A = -6 * d + 3 * ma + 3 * mb;
  const double B = 6 * d - 4 * ma - 2 * mb;
  if (A != 0) {
    const double t = -B / (2 * A);
    if (t > 0 && t < 1) best = std::max(best, std::abs(hermite_slope(xa, xb, ya, yb, ma, mb, xa + t * h)));
  }
  return best;
}

// Fritsch-Carlson: a cubic Hermite piece with secant d > 0 is monotone when
// alpha = m_a/d, beta = m_b/d satisfy alpha^2 + beta^2 <= 9.
bool fc_monotone(double d, double ma, double mb) {
  if (d <= 0) return false;
  const double al = ma / d, be = mb / d;
  return al >= 0 && be >= 0 && al * al + be * be <= 9.0 + 1e-12;
}

}  // namespace

double BridgeSpline::operator()(double x) const {
  if (x <= knots.front()) return values.front();
  if (x >= knots.back()) return values.back();
  size_t i = static_cast<size_t>(std::upper_bound(knots.begin(), knots.end(), x) - knots.begin()) - 1;
  return hermite_value(knots[i], knots[i + 1], values[i], values[i + 1], slopes[i], slopes[i + 1], x);
}

double BridgeSpline::derivative(double x) const {
  if (x < knots.front() || x > knots.back()) return 0.0;
  size_t i = static_cast<size_t>(std::upper_bound(knots.begin(), knots.end(), x) - knots.begin());
  i = std::clamp<size_t>(i, 1, knots.size() - 1) - 1;
  return hermite_slope(knots[i], knots[i + 1], values[i], values[i + 1], slopes[i], slopes[i + 1], x);
}

BridgeSpline build_bridge(double x0, double x_star, double v0, double d0) {
  if (!(x0 > 0 && x0 < x_star)) throw std::domain_error("bridge needs 0 < x0 < x_star");
  if (!(v0 < 1.0) || v0 < 0) throw std::domain_error("bridge needs 0 <= v0 < 1");
  if (d0 < 0) throw std::domain_error("bridge needs a non-negative start slope");
  BridgeSpline b;
  b.x0 = x0;
  b.x_star = x_star;
  b.v0 = v0;
  b.d0 = d0;
  const double secant = (1.0 - v0) / (x_star - x0);
  if (fc_monotone(secant, d0, 0.0)) {
    b.knots = {x0, x_star};
    b.values = {v0, 1.0};
    b.slopes = {d0, 0.0};
  } else {
    // One midpoint knot. Its value sits on the line from (x0, v0) with slope
    // max(secant, d0/2), so the first piece has alpha <= 2.
    const double xm = 0.5 * (x0 + x_star);
    const double vm = v0 + std::max(secant, 0.5 * d0) * (xm - x0);
    if (!(vm < 1.0)) throw std::runtime_error("bridge start slope too large for the gap; no monotone bridge");
    const double s1 = (vm - v0) / (xm - x0), s2 = (1.0 - vm) / (x_star - xm);
    const double dm = 2.0 / (1.0 / s1 + 1.0 / s2);
    b.knots = {x0, xm, x_star};
    b.values = {v0, vm, 1.0};
    b.slopes = {d0, dm, 0.0};
    if (!fc_monotone(s1, d0, dm) || !fc_monotone(s2, dm, 0.0))
      throw std::runtime_error("bridge slope limiting failed to give a monotone cubic");
  }
  for (size_t i = 0; i + 1 < b.knots.size(); ++i)
    b.g_lip = std::max(b.g_lip, piece_max_slope(b.knots[i], b.knots[i + 1], b.values[i], b.values[i + 1],
                                                b.slopes[i], b.slopes[i + 1]));
  // Final guard on a fine grid.
  for (int j = 0; j <= 1000; ++j) {
    const double x = x0 + (x_star - x0) * j / 1000.0;
    if (b.derivative(x) < -1e-12) throw std::runtime_error("bridge is not monotone");
  }
  return b;
}

BridgeSpline build_bridge(const SmoothedModulus& sm) {
  if (!(smooth_modulus(sm, sm.x0) < 0.5)) throw std::domain_error("bridge needs theta-tilde(x0) < 1/2");
  return build_bridge(sm.x0, sm.x_star, smooth_modulus(sm, sm.x0), smoothed_derivative(sm, sm.x0));
}

Htilde::Htilde(SmoothedModulus sm, BridgeSpline bridge) : sm_(std::move(sm)), bridge_(std::move(bridge)) {
  if (bridge_.x0 != sm_.x0 || bridge_.x_star != sm_.x_star)
    throw std::invalid_argument("bridge and smoothed modulus disagree on x0 / x_star");
}

double Htilde::operator()(double x) const {
  if (x <= 0) return 0.0;
  if (x <= sm_.x0) return smooth_modulus(sm_, x);
  if (x < sm_.x_star) return bridge_(x);
  return 1.0;
}

double Htilde::derivative(double x) const {
  if (x < 0 || x >= sm_.x_star) return 0.0;
  if (x == 0) throw std::domain_error("H-tilde is not differentiable at 0");
  if (x < sm_.x0) return smoothed_derivative(sm_, x);
  return bridge_.derivative(x);
}

double Htilde::sup_derivative(double a, double b) const {
  if (!(a > 0 && a <= b)) throw std::domain_error("sup_derivative needs 0 < a <= b");
  const int n = 200;
  double best = 0.0, best_x = a;
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i <= n; ++i) {
    const double x = std::exp(la + (lb - la) * i / n);
    const double d = derivative(std::min(x, b));
    if (d > best) best = d, best_x = x;
  }
  // Golden-section polish around the best sample.
  double lo = std::max(a, best_x * std::exp(-(lb - la) / n)), hi = std::min(b, best_x * std::exp((lb - la) / n));
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60 && hi > lo; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (derivative(m1) > derivative(m2))
      hi = m2;
    else
      lo = m1;
    best = std::max({best, derivative(m1), derivative(m2)});
  }
  return best;
}

double eval_Htilde(const SmoothedModulus& sm, const BridgeSpline& bridge, double x) {
  if (x <= 0) return 0.0;
  if (x <= sm.x0) return smooth_modulus(sm, x);
  if (x < sm.x_star) return bridge(x);
  return 1.0;
}

double modulus_at_origin(const SmoothedModulus& sm, const BridgeSpline&, double r) {
  if (!(r > 0 && r <= sm.x0)) throw std::domain_error("modulus_at_origin needs 0 < r <= x0");
  return smooth_modulus(sm, r);
}

const char* to_string(ProfileMode m) { return m == ProfileMode::Lipschitz ? "lipschitz" : "c1"; }

double TangentProfile::c_prime() const { return c * std::accumulate(a.begin(), a.end(), 0.0); }

double TangentProfile::delta(size_t k) const {
  double d = std::abs(x.at(k));  // distance to the accumulation point 0
  if (x[k] == 0) d = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < x.size(); ++j)
    if (j != k) d = std::min(d, std::abs(x[j] - x[k]));
  return d;
}

bool TangentProfile::is_jump(double t) const { return std::find(x.begin(), x.end(), t) != x.end(); }

double TangentProfile::support_left() const {
  return x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
}

double TangentProfile::support_right() const {
  if (x.empty()) return 0.0;
  const double w = (mode == ProfileMode::C1 && step) ? step->x_star() : 0.0;
  return *std::max_element(x.begin(), x.end()) + w;
}

TangentProfile make_profile(ProfileMode mode, double c, std::vector<double> a, std::vector<double> x,
                            std::shared_ptr<const Htilde> step) {
  if (a.empty() || a.size() != x.size()) throw std::invalid_argument("profile needs matching a and x sequences");
  if (!(c > 0)) throw std::invalid_argument("profile needs c > 0");
  for (double v : a)
    if (!(v > 0)) throw std::invalid_argument("profile amplitudes must be positive");
  for (size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > 1) throw std::invalid_argument("jump locations must satisfy |x_k| <= 1");
    for (size_t j = 0; j < i; ++j)
      if (x[i] == x[j]) throw std::invalid_argument("jump locations must be distinct");
  }
  if (mode == ProfileMode::C1 && !step) throw std::invalid_argument("C1 profile needs an H-tilde step");
  TangentProfile p;
  p.mode = mode;
  p.c = c;
  p.a = std::move(a);
  p.x = std::move(x);
  p.step = mode == ProfileMode::C1 ? std::move(step) : nullptr;
  if (!(p.c_prime() < kPi / 2)) throw std::invalid_argument("c' = c * sum a_k must be < pi/2");
  return p;
}

TangentProfile default_profile(ProfileMode mode, std::shared_ptr<const Htilde> step, int K, double c_prime) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  std::vector<double> a, x;
  double sum = 0;
  for (int k = 1; k <= K; ++k) {
    a.push_back(std::ldexp(1.0, -k));
    x.push_back(std::ldexp(1.0, -k));
    sum += a.back();
  }
  return make_profile(mode, c_prime / sum, std::move(a), std::move(x), std::move(step));
}

TangentProfile flat_profile() {
  TangentProfile p;
  p.mode = ProfileMode::Lipschitz;
  p.c = 0.0;
  return p;
}

TangentProfile wedge_profile(double c) { return make_profile(ProfileMode::Lipschitz, c, {1.0}, {0.0}); }

double eval_profile(const TangentProfile& p, double t) { return eval_profile(p, t, 0.0); }

double eval_profile(const TangentProfile& p, double base, double offset) {
  double s = 0;
  for (size_t k = 0; k < p.a.size(); ++k) {
    const double u = (base - p.x[k]) + offset;
    const double h = p.mode == ProfileMode::Lipschitz ? (u > 0 ? 1.0 : 0.0) : (*p.step)(u);
    s += p.a[k] * h;
  }
  return p.c * s;
}

double profile_derivative(const TangentProfile& p, double t) {
  if (p.mode == ProfileMode::Lipschitz) return 0.0;
  double s = 0;
  for (size_t k = 0; k < p.a.size(); ++k) s += p.a[k] * p.step->derivative(t - p.x[k]);
  return p.c * s;
}

}  // namespace nondini
