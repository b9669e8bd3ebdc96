#include "nondini/halfplane.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nondini {

namespace {

const cplx kI{0.0, 1.0};

// (1/pi) int_0^{x*} ... potential of a single H-tilde step at w = (x, t), t > 0:
//   psi(w) = 1 + (i/pi) [ (1-h) log(w - x*) + h log w + int_0^{x*} (H(y) - h)/(w - y) dy ],
// h = H(clamp(x, 0, x*)). Re psi = P_t * H, Im psi = P_t * K H.
cplx htilde_potential(const HilbertEvaluator& ev, cplx w) {
  const Htilde& H = *ev.profile().step;
  const double tol = ev.quad_tol();
  if (ev.far_field(w)) return 1.0 + kI * (std::log(w - H.x_star()) + ev.cauchy_far(w)) / kPi;
  const double x = w.real(), t = w.imag();
  const double xs = H.x_star();
  const double h = H(std::clamp(x, 0.0, xs));
  std::vector<double> pts(H.bridge().knots.begin(), H.bridge().knots.end());
  const double scale = std::max(std::abs(x), t);
  for (int j = 0; j < 1070; ++j) {
    const double d = std::ldexp(1.0, -j);
    if (d < scale / 16) break;
    pts.push_back(d);
  }
  if (x > 0 && x < xs) {
    pts.push_back(x);
    pts.push_back(0.5 * x);
  }
  for (double d = t; d < xs; d *= 2) {
    pts.push_back(x - d);
    pts.push_back(x + d);
  }
  pts = sorted_unique(std::move(pts), 0.0, xs);
  auto f = [&](double y) { return (H(y) - h) / (w - y); };
  const cplx I = value_or_throw(integrate_breakpoints<cplx>(f, pts, {0.5 * kPi * tol, 0.0, 4000}), "potential");
  cplx s = I;
  if (h != 1.0) s += (1.0 - h) * std::log(w - xs);
  if (h != 0.0) s += h * std::log(w);
  return 1.0 + kI * s / kPi;
}

}  // namespace

UpperHalfPoint::UpperHalfPoint(double x_, double t_) : x(x_), t(t_) {
  if (!(t_ > 0)) throw std::domain_error("upper half-plane point needs t > 0");
}

double poisson_kernel(double xi, double t) {
  if (!(t > 0)) throw std::domain_error("Poisson kernel needs t > 0");
  return t / (kPi * (xi * xi + t * t));
}

double delta0(const TangentProfile& p, const UpperHalfPoint& z) {
  double d = std::hypot(z.x, z.t);
  for (double xk : p.x) d = std::min(d, std::hypot(z.x - xk, z.t));
  return d;
}

cplx complex_potential(const HilbertEvaluator& ev, cplx z) {
  const auto& p = ev.profile();
  if (z.imag() < 0) throw std::domain_error("potential needs Im z >= 0");
  if (z.imag() == 0) {
    // Boundary values f + i Kf.
    return {eval_profile(p, z.real()), ev.K_profile_value(z.real())};
  }
  cplx s = 0.0;
  for (size_t k = 0; k < p.size(); ++k) {
    const cplx w = z - p.x[k];
    const cplx psi = p.mode == ProfileMode::Lipschitz ? 1.0 + kI * std::log(w) / kPi
                                                      : htilde_potential(ev, w);
    s += p.c * p.a[k] * psi;
  }
  return s;
}

double extend_V(const TangentProfile& p, const UpperHalfPoint& z, double quad_tol) {
  if (p.size() == 0) return 0.0;
  const double x = z.x, t = z.t;
  const double L = p.support_left(), R = p.support_right();
  const double tail = p.c_prime() * (0.5 - std::atan((R - x) / t) / kPi);
  if (!(R > L)) return tail;
  std::vector<double> pts;
  for (double xk : p.x) {
    pts.push_back(xk);
    if (p.mode == ProfileMode::C1) {
      for (double kn : p.step->bridge().knots) pts.push_back(xk + kn);
      for (int j = 0; j < 40; ++j) pts.push_back(xk + std::ldexp(p.step->x0(), -j));
    }
  }
  for (double d = t; d < 4 * (R - L) + 4; d *= 2) {
    pts.push_back(x - d);
    pts.push_back(x + d);
  }
  pts = sorted_unique(std::move(pts), L, R);
  auto f = [&](double y) { return eval_profile(p, y) * poisson_kernel(x - y, t); };
  return value_or_throw(integrate_breakpoints<double>(f, pts, {quad_tol, 0.0, 20000}), "extend_V") + tail;
}

double extend_W(const HilbertEvaluator& ev, const UpperHalfPoint& z) {
  const auto& p = ev.profile();
  if (p.mode == ProfileMode::Lipschitz) {
    double s = 0.0;
    for (size_t k = 0; k < p.size(); ++k) s += p.a[k] * std::log(std::hypot(z.x - p.x[k], z.t));
    return p.c * s / kPi;
  }
  return complex_potential(ev, z.z()).imag();
}

double extend_W_quadrature(const HilbertEvaluator& ev, const UpperHalfPoint& z, double quad_tol) {
  // y = x + t tan(phi) turns P_t(x - y) dy into dphi / pi on (-pi/2, pi/2).
  const auto& p = ev.profile();
  const double x = z.x, t = z.t;
  const double d0 = delta0(p, z);
  auto phi_of = [&](double y) { return std::atan((y - x) / t); };
  std::vector<double> pts;
  // near region |y - x| < 2 delta0
  pts.push_back(phi_of(x - 2 * d0));
  pts.push_back(phi_of(x + 2 * d0));
  std::vector<double> sing(p.x.begin(), p.x.end());
  sing.push_back(0.0);
  for (double s : sing) {
    const double ps = phi_of(s);
    pts.push_back(ps);
  }
  const double half = 0.5 * kPi;
  for (int j = 1; j < 40; j += 3) {
    pts.push_back(-half + std::ldexp(1.0, -j));
    pts.push_back(half - std::ldexp(1.0, -j));
  }
  pts = sorted_unique(std::move(pts), -half, half);
  auto f = [&](double phi) {
    const double y = x + t * std::tan(phi);
    ProfileK k = ev.K_profile(y);
    return k.value.neg_inf ? 0.0 : k.value.value;  // measure-zero node; never hit in practice
  };
  return value_or_throw(integrate_breakpoints<double>(f, pts, {quad_tol, 0.0, 40000}), "extend_W_quadrature") / kPi;
}

GValue eval_G(const HilbertEvaluator& ev, const UpperHalfPoint& z) {
  const cplx psi = complex_potential(ev, z.z());
  GValue g;
  g.arg = psi.real();
  g.value = std::exp(kI * psi);
  return g;
}

GValue eval_G_boundary(const HilbertEvaluator& ev, double x) { return eval_G_boundary(ev, x, 0.0); }

GValue eval_G_boundary(const HilbertEvaluator& ev, double base, double offset) {
  GValue g;
  const auto& p = ev.profile();
  g.arg = eval_profile(p, base, offset);
  ProfileK k = ev.K_profile(base, offset);
  if (k.value.neg_inf) {
    g.infinite = true;
    return g;
  }
  g.value = std::polar(std::exp(-k.value.value), g.arg);
  return g;
}

cplx G_at(const HilbertEvaluator& ev, cplx z) {
  if (z.imag() < 0) throw std::domain_error("G is defined on the closed upper half-plane");
  if (z.imag() == 0) {
    GValue g = eval_G_boundary(ev, z.real());
    if (g.infinite) throw std::domain_error("|G| is infinite at a jump location");
    return g.value;
  }
  return std::exp(kI * complex_potential(ev, z));
}

}  // namespace nondini
