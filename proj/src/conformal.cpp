#include "nondini/conformal.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace nondini {

namespace {

const cplx kI{0.0, 1.0};

bool is_real(cplx z) { return z.imag() == 0.0; }

}  // namespace

PathSpec PathSpec::through(std::vector<cplx> pts) {
  PathSpec p;
  p.waypoints = std::move(pts);
  const size_t n = p.waypoints.empty() ? 0 : p.waypoints.size() - 1;
  p.rules.assign(n, SegmentRule::Regular);
  p.exponents.assign(n, 0.0);
  return p;
}

void PathSpec::validate() const {
  if (waypoints.size() < 2) throw std::invalid_argument("path needs at least two waypoints");
  if (rules.size() != waypoints.size() - 1 || exponents.size() != rules.size())
    throw std::invalid_argument("path needs one rule and exponent per segment");
  for (size_t j = 0; j < waypoints.size(); ++j) {
    if (waypoints[j].imag() < 0) throw std::invalid_argument("path leaves the closed upper half-plane");
    if (j > 0 && waypoints[j] == waypoints[j - 1]) throw std::invalid_argument("consecutive waypoints coincide");
  }
  for (size_t j = 0; j < rules.size(); ++j) {
    if (rules[j] != SegmentRule::EndpointSingular) continue;
    if (!(exponents[j] >= 0 && exponents[j] < 1)) throw std::invalid_argument("singular exponent must lie in [0,1)");
    if (!is_real(waypoints[j + 1])) throw std::invalid_argument("singular segment must end on the real axis");
    if (is_real(waypoints[j])) throw std::invalid_argument("singular segment may touch the axis only at its end");
  }
}

ConformalMap::ConformalMap(const HilbertEvaluator& ev, double quad_tol) : ev_(ev), quad_tol_(quad_tol) {
  if (!(quad_tol > 0)) throw std::invalid_argument("quad_tol must be positive");
  anchor_x_ = std::min(profile().support_left(), 0.0) - 1.0;
  anchor_phi_ = integrate_path(PathSpec::through({kI, cplx(anchor_x_, 1.0), cplx(anchor_x_, 0.0)}));
}

double ConformalMap::singular_exponent(double x) const {
  const auto& p = profile();
  for (size_t k = 0; k < p.size(); ++k)
    if (p.x[k] == x) return p.c * p.a[k] / kPi;
  return 0.0;
}

template <class T, class F>
T ConformalMap::real_axis(double a, double b, F&& g) const {
  if (a == b) return T{};
  if (a > b) return -real_axis<T>(b, a, g);
  auto g1 = [&](double x) { return g(x, 0.0); };
  const auto& p = profile();
  std::vector<double> pts;
  for (double xk : p.x) {
    pts.push_back(xk);
    if (p.mode == ProfileMode::C1)
      for (double kn : p.step->bridge().knots) pts.push_back(xk + kn);
  }
  pts = sorted_unique(std::move(pts), a, b);
  const QuadOptions opt{quad_tol_, 0.0, 4000};
  // Next to a jump |G| blows up like a power (Lipschitz) or a power of log (C1); tanh-sinh
  // handles both on a short window at the jump, Gauss-Kronrod takes the rest of the piece.
  const double window = p.mode == ProfileMode::C1 ? 0.25 * p.step->x0() : std::numeric_limits<double>::infinity();
  T total{};
  auto singular_end = [&](double s, double other) {
    const double len = std::abs(other - s);
    const double h = std::min(len, window);
    const double dir = other > s ? 1.0 : -1.0;
    auto gs = [&](double u) -> T { return g(s, dir * u); };
    static thread_local boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0, l1 = 0.0;
    const T v = ts.integrate(gs, 0.0, h, 1e-13, &err, &l1);
    if (!(err <= std::max(quad_tol_, 1e-12 * l1)))
      throw QuadratureError("tanh-sinh did not converge next to a jump at " + std::to_string(s) + " len " + std::to_string(h) + " l1 " + std::to_string(l1), err);
    T rest{};
    if (h < len)
      rest = value_or_throw(integrate_breakpoints<T>(g1, std::vector<double>{std::min(s + dir * h, other),
                                                                             std::max(s + dir * h, other)},
                                                     opt),
                            "Phi");
    return (v + rest) * dir;
  };
  auto piece = [&](double u, double v) {
    const bool ju = p.is_jump(u), jv = p.is_jump(v);
    if (ju && jv) {
      const double m = 0.5 * (u + v);
      total += singular_end(u, m);
      total += -singular_end(v, m);
    } else if (ju) {
      total += singular_end(u, v);
    } else if (jv) {
      total += -singular_end(v, u);
    } else {
      total += value_or_throw(integrate_breakpoints<T>(g1, std::vector<double>{u, v}, opt), "Phi");
    }
  };
  for (size_t j = 0; j + 1 < pts.size(); ++j) piece(pts[j], pts[j + 1]);
  return total;
}

cplx ConformalMap::boundary_G(double base, double offset) const {
  GValue g = eval_G_boundary(ev_, base, offset);
  // Only reachable for offset == 0 at a jump, a node the quadrature rules never use.
  if (g.infinite) throw std::domain_error("|G| is infinite at a jump location");
  return g.value;
}

cplx ConformalMap::integrate_real(double a, double b) const {
  return real_axis<cplx>(a, b, [&](double x, double u) { return boundary_G(x, u); });
}

double ConformalMap::arclength(double a, double b) const {
  return real_axis<double>(a, b, [&](double x, double u) { return std::abs(boundary_G(x, u)); });
}

cplx ConformalMap::integrate_segment(cplx a, cplx b) const {
  if (a == b) return 0.0;
  if (a.imag() < 0 || b.imag() < 0) throw std::domain_error("segment leaves the closed upper half-plane");
  if (is_real(a) && is_real(b)) return integrate_real(a.real(), b.real());
  const cplx d = b - a;
  auto g = [&](double s) { return G(a + s * d) * d; };
  const QuadOptions opt{quad_tol_, 0.0, 4000};
  if (is_real(b) && profile().is_jump(b.real()))
    return value_or_throw(integrate_endpoint_singular<cplx>(g, 0.0, 1.0, singular_exponent(b.real()), false, opt),
                          "Phi segment");
  if (is_real(a) && profile().is_jump(a.real()))
    return value_or_throw(integrate_endpoint_singular<cplx>(g, 0.0, 1.0, singular_exponent(a.real()), true, opt),
                          "Phi segment");
  return value_or_throw(integrate_breakpoints<cplx>(g, std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}, opt),
                        "Phi segment");
}

cplx ConformalMap::integrate_path(const PathSpec& path) const {
  path.validate();
  cplx s = 0.0;
  for (size_t j = 0; j + 1 < path.waypoints.size(); ++j) {
    const cplx a = path.waypoints[j], b = path.waypoints[j + 1];
    if (path.rules[j] == SegmentRule::EndpointSingular) {
      const cplx d = b - a;
      auto g = [&](double t) { return G(a + t * d) * d; };
      s += value_or_throw(integrate_endpoint_singular<cplx>(g, 0.0, 1.0, path.exponents[j], false,
                                                            {quad_tol_, 0.0, 4000}),
                          "Phi path");
    } else {
      s += integrate_segment(a, b);
    }
  }
  return s;
}

cplx ConformalMap::phi(cplx z) const {
  if (z.imag() < 0) throw std::domain_error("Phi is defined on the closed upper half-plane");
  if (is_real(z)) return phi_boundary(z.real());
  return integrate_segment(kI, z);
}

cplx ConformalMap::phi_boundary(double x) const { return anchor_phi_ + integrate_real(anchor_x_, x); }

long BoundaryTrace::find(double x) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), x,
                             [](const TraceSample& s, double v) { return s.x < v; });
  if (it == samples.end() || it->x != x) return -1;
  return it - samples.begin();
}

void BoundaryTrace::write_csv(std::ostream& os) const {
  char buf[160];
  os << "x,re_phi,im_phi,abs_dphi,is_singular\n";
  for (const auto& s : samples) {
    if (s.singular)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,inf,1\n", s.x, s.phi.real(), s.phi.imag());
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,0\n", s.x, s.phi.real(), s.phi.imag(), s.abs_dphi);
    os << buf;
  }
}

BoundaryTrace trace_boundary(const ConformalMap& cm, double x_lo, double x_hi, int base_n, double min_scale) {
  if (!(x_lo < 0 && x_hi > 0)) throw std::invalid_argument("trace window must contain 0");
  if (base_n < 2) throw std::invalid_argument("base_n must be >= 2");
  if (!(min_scale > 0)) throw std::invalid_argument("min_scale must be positive");
  const auto& p = cm.profile();

  std::vector<double> sing{0.0};
  for (double xk : p.x)
    if (xk > x_lo && xk < x_hi) sing.push_back(xk);
  std::sort(sing.begin(), sing.end());
  sing.erase(std::unique(sing.begin(), sing.end()), sing.end());

  struct Pt {
    double x;
    int level;
  };
  std::vector<Pt> grid;
  for (int j = 0; j < base_n; ++j) grid.push_back({x_lo + (x_hi - x_lo) * j / (base_n - 1), 0});
  grid.back().x = x_hi;
  for (size_t i = 0; i < sing.size(); ++i) {
    const double s = sing[i];
    grid.push_back({s, 0});
    const double left = i > 0 ? s - sing[i - 1] : s - x_lo;
    const double right = i + 1 < sing.size() ? sing[i + 1] - s : x_hi - s;
    int level = 1;
    for (double d = 0.5 * left; d >= min_scale; d *= 0.5) grid.push_back({s - d, level++});
    level = 1;
    for (double d = 0.5 * right; d >= min_scale; d *= 0.5) grid.push_back({s + d, level++});
  }
  std::sort(grid.begin(), grid.end(), [](const Pt& a, const Pt& b) { return a.x < b.x || (a.x == b.x && a.level < b.level); });
  grid.erase(std::unique(grid.begin(), grid.end(), [](const Pt& a, const Pt& b) { return a.x == b.x; }), grid.end());

  BoundaryTrace tr;
  tr.c_prime = p.c_prime();
  tr.support_left = p.support_left();
  tr.support_right = p.support_right();
  cplx phi = cm.phi_boundary(grid.front().x);
  for (size_t j = 0; j < grid.size(); ++j) {
    if (j > 0) phi += cm.integrate_real(grid[j - 1].x, grid[j].x);
    GValue g = eval_G_boundary(cm.evaluator(), grid[j].x);
    TraceSample s{grid[j].x, phi, std::numeric_limits<double>::infinity(), g.infinite, grid[j].level};
    if (!g.infinite) s.abs_dphi = std::abs(g.value);
    tr.samples.push_back(s);
  }
  return tr;
}

namespace {

double orient(cplx a, cplx b, cplx c) {
  return (b.real() - a.real()) * (c.imag() - a.imag()) - (b.imag() - a.imag()) * (c.real() - a.real());
}

bool on_segment(cplx a, cplx b, cplx c) {
  return std::min(a.real(), b.real()) <= c.real() && c.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= c.imag() && c.imag() <= std::max(a.imag(), b.imag());
}

bool segments_intersect(cplx p1, cplx p2, cplx q1, cplx q2) {
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

SimplicityReport check_polyline_simple(const BoundaryTrace& trace) {
  SimplicityReport rep;
  const auto& s = trace.samples;
  if (s.size() < 2) return rep;
  const size_t n = s.size() - 1;
  rep.segments = n;
  // Sweep over segments ordered by their left x extent.
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  auto xmin = [&](size_t i) { return std::min(s[i].phi.real(), s[i + 1].phi.real()); };
  auto xmax = [&](size_t i) { return std::max(s[i].phi.real(), s[i + 1].phi.real()); };
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return xmin(a) < xmin(b); });
  std::vector<size_t> active;
  for (size_t i : order) {
    const double lo = xmin(i);
    active.erase(std::remove_if(active.begin(), active.end(), [&](size_t j) { return xmax(j) < lo; }), active.end());
    for (size_t j : active) {
      if (i + 1 == j || j + 1 == i) continue;  // neighbours share an endpoint
      if (segments_intersect(s[i].phi, s[i + 1].phi, s[j].phi, s[j + 1].phi)) {
        rep.simple = false;
        rep.first = static_cast<long>(std::min(i, j));
        rep.second = static_cast<long>(std::max(i, j));
        return rep;
      }
    }
    active.push_back(i);
  }
  return rep;
}

double injectivity_margin(const ConformalMap& cm, cplx z1, cplx z2) {
  if (z1 == z2) throw std::invalid_argument("degenerate segment");
  const cplx d = z2 - z1;
  // Real part of G packed with |G|, both along gamma(s) = z1 + s d, s in [0,1].
  auto g = [&](double s) {
    const cplx v = cm.G(z1 + s * d);
    return cplx(v.real(), std::abs(v));
  };
  QuadOptions opt{cm.quad_tol(), 0.0, 4000};
  cplx I;
  if (is_real(z1) && is_real(z2)) {
    // Along the axis, split at jumps via the map's own rule, rescaled to s in [0,1].
    const double a = z1.real(), b = z2.real();
    const cplx re = cm.integrate_real(a, b) / (b - a);
    const double ab = cm.arclength(std::min(a, b), std::max(a, b)) / std::abs(b - a);
    I = cplx(re.real(), ab);
  } else {
    I = value_or_throw(integrate_breakpoints<cplx>(g, std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}, opt),
                       "injectivity");
  }
  double floor = I.imag();
  for (int j = 0; j <= 32; ++j) {
    const cplx z = z1 + (j / 32.0) * d;
    if (is_real(z) && cm.profile().is_jump(z.real())) continue;
    floor = std::min(floor, std::abs(cm.G(z)));
  }
  // Re int_0^1 G / (z2 - z1) direction is irrelevant: |arg G| <= c' gives Re G >= cos(c')|G|.
  return I.real() - std::cos(cm.profile().c_prime()) * floor;
}

InjectivityReport check_injectivity(const ConformalMap& cm, int n_segments, std::uint64_t seed) {
  if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), ut(0.0, 2.0), u01(0.0, 1.0);
  auto draw = [&] {
    const double x = ux(rng);
    const double t = u01(rng) < 0.25 ? 0.0 : ut(rng);
    return cplx(x, t);
  };
  InjectivityReport rep;
  rep.floor_factor = std::cos(cm.profile().c_prime());
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n_segments; ++j) {
    cplx a = draw(), b = draw();
    while (a == b) b = draw();
    const double m = injectivity_margin(cm, a, b);
    rep.min_margin = std::min(rep.min_margin, m);
    if (!(m > 0)) ++rep.failures;
    ++rep.segments;
  }
  return rep;
}

GrowthReport growth_check(const ConformalMap& cm, const std::vector<double>& radii, int n_angles) {
  if (radii.size() < 2) throw std::invalid_argument("growth_check needs at least two radii");
  for (size_t j = 0; j < radii.size(); ++j) {
    if (!(radii[j] > 0)) throw std::invalid_argument("radii must be positive");
    if (j > 0 && !(radii[j] > radii[j - 1])) throw std::invalid_argument("radii must increase");
  }
  if (radii.back() > 1024) throw std::invalid_argument("radii beyond desk scale");
  if (n_angles < 1) throw std::invalid_argument("n_angles must be >= 1");
  GrowthReport rep;
  rep.radii = radii;
  rep.min_abs_phi.assign(radii.size(), std::numeric_limits<double>::infinity());
  for (int a = 0; a < n_angles; ++a) {
    const cplx dir = std::polar(1.0, kPi * (a + 0.5) / n_angles);
    // Walk out along the ray, reusing the previous value.
    cplx z = radii[0] * dir;
    cplx val = cm.phi(z);
    for (size_t j = 0; j < radii.size(); ++j) {
      if (j > 0) {
        const cplx zn = radii[j] * dir;
        val += cm.integrate_segment(z, zn);
        z = zn;
      }
      rep.min_abs_phi[j] = std::min(rep.min_abs_phi[j], std::abs(val));
    }
  }
  const double e = cm.profile().c_prime() / kPi - 1.0;
  Eigen::MatrixXd A(radii.size(), 2);
  Eigen::VectorXd y(radii.size());
  rep.lower_constant = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < radii.size(); ++j) {
    rep.normalized.push_back(rep.min_abs_phi[j] * std::pow(radii[j], e));
    rep.lower_constant = std::min(rep.lower_constant, rep.normalized.back());
    A(j, 0) = 1.0;
    A(j, 1) = std::log(radii[j]);
    y(j) = std::log(rep.min_abs_phi[j]);
  }
  rep.fitted_exponent = A.colPivHouseholderQr().solve(y)(1);
  return rep;
}

std::vector<SecantSample> secant_tangent(const ConformalMap& cm, double x, const std::vector<double>& eps_list) {
  std::vector<SecantSample> out;
  for (size_t j = 0; j < eps_list.size(); ++j) {
    const double e = eps_list[j];
    if (!(e > 0)) throw std::invalid_argument("eps must be positive");
    if (j > 0 && !(e < eps_list[j - 1])) throw std::invalid_argument("eps list must decrease");
    const cplx q = cm.integrate_real(x, x + e) / e;
    out.push_back({e, std::abs(q), std::arg(q)});
  }
  return out;
}

double average_derivative(const ConformalMap& cm, double x, double a, double b) {
  if (!(a > 0 && b > 0)) throw std::invalid_argument("a and b must be positive");
  return cm.arclength(x - a, x + b) / (a + b);
}

}  // namespace nondini
