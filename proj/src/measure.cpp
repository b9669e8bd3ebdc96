#include "nondini/measure.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include "json.hpp"
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace nondini {

Density density_at(const HilbertEvaluator& ev, double x) {
  ProfileK k = ev.K_profile(x);
  if (k.value.neg_inf) return {0.0, true};
  return {std::exp(k.value.value), false};
}

namespace {

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  Eigen::MatrixXd A(xs.size(), 2);
  Eigen::VectorXd y(xs.size());
  for (size_t j = 0; j < xs.size(); ++j) {
    A(j, 0) = 1.0;
    A(j, 1) = std::log(xs[j]);
    y(j) = std::log(ys[j]);
  }
  return A.colPivHouseholderQr().solve(y)(1);
}

cplx phi_at(const ConformalMap& cm, const BoundaryTrace& tr, double x) {
  if (tr.samples.empty()) throw std::invalid_argument("empty trace");
  long i = tr.find(x);
  if (i >= 0) return tr.samples[static_cast<size_t>(i)].phi;
  auto it = std::lower_bound(tr.samples.begin(), tr.samples.end(), x,
                             [](const TraceSample& s, double v) { return s.x < v; });
  const TraceSample* s = nullptr;
  if (it == tr.samples.end())
    s = &tr.samples.back();
  else if (it == tr.samples.begin())
    s = &*it;
  else
    s = (x - (it - 1)->x < it->x - x) ? &*(it - 1) : &*it;
  return s->phi + cm.integrate_real(s->x, x);
}

struct Known {
  double x;
  cplx D;    // int_{xc}^{x} G
  double L;  // |int_{xc}^{x} |G||
};

// First point from the center where |D| = r, inside the bracket [lo, hi] (ordered from the center).
Known solve_crossing(const ConformalMap& cm, Known lo, Known hi, double r) {
  auto eval_from = [&](const Known& k, double x) {
    return Known{x, k.D + cm.integrate_real(k.x, x), 0.0};
  };
  double x = lo.x + (hi.x - lo.x) * (r - std::abs(lo.D)) / (std::abs(hi.D) - std::abs(lo.D));
  Known best = lo;
  for (int it = 0; it < 200; ++it) {
    if (!(x != lo.x && x != hi.x && (x - lo.x) * (x - hi.x) < 0)) x = 0.5 * (lo.x + hi.x);
    if (x == lo.x || x == hi.x) break;  // bracket at roundoff width
    const Known& base = std::abs(x - lo.x) <= std::abs(x - hi.x) && !cm.profile().is_jump(lo.x) ? lo : hi;
    Known k = eval_from(base, x);
    const double phi = std::abs(k.D) - r;
    best = k;
    if (std::abs(phi) <= 1e-13 * r) break;
    if (phi <= 0)
      lo = k;
    else
      hi = k;
    const cplx g = cm.boundary_G(x, 0.0);
    const double dphi = (std::conj(k.D) * g).real() / std::abs(k.D);
    x = dphi != 0 ? x - phi / dphi : 0.5 * (lo.x + hi.x);
  }
  return best;
}

}  // namespace

std::vector<MeasureRatio> ratio_curve(const ConformalMap& cm, const BoundaryTrace& trace, double xc,
                                      const std::vector<double>& r_list) {
  if (r_list.empty()) return {};
  for (double r : r_list)
    if (!(r > 0)) throw std::invalid_argument("radii must be positive");
  const double r_max = *std::max_element(r_list.begin(), r_list.end());
  const auto& S = trace.samples;
  std::vector<MeasureRatio> out(r_list.size());
  for (size_t j = 0; j < r_list.size(); ++j) out[j].r = r_list[j];

  std::vector<Known> walked[2];
  for (int side = 0; side < 2; ++side) {
    const double dir = side == 0 ? 1.0 : -1.0;
    std::vector<double> xs;
    for (const auto& s : S)
      if ((s.x - xc) * dir > 0) xs.push_back(s.x);
    if (dir < 0) std::reverse(xs.begin(), xs.end());
    std::vector<Known>& known = walked[side];
    known.push_back({xc, 0.0, 0.0});
    for (double x : xs) {
      const Known& prev = known.back();
      known.push_back({x, prev.D + cm.integrate_real(prev.x, x), prev.L + std::abs(cm.arclength(prev.x, x))});
      if (std::abs(known.back().D) > r_max) break;
    }
    if (!(std::abs(known.back().D) > r_max))
      throw std::domain_error("surface ball radius exceeds the trace coverage");

    for (size_t j = 0; j < r_list.size(); ++j) {
      const double r = r_list[j];
      size_t i = 1;
      while (!(std::abs(known[i].D) > r)) ++i;
      Known k = solve_crossing(cm, known[i - 1], known[i], r);
      k.L = known[i - 1].L + std::abs(cm.arclength(known[i - 1].x, k.x));
      if (dir > 0) {
        out[j].b = k.x;
        out[j].length += k.L;
      } else {
        out[j].a = k.x;
        out[j].length += k.L;
      }
    }
  }

  // Connectedness at trace resolution: no other sample may sit inside the ball.
  const cplx pc = phi_at(cm, trace, xc);
  for (auto& m : out) {
    m.omega = m.b - m.a;
    m.ratio = m.omega / m.length;
    for (int side = 0; side < 2; ++side)
      for (const Known& k : walked[side]) {
        const bool outside = k.x > m.b || k.x < m.a;
        if (outside && std::abs(k.D) < m.r * (1 - 1e-9))
          throw std::runtime_error("surface ball preimage is disconnected at trace resolution");
      }
    const double wl = walked[1].back().x, wr = walked[0].back().x;
    for (const auto& s : S) {
      if (s.x >= wl && s.x <= wr) continue;
      if (std::abs(s.phi - pc) < m.r * (1 - 1e-6))
        throw std::runtime_error("surface ball preimage is disconnected at trace resolution");
    }
  }
  return out;
}

MeasureRatio measure_ratio(const ConformalMap& cm, const BoundaryTrace& trace, double x_center, double r) {
  return ratio_curve(cm, trace, x_center, {r}).front();
}

std::vector<double> DensityReport::flagged_set() const {
  std::vector<double> v;
  for (const auto& c : centers)
    if (c.flagged) v.push_back(c.x);
  return v;
}

void DensityReport::write_csv(std::ostream& os) const {
  char buf[256];
  os << "center_x,r,omega,length,ratio,flagged\n";
  for (const auto& c : centers)
    for (const auto& m : c.curve) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", c.x, m.r, m.omega, m.length, m.ratio,
                    c.flagged ? 1 : 0);
      os << buf;
    }
}

std::string DensityReport::summary_json() const {
  nlohmann::json j;
  j["threshold"] = threshold;
  j["flagged"] = flagged_set();
  auto& arr = j["centers"] = nlohmann::json::array();
  for (const auto& c : centers) {
    arr.push_back({{"x", c.x},
                   {"phi", {c.p.real(), c.p.imag()}},
                   {"density", c.density.value},
                   {"singular", c.density.singular},
                   {"final_ratio", c.curve.empty() ? 0.0 : c.curve.back().ratio},
                   {"fitted_slope", c.fitted_slope},
                   {"flagged", c.flagged}});
  }
  return j.dump(2);
}

DensityReport singular_set_scan(const ConformalMap& cm, const BoundaryTrace& trace, const std::vector<double>& centers,
                                const std::vector<double>& r_list, double threshold) {
  for (size_t j = 1; j < r_list.size(); ++j)
    if (!(r_list[j] < r_list[j - 1])) throw std::invalid_argument("radii must decrease");
  DensityReport rep;
  rep.threshold = threshold;
  for (double x : centers) {
    CenterReport c;
    c.x = x;
    c.p = phi_at(cm, trace, x);
    c.density = density_at(cm.evaluator(), x);
    c.curve = ratio_curve(cm, trace, x, r_list);
    const size_t n = c.curve.size();
    bool decreasing = true;
    for (size_t j = n > 5 ? n - 5 : 1; j < n; ++j)
      if (!(c.curve[j].ratio < c.curve[j - 1].ratio)) decreasing = false;
    c.flagged = n > 0 && c.curve.back().ratio < threshold && decreasing;
    if (n >= 2) {
      std::vector<double> rs, qs;
      for (const auto& m : c.curve) {
        rs.push_back(m.r);
        qs.push_back(m.ratio);
      }
      c.fitted_slope = slope(rs, qs);
    }
    rep.centers.push_back(std::move(c));
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------
// Walk on spheres.

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Distance from w to segment [p, q]; t in [0,1] is the nearest-point parameter.
double seg_dist(cplx w, cplx p, cplx q, double& t) {
  const cplx d = q - p;
  const double dd = std::norm(d);
  t = dd > 0 ? std::clamp(((w - p) * std::conj(d)).real() / dd, 0.0, 1.0) : 0.0;
  return std::abs(w - (p + t * d));
}

}  // namespace

WosDomain::WosDomain(const BoundaryTrace& trace, int max_vertices) {
  const auto& S = trace.samples;
  if (S.size() < 2) throw std::invalid_argument("trace too short for a domain");
  if (max_vertices < 2) throw std::invalid_argument("max_vertices must be >= 2");
  if (!(S.front().x <= trace.support_left && S.back().x >= trace.support_right))
    throw std::invalid_argument("trace window must cover the support of f");
  // Keep vertices evenly spread in arc length.
  std::vector<double> cum{0.0};
  for (size_t j = 1; j < S.size(); ++j) cum.push_back(cum.back() + std::abs(S[j].phi - S[j - 1].phi));
  const double total = cum.back();
  std::vector<size_t> keep{0};
  const size_t m = static_cast<size_t>(max_vertices) - 1;
  for (size_t j = 1; j + 1 < S.size(); ++j) {
    if (keep.size() >= m) break;
    if (cum[j] >= total * static_cast<double>(keep.size()) / static_cast<double>(m)) keep.push_back(j);
  }
  keep.push_back(S.size() - 1);
  for (size_t j = 0; j + 1 < keep.size(); ++j)
    for (size_t i = keep[j] + 1; i < keep[j + 1]; ++i) {
      double t;
      polyline_error_ = std::max(polyline_error_, seg_dist(S[i].phi, S[keep[j]].phi, S[keep[j + 1]].phi, t));
    }
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (size_t i : keep) {
    pts_.push_back(S[i].phi);
    xs_.push_back(S[i].x);
    xmin = std::min(xmin, S[i].phi.real());
    xmax = std::max(xmax, S[i].phi.real());
    ymin = std::min(ymin, S[i].phi.imag());
    ymax = std::max(ymax, S[i].phi.imag());
  }
  diameter_ = std::hypot(xmax - xmin, ymax - ymin);
  left_dir_ = cplx(-1.0, 0.0);
  right_dir_ = std::polar(1.0, trace.c_prime);
}

std::pair<double, double> WosDomain::nearest(cplx w) const {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // Rays: pts.front() + s * left_dir, pts.back() + s * right_dir, s >= 0.
  auto ray = [&](cplx o, cplx d) { return std::abs(w - (o + std::max(0.0, ((w - o) * std::conj(d)).real()) * d)); };
  double best = ray(pts_.front(), left_dir_);
  double param = nan;
  const double rr = ray(pts_.back(), right_dir_);
  if (rr < best) best = rr;
  for (size_t j = 0; j + 1 < pts_.size(); ++j) {
    double t;
    const double d = seg_dist(w, pts_[j], pts_[j + 1], t);
    if (d < best) {
      best = d;
      param = xs_[j] + t * (xs_[j + 1] - xs_[j]);
    }
  }
  return {best, param};
}

bool WosDomain::inside(cplx w) const {
  // Side test against the nearest boundary feature, oriented so the domain lies to the left.
  double best = std::numeric_limits<double>::infinity();
  cplx q, tangent;
  auto consider = [&](double d, cplx at, cplx tan) {
    if (d < best) {
      best = d;
      q = at;
      tangent = tan;
    }
  };
  {
    const cplx o = pts_.front(), dir = left_dir_;
    const double s = std::max(0.0, ((w - o) * std::conj(dir)).real());
    const cplx at = o + s * dir;
    cplx tan = -dir;
    if (s == 0 && pts_.size() > 1) tan = tan + (pts_[1] - o) / std::abs(pts_[1] - o);
    consider(std::abs(w - at), at, tan);
  }
  {
    const cplx o = pts_.back(), dir = right_dir_;
    const double s = std::max(0.0, ((w - o) * std::conj(dir)).real());
    const cplx at = o + s * dir;
    cplx tan = dir;
    const size_t n = pts_.size();
    if (s == 0 && n > 1) tan = tan + (o - pts_[n - 2]) / std::abs(o - pts_[n - 2]);
    consider(std::abs(w - at), at, tan);
  }
  for (size_t j = 0; j + 1 < pts_.size(); ++j) {
    double t;
    const double d = seg_dist(w, pts_[j], pts_[j + 1], t);
    cplx tan = (pts_[j + 1] - pts_[j]) / std::abs(pts_[j + 1] - pts_[j]);
    if (t == 0.0 && j > 0) tan += (pts_[j] - pts_[j - 1]) / std::abs(pts_[j] - pts_[j - 1]);
    if (t == 1.0 && j + 2 < pts_.size()) tan += (pts_[j + 2] - pts_[j + 1]) / std::abs(pts_[j + 2] - pts_[j + 1]);
    consider(d, pts_[j] + t * (pts_[j + 1] - pts_[j]), tan);
  }
  return best > 0 && cross(tangent, w - q) > 0;
}

WosResult wos_harmonic_measure(const BoundaryTrace& trace, cplx X, const std::vector<std::pair<double, double>>& arcs,
                               const MCConfig& mc) {
  return wos_harmonic_measure(WosDomain(trace), X, arcs, mc);
}

WosResult wos_harmonic_measure(const WosDomain& dom, cplx X, const std::vector<std::pair<double, double>>& arcs,
                               const MCConfig& mc) {
  if (mc.n_walkers < 1) throw std::invalid_argument("n_walkers must be positive");
  if (!(mc.wos_epsilon > 0)) throw std::invalid_argument("wos_epsilon must be positive");
  if (mc.max_steps < 1) throw std::invalid_argument("max_steps must be positive");
  for (const auto& a : arcs)
    if (!(a.first < a.second)) throw std::invalid_argument("arc needs lo < hi");
  if (!dom.inside(X)) throw std::domain_error("start point is not inside the traced domain");

  struct Tally {
    std::vector<long> hits;
    long timeouts = 0, outside = 0;
  };
  auto run = [&](long begin, long end, Tally& t) {
    t.hits.assign(arcs.size(), 0);
    for (long w = begin; w < end; ++w) {
      // Stream keyed by (seed, walker) only.
      std::seed_seq seq{static_cast<std::uint32_t>(mc.seed), static_cast<std::uint32_t>(mc.seed >> 32),
                        static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(static_cast<std::uint64_t>(w) >> 32)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
      cplx z = X;
      bool absorbed = false;
      for (long step = 0; step < mc.max_steps; ++step) {
        auto [d, x] = dom.nearest(z);
        if (d < mc.wos_epsilon) {
          absorbed = true;
          if (std::isnan(x)) {
            ++t.outside;
          } else {
            for (size_t a = 0; a < arcs.size(); ++a)
              if (x >= arcs[a].first && x <= arcs[a].second) ++t.hits[a];
          }
          break;
        }
        z += std::polar(d, angle(rng));
      }
      if (!absorbed) ++t.timeouts;
    }
  };

  int nt = mc.threads > 0 ? mc.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nt = static_cast<int>(std::min<long>(nt, mc.n_walkers));
  std::vector<Tally> tallies(static_cast<size_t>(nt));
  std::vector<std::thread> pool;
  for (int i = 0; i < nt; ++i) {
    const long b = mc.n_walkers * i / nt, e = mc.n_walkers * (i + 1) / nt;
    pool.emplace_back(run, b, e, std::ref(tallies[static_cast<size_t>(i)]));
  }
  for (auto& th : pool) th.join();

  WosResult res;
  res.walkers = mc.n_walkers;
  res.polyline_error = dom.polyline_error();
  for (size_t a = 0; a < arcs.size(); ++a) {
    ArcHits h;
    h.lo = arcs[a].first;
    h.hi = arcs[a].second;
    for (const auto& t : tallies) h.hits += t.hits[a];
    h.frequency = static_cast<double>(h.hits) / static_cast<double>(mc.n_walkers);
    h.sigma = std::sqrt(h.frequency * (1 - h.frequency) / static_cast<double>(mc.n_walkers));
    res.arcs.push_back(h);
  }
  for (const auto& t : tallies) {
    res.timeouts += t.timeouts;
    res.outside += t.outside;
  }
  return res;
}

PoleComparison pole_comparison(const ConformalMap& cm, const BoundaryTrace& trace, cplx X, double p_center,
                               const std::vector<double>& r_list, const MCConfig& mc) {
  const cplx pc = phi_at(cm, trace, p_center);
  for (double r : r_list)
    if (!(std::abs(X - pc) >= 2 * r)) throw std::invalid_argument("pole must lie outside B_2r of the center");
  auto curve = ratio_curve(cm, trace, p_center, r_list);
  std::vector<std::pair<double, double>> arcs;
  for (const auto& m : curve) arcs.emplace_back(m.a, m.b);
  WosResult w = wos_harmonic_measure(trace, X, arcs, mc);
  PoleComparison pcmp;
  for (size_t j = 0; j < curve.size(); ++j) {
    const auto& h = w.arcs[j];
    if (h.hits == 0 || h.sigma > 0.2 * h.frequency) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "r=%.6g dropped: relative statistical error above 20%%", curve[j].r);
      pcmp.notes.emplace_back(buf);
      continue;
    }
    pcmp.r.push_back(curve[j].r);
    pcmp.omega_X.push_back(h.frequency);
    pcmp.omega_inf.push_back(curve[j].omega);
    pcmp.ratio.push_back(h.frequency / curve[j].omega);
  }
  if (!pcmp.ratio.empty()) {
    pcmp.max_ratio = *std::max_element(pcmp.ratio.begin(), pcmp.ratio.end());
    pcmp.min_ratio = *std::min_element(pcmp.ratio.begin(), pcmp.ratio.end());
  }
  return pcmp;
}

// ---------------------------------------------------------------------------------------------
// Product integral.

namespace {

std::vector<double> factor_positions(const std::vector<double>& b, FactorPlacement place) {
  std::vector<double> x;
  for (size_t k = 0; k < b.size(); ++k) x.push_back(place == FactorPlacement::Dyadic ? std::ldexp(1.0, -static_cast<int>(k + 1)) : 0.0);
  return x;
}

// g(base + off) with each |x - x_k| formed as |(base - x_k) + off|.
double product_at(const std::vector<double>& b, const std::vector<double>& pos, double base, double off) {
  double s = 0.0;
  for (size_t k = 0; k < b.size(); ++k) s += b[k] * std::log(std::abs((base - pos[k]) + off));
  return std::exp(-s);
}

}  // namespace

double appendix_integrand(const std::vector<double>& b, FactorPlacement place, double x) {
  return product_at(b, factor_positions(b, place), x, 0.0);
}

AppendixResult appendix_product_integral(const std::vector<double>& b, const std::vector<double>& eps_list,
                                         FactorPlacement place, double quad_tol) {
  double sb = 0.0;
  for (double v : b) {
    if (!(v > 0)) throw std::invalid_argument("exponents b_k must be positive");
    sb += v;
  }
  if (b.empty() || !(sb < 0.5)) throw std::invalid_argument("need a nonempty b with sum b_k < 1/2");
  if (eps_list.size() < 2) throw std::invalid_argument("need at least two eps values");
  for (size_t j = 0; j < eps_list.size(); ++j) {
    if (!(eps_list[j] > 0)) throw std::invalid_argument("eps must be positive");
    if (j > 0 && !(eps_list[j] < eps_list[j - 1])) throw std::invalid_argument("eps list must decrease");
  }
  const auto pos = factor_positions(b, place);
  auto exponent_at = [&](double x) {
    double p = 0.0;
    for (size_t k = 0; k < b.size(); ++k)
      if (pos[k] == x) p += b[k];
    return p;
  };
  auto offending = [&](double x) {
    for (size_t k = 0; k < b.size(); ++k)
      if (pos[k] == x) return static_cast<int>(k + 1);
    return 0;
  };
  const QuadOptions opt{quad_tol, 0.0, 4000};

  // int from the singular point s over a length L in direction dir, with u = L sigma^q.
  auto singular_piece = [&](double s, double L, double dir) {
    const double p = exponent_at(s);
    const double q = 1.0 / (1.0 - p);
    auto f = [&](double sigma) {
      const double u = L * std::pow(sigma, q);
      return product_at(b, pos, s, dir * u) * L * q * std::pow(sigma, q - 1.0);
    };
    auto r = integrate_breakpoints<double>(f, std::vector<double>{0.0, 1.0}, opt);
    if (!r.converged)
      throw QuadratureError("product integral failed next to the factor k=" + std::to_string(offending(s)),
                            r.abs_error);
    return r.value;
  };
  auto integrate = [&](double lo, double hi) {
    std::vector<double> pts{lo, hi};
    for (double x : pos)
      if (x >= lo && x <= hi) pts.push_back(x);
    pts = sorted_unique(std::move(pts), lo, hi);
    double total = 0.0;
    for (size_t j = 0; j + 1 < pts.size(); ++j) {
      const double u = pts[j], v = pts[j + 1];
      const bool su = exponent_at(u) > 0, sv = exponent_at(v) > 0;
      if (su && sv) {
        const double m = 0.5 * (v - u);
        total += singular_piece(u, m, 1.0) + singular_piece(v, (v - u) - m, -1.0);
      } else if (su) {
        total += singular_piece(u, v - u, 1.0);
      } else if (sv) {
        total += singular_piece(v, v - u, -1.0);
      } else {
        auto f = [&](double x) { return product_at(b, pos, x, 0.0); };
        total += value_or_throw(integrate_breakpoints<double>(f, std::vector<double>{u, v}, opt), "product integral");
      }
    }
    return total;
  };

  AppendixResult res;
  res.eps = eps_list;
  const double gamma = 1.0 - sb;
  for (double e : eps_list) {
    res.integrals.push_back(integrate(-e, e));
    res.left_integrals.push_back(integrate(-e, 0.0));
  }
  res.fitted_slope = slope(res.eps, res.integrals);
  const double C = res.integrals.front() / std::pow(eps_list.front(), gamma);
  res.bound_ok = true;
  res.left_bound_ok = true;
  for (size_t j = 0; j < eps_list.size(); ++j) {
    const double scale = std::pow(eps_list[j], gamma);
    if (res.integrals[j] > C * scale * (1 + 1e-9)) res.bound_ok = false;
    if (res.left_integrals[j] > scale / gamma * (1 + 1e-9)) res.left_bound_ok = false;
  }
  return res;
}

}  // namespace nondini
