// Adaptive Gauss-Kronrod (G7/K15) quadrature for real and complex integrands.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nondini {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 2000;
};

template <class T>
struct QuadResult {
  T value{};
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error " + format(achieved) + ")"), achieved_error(achieved) {}
  double achieved_error;

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
};

template <class T, class F>
Panel<T> kronrod_panel(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  T fc = f(c);
  T rk = fc * kWgk[7];
  T rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    T f1 = f(c - dx);
    T f2 = f(c + dx);
    rk += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) rg += (f1 + f2) * kWg[j / 2];
  }
  rk *= h;
  rg *= h;
  double err = magnitude(rk - rg);
  return {a, b, rk, err};
}

}  // namespace detail

// Single G7/K15 panel; error is |K15 - G7|.
template <class T, class F>
QuadResult<T> gauss_kronrod(F&& f, double a, double b) {
  auto p = detail::kronrod_panel<T>(f, a, b);
  return {p.value, p.error, 15, true};
}

// Globally adaptive bisection over the given breakpoints (sorted, at least two).
template <class T, class F>
QuadResult<T> integrate_breakpoints(F&& f, const std::vector<double>& pts, QuadOptions opt = {}) {
  std::vector<detail::Panel<T>> panels;
  panels.reserve(pts.size() + 64);
  QuadResult<T> out;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1] > pts[i])) continue;
    panels.push_back(detail::kronrod_panel<T>(f, pts[i], pts[i + 1]));
    out.evaluations += 15;
  }
  auto total = [&](T& v, double& e) {
    v = T{};
    e = 0.0;
    for (auto& p : panels) {
      v += p.value;
      e += p.error;
    }
  };
  T value;
  double err;
  total(value, err);
  const double eps = std::numeric_limits<double>::epsilon();
  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(value));
    if (err <= target) break;
    if (static_cast<int>(panels.size()) >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    auto worst = std::max_element(panels.begin(), panels.end(),
                                  [](const auto& l, const auto& r) { return l.error < r.error; });
    const double a = worst->a, b = worst->b, m = 0.5 * (a + b);
    if (b - a <= 64 * eps * std::max(std::abs(a), std::abs(b)) || m <= a || m >= b) {
      // Panel is at roundoff width; its error cannot shrink further.
      if (worst->error <= 1e3 * eps * (1.0 + detail::magnitude(worst->value))) {
        worst->error = 0.0;
        total(value, err);
        continue;
      }
      out.converged = false;
      break;
    }
    auto left = detail::kronrod_panel<T>(f, a, m);
    auto right = detail::kronrod_panel<T>(f, m, b);
    out.evaluations += 30;
    *worst = left;
    panels.push_back(right);
    total(value, err);
  }
  out.value = value;
  out.abs_error = err;
  return out;
}

template <class T, class F>
QuadResult<T> integrate_adaptive(F&& f, double a, double b, QuadOptions opt = {}) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate_breakpoints<T>(f, std::vector<double>{b, a}, opt);
    r.value = -r.value;
    return r;
  }
  return integrate_breakpoints<T>(f, std::vector<double>{a, b}, opt);
}

// Integrand behaving like |x - s|^(-p) at the singular endpoint s (left or right end).
// Substitutes x = s +- (b - a) * sigma^(1/(1-p)), which cancels the power singularity.
template <class T, class F>
QuadResult<T> integrate_endpoint_singular(F&& f, double a, double b, double p, bool singular_left,
                                          QuadOptions opt = {}) {
  if (!(p < 1.0)) throw std::domain_error("endpoint exponent must be < 1");
  p = std::max(p, 0.0);
  const double L = b - a;
  const double q = 1.0 / (1.0 - p);
  auto g = [&](double sigma) -> T {
    const double s = std::pow(sigma, q);
    const double jac = L * q * std::pow(sigma, q - 1.0);
    const double x = singular_left ? a + L * s : b - L * s;
    return f(x) * jac;
  };
  return integrate_breakpoints<T>(g, std::vector<double>{0.0, 1.0}, opt);
}

template <class T>
T value_or_throw(const QuadResult<T>& r, const char* where) {
  if (!r.converged) throw QuadratureError(std::string("quadrature did not converge in ") + where, r.abs_error);
  return r.value;
}

// Geometric breakpoints s, s*ratio, ... strictly between lo and hi (s > 0 measured from anchor).
inline void append_geometric(std::vector<double>& pts, double anchor, double direction, double from,
                             double to, double ratio = 0.5) {
  for (double d = from; d > to; d *= ratio) pts.push_back(anchor + direction * d);
}

inline std::vector<double> sorted_unique(std::vector<double> v, double lo, double hi) {
  v.push_back(lo);
  v.push_back(hi);
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (x < lo || x > hi) continue;
    if (out.empty() || x > out.back()) out.push_back(x);
  }
  return out;
}

}  // namespace nondini
