#include "nondini/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nondini {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

ModulusSpec ModulusSpec::log_inverse() {
  ModulusSpec s;
  s.kind = ModulusKind::LogInverse;
  s.r_max = 1.0;
  return s;
}

ModulusSpec ModulusSpec::power(double gamma) {
  require(gamma > 0, "power exponent must be positive");
  ModulusSpec s;
  s.kind = ModulusKind::Power;
  s.param = gamma;
  s.r_max = std::numeric_limits<double>::infinity();
  return s;
}

ModulusSpec ModulusSpec::constant(double c) {
  require(c > 0, "constant modulus must be positive");
  ModulusSpec s;
  s.kind = ModulusKind::Constant;
  s.param = c;
  s.r_max = std::numeric_limits<double>::infinity();
  return s;
}

ModulusSpec ModulusSpec::tabulated(std::vector<double> r, std::vector<double> theta) {
  require(r.size() >= 2 && r.size() == theta.size(), "tabulated modulus needs matching grids of size >= 2");
  for (size_t i = 0; i < r.size(); ++i) {
    require(r[i] > 0, "tabulated radii must be positive");
    require(theta[i] >= 0, "tabulated values must be non-negative");
    if (i > 0) {
      require(r[i] > r[i - 1], "tabulated radii must increase");
      require(theta[i] >= theta[i - 1], "tabulated modulus must be non-decreasing");
    }
  }
  ModulusSpec s;
  s.kind = ModulusKind::Tabulated;
  s.r_max = r.back();
  s.grid_r = std::move(r);
  s.grid_theta = std::move(theta);
  return s;
}

std::string ModulusSpec::name() const {
  switch (kind) {
    case ModulusKind::LogInverse: return "log_inverse";
    case ModulusKind::Power: return "power";
    case ModulusKind::Constant: return "constant";
    case ModulusKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

double eval_theta(const ModulusSpec& spec, double r) {
  require(r > 0, "modulus argument must be positive");
  switch (spec.kind) {
    case ModulusKind::LogInverse:
      require(r < 1.0, "log-inverse modulus is defined for r < 1");
      return kLn2 / std::log(1.0 / r);
    case ModulusKind::Power:
      require(r <= spec.r_max, "argument beyond r_max");
      return std::pow(r, spec.param);
    case ModulusKind::Constant:
      require(r <= spec.r_max, "argument beyond r_max");
      return spec.param;
    case ModulusKind::Tabulated: {
      const auto& g = spec.grid_r;
      require(r >= g.front() && r <= g.back(), "tabulated modulus does not extrapolate");
      auto it = std::upper_bound(g.begin(), g.end(), r);
      if (it == g.end()) return spec.grid_theta.back();
      size_t i = static_cast<size_t>(it - g.begin());
      const double w = (r - g[i - 1]) / (g[i] - g[i - 1]);
      return spec.grid_theta[i - 1] + w * (spec.grid_theta[i] - spec.grid_theta[i - 1]);
    }
  }
  return 0.0;
}

const char* to_string(DiniClass d) {
  switch (d) {
    case DiniClass::Dini: return "dini";
    case DiniClass::NonDini: return "non_dini";
    case DiniClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

DiniClass classify_dini(const ModulusSpec& spec, double tol) {
  switch (spec.kind) {
    case ModulusKind::LogInverse: return DiniClass::NonDini;
    case ModulusKind::Power: return DiniClass::Dini;
    case ModulusKind::Constant: return DiniClass::NonDini;
    case ModulusKind::Tabulated: break;
  }
  // int_0 theta(r)/r dr is comparable to sum_i theta(2^-i).
  std::vector<double> terms;
  for (int i = 0; i < 1074; ++i) {
    const double r = std::ldexp(1.0, -i);
    if (r > spec.grid_r.back()) continue;
    if (r < spec.grid_r.front()) break;
    terms.push_back(eval_theta(spec, r));
  }
  if (terms.size() < 4) return DiniClass::Inconclusive;
  const size_t n = terms.size();
  const double last = terms[n - 1], prev = terms[n - 2];
  if (last == 0.0) return DiniClass::Dini;
  const double q = prev > 0 ? last / prev : 1.0;
  if (q < 1.0) {
    const double tail = last * q / (1.0 - q);
    if (tail <= tol) return DiniClass::Dini;
  }
  double first_half = 0.0, second_half = 0.0;
  for (size_t i = 0; i < n; ++i) (i < n / 2 ? first_half : second_half) += terms[i];
  // Non-decaying terms: the later half carries a fixed share of the mass.
  if (q > 0.9 && second_half >= 0.5 * first_half) return DiniClass::NonDini;
  return DiniClass::Inconclusive;
}

namespace {

// Closed form for theta(r) = 1/log2(1/r); u = log(1/r).
double log_inverse_smoothed(double r) {
  const double L = kLn2;
  const double u = std::log(1.0 / r);
  require(u > 2 * L, "smoothed log-inverse modulus needs 4r < 1");
  // [F(u) - 2F(u-L) + F(u-2L)] / L with F(v) = v log v - v, written without cancellation.
  const double d1 = -(u - L) * std::log1p(-L / u) + L * std::log(u);
  const double d2 = -(u - 2 * L) * std::log1p(-L / (u - L)) + L * std::log(u - L);
  return (d1 - d2) / L;
}

double log_inverse_smoothed_derivative(double r) {
  const double L = kLn2;
  const double u = std::log(1.0 / r);
  require(u > 2 * L, "smoothed log-inverse modulus needs 4r < 1");
  const double w = u - L;
  return -std::log1p(-(L * L) / (w * w)) / (L * r);
}

void check_smoothing_domain(const ModulusSpec& spec, double r) {
  require(r > 0, "smoothed modulus argument must be positive");
  if (spec.kind == ModulusKind::LogInverse)
    require(4 * r < 1.0, "smoothed log-inverse modulus needs r < 1/4");
  else
    require(4 * r <= spec.r_max, "smoothed modulus needs 4r <= r_max");
  if (spec.kind == ModulusKind::Tabulated)
    require(r >= spec.grid_r.front(), "tabulated modulus does not extrapolate");
}

double log_average(const ModulusSpec& spec, double a, double b, double tol) {
  // int_a^b theta(s)/s ds
  std::vector<double> pts{a, b};
  if (spec.kind == ModulusKind::Tabulated)
    for (double g : spec.grid_r)
      if (g > a && g < b) pts.push_back(g);
  pts = sorted_unique(pts, a, b);
  auto f = [&](double s) { return eval_theta(spec, s) / s; };
  return value_or_throw(integrate_breakpoints<double>(f, pts, {tol, 0.0, 400}), "inner average");
}

}  // namespace

double smooth_modulus_nested(const ModulusSpec& spec, double r, double quad_tol) {
  check_smoothing_domain(spec, r);
  const double inner_tol = 0.1 * quad_tol;
  auto outer = [&](double t) { return log_average(spec, t, 2 * t, inner_tol) / t; };
  const double tol = 0.5 * quad_tol * kLn2 * kLn2;
  return value_or_throw(integrate_adaptive<double>(outer, r, 2 * r, {tol, 0.0, 400}), "outer average") /
         (kLn2 * kLn2);
}

double smoothed_derivative_quadrature(const ModulusSpec& spec, double r, double quad_tol) {
  check_smoothing_domain(spec, r);
  const double tol = 0.25 * quad_tol * kLn2 * kLn2 * r;
  const double hi = log_average(spec, 2 * r, 4 * r, tol);
  const double lo = log_average(spec, r, 2 * r, tol);
  return std::max(0.0, (hi - lo) / (kLn2 * kLn2 * r));
}

double smooth_modulus(const SmoothedModulus& sm, double r) {
  const auto& b = sm.base;
  check_smoothing_domain(b, r);
  switch (b.kind) {
    case ModulusKind::Constant: return b.param;
    case ModulusKind::Power: {
      const double g = b.param;
      const double k = (std::exp2(g) - 1.0) / (g * kLn2);
      return std::pow(r, g) * k * k;
    }
    case ModulusKind::LogInverse: return log_inverse_smoothed(r);
    case ModulusKind::Tabulated: return smooth_modulus_nested(b, r, sm.quad_tol);
  }
  return 0.0;
}

double smoothed_derivative(const SmoothedModulus& sm, double r) {
  const auto& b = sm.base;
  check_smoothing_domain(b, r);
  switch (b.kind) {
    case ModulusKind::Constant: return 0.0;
    case ModulusKind::Power: {
      const double g = b.param;
      const double k = (std::exp2(g) - 1.0) / (g * kLn2);
      return g * std::pow(r, g - 1.0) * k * k;
    }
    case ModulusKind::LogInverse: return log_inverse_smoothed_derivative(r);
    case ModulusKind::Tabulated: return smoothed_derivative_quadrature(b, r, sm.quad_tol);
  }
  return 0.0;
}

double find_x_star(const SmoothedModulus& sm) {
  const auto& b = sm.base;
  double hi = 0.5;
  if (b.kind == ModulusKind::LogInverse)
    hi = std::min(hi, 0.25 * (1.0 - 1e-12));
  else
    hi = std::min(hi, 0.25 * b.r_max);
  auto below_one = [&](double r) { return smooth_modulus(sm, r) < 1.0; };
  if (below_one(hi)) return hi;
  double lo = 0.5 * hi;
  while (!below_one(lo)) {
    lo *= 0.5;
    if (lo < 1e-300) throw std::runtime_error("smoothed modulus never drops below 1");
    if (b.kind == ModulusKind::Tabulated && lo < b.grid_r.front())
      throw std::runtime_error("smoothed modulus >= 1 over the whole tabulated range");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (below_one(mid) ? lo : hi) = mid;
  }
  return lo;
}

X0Selection select_x0(const SmoothedModulus& sm, double beta) {
  require(beta > 0 && beta < 1, "beta must lie in (0,1)");
  const double x_star = sm.x_star;
  const double bound = (1.0 - beta) * kLn2;
  for (int m = 1; m <= 40; ++m) {
    const double x = std::ldexp(1.0, -m);
    if (!(x < 0.25 * x_star)) continue;
    double th8;
    try {
      if (smooth_modulus(sm, x) >= 0.5) continue;
      th8 = eval_theta(sm.base, 8 * x);
    } catch (const std::domain_error&) {
      continue;
    }
    if (th8 <= bound) return {x, x_star};
  }
  throw std::runtime_error("no dyadic x0 >= 2^-40 satisfies the selection constraints");
}

SmoothedModulus make_smoothed(const ModulusSpec& base, double beta, double quad_tol) {
  require(quad_tol > 0, "quad_tol must be positive");
  SmoothedModulus sm;
  sm.base = base;
  sm.quad_tol = quad_tol;
  sm.beta = beta;
  sm.x_star = find_x_star(sm);
  sm.x0 = select_x0(sm, beta).x0;
  return sm;
}

}  // namespace nondini
