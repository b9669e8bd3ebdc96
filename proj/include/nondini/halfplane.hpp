// Poisson extensions V = P_t * f, W = P_t * Kf and G = exp(-W + iV) in the upper half-plane.
#pragma once

#include <complex>

#include "nondini/hilbert.hpp"

namespace nondini {

using cplx = std::complex<double>;

struct UpperHalfPoint {
  double x;
  double t;  // > 0
  UpperHalfPoint(double x_, double t_);
  cplx z() const { return {x, t}; }
};

double poisson_kernel(double xi, double t);

// Distance from (x,t) to the closed jump set {(x_k,0)} and the origin.
double delta0(const TangentProfile& p, const UpperHalfPoint& z);

// V + iW at z with Im z >= 0. On the real axis (away from jumps) this is f(x) + i Kf(x).
cplx complex_potential(const HilbertEvaluator& ev, cplx z);

double extend_V(const TangentProfile& p, const UpperHalfPoint& z, double quad_tol = 1e-12);
double extend_W(const HilbertEvaluator& ev, const UpperHalfPoint& z);
// P_t * Kf by direct quadrature of the boundary values (near/far split at 2 delta0).
double extend_W_quadrature(const HilbertEvaluator& ev, const UpperHalfPoint& z, double quad_tol = 1e-9);

struct GValue {
  cplx value;             // meaningful when finite
  bool infinite = false;  // boundary jump point: |G| = +inf
  double arg = 0.0;       // always defined (= f(x) on the boundary)
};

GValue eval_G(const HilbertEvaluator& ev, const UpperHalfPoint& z);
GValue eval_G_boundary(const HilbertEvaluator& ev, double x);
GValue eval_G_boundary(const HilbertEvaluator& ev, double base, double offset);
// G at Im z >= 0 for path integration; throws at jump points.
cplx G_at(const HilbertEvaluator& ev, cplx z);

}  // namespace nondini
