// The conformal map Phi(z) = int_{i}^{z} G, its boundary trace and geometric checks.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nondini/halfplane.hpp"

namespace nondini {

enum class SegmentRule { Regular, EndpointSingular };

// Piecewise-linear path; rules[j] applies to the segment waypoints[j] -> waypoints[j+1].
// EndpointSingular segments touch a jump point at their end with |G| ~ |z - end|^(-exponent).
struct PathSpec {
  std::vector<cplx> waypoints;
  std::vector<SegmentRule> rules;
  std::vector<double> exponents;

  static PathSpec through(std::vector<cplx> pts);
  void validate() const;
};

class ConformalMap {
 public:
  explicit ConformalMap(const HilbertEvaluator& ev, double quad_tol = 1e-10);

  const HilbertEvaluator& evaluator() const { return ev_; }
  const TangentProfile& profile() const { return ev_.profile(); }
  double quad_tol() const { return quad_tol_; }

  cplx G(cplx z) const { return G_at(ev_, z); }
  // G(base + offset) on the real axis without rounding the offset into base.
  cplx boundary_G(double base, double offset) const;
  // c a_k / pi at a jump x_k, 0 elsewhere.
  double singular_exponent(double x) const;

  // int G along [a, b]; a jump at b is integrated with the substitution rule for exponent p_end.
  cplx integrate_segment(cplx a, cplx b) const;
  cplx integrate_path(const PathSpec& path) const;
  // int_a^b G(s) ds and int_a^b |G(s)| ds along the real axis (jumps inside are split out).
  cplx integrate_real(double a, double b) const;
  double arclength(double a, double b) const;

  // Phi with Phi(i) = 0. Interior points use the segment from i; boundary points go through
  // a fixed regular anchor on the real axis.
  cplx phi(cplx z) const;
  cplx phi_boundary(double x) const;
  double anchor() const { return anchor_x_; }

 private:
  template <class T, class F>
  T real_axis(double a, double b, F&& g) const;

  const HilbertEvaluator& ev_;
  double quad_tol_;
  double anchor_x_;
  cplx anchor_phi_;
};

struct TraceSample {
  double x;
  cplx phi;
  double abs_dphi;  // +inf at singular points
  bool singular;
  int level;  // 0 for base grid, j for the j-th geometric refinement toward a singular point
};

struct BoundaryTrace {
  std::vector<TraceSample> samples;
  double c_prime = 0.0;
  // f is 0 left of support_left and c_prime right of support_right.
  double support_left = 0.0, support_right = 0.0;

  size_t size() const { return samples.size(); }
  // Index of the sample at exactly x, or -1.
  long find(double x) const;
  void write_csv(std::ostream& os) const;
};

// Geometric refinement toward each jump and 0 uses ratio 1/2 down to min_scale.
BoundaryTrace trace_boundary(const ConformalMap& cm, double x_lo, double x_hi, int base_n,
                             double min_scale = 0x1p-28);

struct SimplicityReport {
  bool simple = true;
  long first = -1, second = -1;  // offending segment indices
  size_t segments = 0;
};
SimplicityReport check_polyline_simple(const BoundaryTrace& trace);

struct InjectivityReport {
  int segments = 0;
  int failures = 0;
  double min_margin = 0.0;  // min over segments of Re int_0^1 G(gamma) - cos(c') * floor
  double floor_factor = 0.0;  // cos(c')
};
// Random segments in [-2,2] x [0,2]; a quarter of the endpoints are placed on the real axis.
InjectivityReport check_injectivity(const ConformalMap& cm, int n_segments, std::uint64_t seed);
// Margin for one segment; throws for z1 == z2.
double injectivity_margin(const ConformalMap& cm, cplx z1, cplx z2);

struct GrowthReport {
  std::vector<double> radii;
  std::vector<double> min_abs_phi;   // over the sampled arc
  std::vector<double> normalized;    // min |Phi| * R^(c'/pi - 1)
  double fitted_exponent = 0.0;      // slope of log min|Phi| vs log R
  double lower_constant = 0.0;       // min of normalized
};
GrowthReport growth_check(const ConformalMap& cm, const std::vector<double>& radii, int n_angles = 5);

struct SecantSample {
  double eps;
  double modulus;
  double angle;
};
// (Phi(x + eps) - Phi(x)) / eps for each eps, integrated directly from x.
std::vector<SecantSample> secant_tangent(const ConformalMap& cm, double x, const std::vector<double>& eps_list);

// (1/(a+b)) int_{x-a}^{x+b} |Phi'|.
double average_derivative(const ConformalMap& cm, double x, double a, double b);

}  // namespace nondini
