// Harmonic-measure density 1/|Phi'|, surface-ball ratios, a walk-on-spheres oracle and the
// product-integral bound check.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nondini/conformal.hpp"

namespace nondini {

struct Density {
  double value = 0.0;
  bool singular = false;
};

// exp(Kf(x)) at regular x; 0 with the singular flag at a jump.
Density density_at(const HilbertEvaluator& ev, double x);

struct MeasureRatio {
  double r = 0.0;
  double a = 0.0, b = 0.0;  // preimage interval of the surface ball
  double omega = 0.0;       // b - a
  double length = 0.0;      // int_a^b |Phi'|
  double ratio = 0.0;       // omega / length
};

// Surface ball of radius r around Phi(x_center), resolved on the connected component of the
// boundary through the center. The trace supplies brackets and the coverage check.
MeasureRatio measure_ratio(const ConformalMap& cm, const BoundaryTrace& trace, double x_center, double r);
// Same for several radii, reusing the integrals already computed for the center.
std::vector<MeasureRatio> ratio_curve(const ConformalMap& cm, const BoundaryTrace& trace, double x_center,
                                      const std::vector<double>& r_list);

struct CenterReport {
  double x = 0.0;
  cplx p;
  Density density;
  std::vector<MeasureRatio> curve;
  bool flagged = false;
  double fitted_slope = 0.0;  // slope of log ratio against log r
};

struct DensityReport {
  std::vector<CenterReport> centers;
  double threshold = 1e-2;

  std::vector<double> flagged_set() const;
  void write_csv(std::ostream& os) const;
  std::string summary_json() const;
};

// Flags a center when its ratio at the finest r is below threshold and decreases strictly over
// the last five radii.
DensityReport singular_set_scan(const ConformalMap& cm, const BoundaryTrace& trace, const std::vector<double>& centers,
                                const std::vector<double>& r_list, double threshold = 1e-2);

struct MCConfig {
  long n_walkers = 100000;
  std::uint64_t seed = 1;
  double wos_epsilon = 1e-4;  // absorption shell
  long max_steps = 100000;
  int threads = 0;  // 0: hardware concurrency
};

struct ArcHits {
  double lo = 0.0, hi = 0.0;  // boundary-parameter interval
  long hits = 0;
  double frequency = 0.0;
  double sigma = 0.0;  // binomial standard error
};

struct WosResult {
  std::vector<ArcHits> arcs;
  long walkers = 0;
  long timeouts = 0;      // walkers that exceeded max_steps
  long outside = 0;       // absorbed on the flat rays beyond the trace
  double polyline_error = 0.0;  // max distance from dropped trace samples to the simplified polyline
};

// Boundary geometry: the trace polyline (thinned to at most max_vertices) plus the two exact
// rays on which f is constant. Arcs are in the boundary parameter x and may overlap.
class WosDomain {
 public:
  WosDomain(const BoundaryTrace& trace, int max_vertices = 512);

  // Distance to the boundary and the parameter of the nearest point (NaN on the rays).
  std::pair<double, double> nearest(cplx w) const;
  bool inside(cplx w) const;
  double polyline_error() const { return polyline_error_; }
  double diameter() const { return diameter_; }

 private:
  std::vector<cplx> pts_;
  std::vector<double> xs_;
  cplx left_dir_, right_dir_;
  double polyline_error_ = 0.0;
  double diameter_ = 0.0;
};

WosResult wos_harmonic_measure(const BoundaryTrace& trace, cplx X, const std::vector<std::pair<double, double>>& arcs,
                               const MCConfig& mc);
WosResult wos_harmonic_measure(const WosDomain& dom, cplx X, const std::vector<std::pair<double, double>>& arcs,
                               const MCConfig& mc);

struct PoleComparison {
  std::vector<double> r;
  std::vector<double> omega_X;     // Monte Carlo
  std::vector<double> omega_inf;   // preimage length
  std::vector<double> ratio;
  std::vector<std::string> notes;  // dropped radii
  double max_ratio = 0.0, min_ratio = 0.0;
};

PoleComparison pole_comparison(const ConformalMap& cm, const BoundaryTrace& trace, cplx X, double p_center,
                               const std::vector<double>& r_list, const MCConfig& mc);

enum class FactorPlacement { Dyadic, Origin };

struct AppendixResult {
  std::vector<double> eps;
  std::vector<double> integrals;       // int_{-eps}^{eps} g
  std::vector<double> left_integrals;  // int_{-eps}^{0} g
  double fitted_slope = 0.0;
  bool bound_ok = false;       // int <= C eps^(1 - sum b) with C fitted at the largest eps
  bool left_bound_ok = false;  // int_{-eps}^0 <= eps^(1 - sum b) / (1 - sum b)
};

// g(x) = prod_k |x - x_k|^(-b_k), x_k = 2^-k (Dyadic) or x_k = 0 (Origin).
double appendix_integrand(const std::vector<double>& b, FactorPlacement place, double x);
AppendixResult appendix_product_integral(const std::vector<double>& b, const std::vector<double>& eps_list,
                                         FactorPlacement place = FactorPlacement::Dyadic, double quad_tol = 1e-13);

}  // namespace nondini
