#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "nondini/conformal.hpp"

using namespace nondini;

namespace {

constexpr double kC = kPi / 4;

// Wedge: G(z) = e^{ic} z^{-c/pi}, so Phi(z) - Phi(0) = e^{ic} z^{1-c/pi} / (1 - c/pi).
cplx wedge_phi_rel(cplx z) {
  const double s = 1 - kC / kPi;
  return std::polar(1.0, kC) * std::pow(z, s) / s;
}

struct Wedge {
  HilbertEvaluator ev{wedge_profile(kC)};
  ConformalMap cm{ev};
};

}  // namespace

TEST_CASE("flat profile maps z to z - i") {
  HilbertEvaluator ev(flat_profile());
  ConformalMap cm(ev);
  for (cplx z : {cplx(0.3, 0.7), cplx(-2.0, 0.0), cplx(5.0, 3.0)}) CHECK(std::abs(cm.phi(z) - (z - cplx(0, 1))) < 1e-12);
}

TEST_CASE("wedge map matches the power-law closed form") {
  Wedge w;
  CHECK(std::abs(w.cm.G(cplx(0.4, 0.3)) - std::polar(1.0, kC) * std::pow(cplx(0.4, 0.3), -kC / kPi)) < 1e-12);
  const cplx p0 = w.cm.phi_boundary(0.0);
  for (cplx z : {cplx(0.5, 0.5), cplx(-1.0, 0.25), cplx(2.0, 0.0), cplx(-0.125, 0.0), cplx(0.0, 3.0)}) {
    const cplx got = z.imag() == 0 ? w.cm.phi_boundary(z.real()) : w.cm.phi(z);
    CHECK(std::abs(got - p0 - wedge_phi_rel(z)) < 1e-10);
  }
  CHECK(w.cm.singular_exponent(0.0) == doctest::Approx(kC / kPi));
  CHECK(w.cm.singular_exponent(0.3) == 0.0);
  CHECK(w.cm.arclength(-1.0, 1.0) == doctest::Approx(2.0 / (1 - kC / kPi)).epsilon(1e-10));
}

TEST_CASE("path independence and segment additivity") {
  Wedge w;
  const cplx a(-0.7, 0.2), b(0.9, 0.4);
  const cplx direct = w.cm.integrate_segment(a, b);
  const cplx bent = w.cm.integrate_path(PathSpec::through({a, cplx(0.1, 2.0), b}));
  CHECK(std::abs(direct - bent) < 1e-10);
  CHECK(std::abs(direct - (wedge_phi_rel(b) - wedge_phi_rel(a))) < 1e-10);
  CHECK(std::abs(w.cm.integrate_real(-1.0, 0.5) - (wedge_phi_rel(0.5) - wedge_phi_rel(-1.0))) < 1e-10);
  CHECK_THROWS(PathSpec::through({a}).validate());
}

TEST_CASE("boundary trace of the wedge") {
  Wedge w;
  const BoundaryTrace tr = trace_boundary(w.cm, -2.0, 3.0, 41, 0x1p-20);
  REQUIRE(tr.size() > 41);
  CHECK(tr.c_prime == doctest::Approx(kC));
  for (size_t i = 1; i < tr.size(); ++i) CHECK(tr.samples[i].x > tr.samples[i - 1].x);
  const long i0 = tr.find(0.0);
  REQUIRE(i0 >= 0);
  CHECK(tr.samples[static_cast<size_t>(i0)].singular);
  CHECK(std::isinf(tr.samples[static_cast<size_t>(i0)].abs_dphi));
  const cplx p0 = tr.samples[static_cast<size_t>(i0)].phi;
  for (const auto& s : tr.samples) CHECK(std::abs(s.phi - p0 - wedge_phi_rel(s.x)) < 1e-10);
  CHECK(check_polyline_simple(tr).simple);
  std::ostringstream os;
  tr.write_csv(os);
  CHECK(os.str().find("inf") != std::string::npos);
  CHECK(os.str().substr(0, 2) == "x,");
}

TEST_CASE("simplicity sweep detects a crossing") {
  BoundaryTrace tr;
  const cplx pts[] = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  for (int i = 0; i < 4; ++i) tr.samples.push_back({double(i), pts[i], 1.0, false, 0});
  const auto rep = check_polyline_simple(tr);
  CHECK_FALSE(rep.simple);
  CHECK(rep.first == 0);
  CHECK(rep.second == 2);
}

TEST_CASE("injectivity margin, growth and secants for the wedge") {
  Wedge w;
  const auto inj = check_injectivity(w.cm, 25, 9);
  CHECK(inj.failures == 0);
  CHECK(inj.segments == 25);
  CHECK_THROWS(injectivity_margin(w.cm, cplx(0.1, 0.1), cplx(0.1, 0.1)));
  const auto g = growth_check(w.cm, {16, 64, 256, 1024});
  // Phi(0) != 0 shifts the fit at small R; the normalised minimum tends to 1/(1 - c/pi).
  CHECK(g.fitted_exponent >= 1 - kC / kPi);
  CHECK(g.normalized.back() == doctest::Approx(1 / (1 - kC / kPi)).epsilon(1e-2));
  const auto s = secant_tangent(w.cm, 0.0, {1e-2, 1e-4, 1e-6});
  for (const auto& e : s) CHECK(e.angle == doctest::Approx(kC).epsilon(1e-12));
  // |Phi'| = |x|^{-1/4}; its average over [-1, 1] is 1/(1 - c/pi).
  CHECK(average_derivative(w.cm, 0.0, 1.0, 1.0) == doctest::Approx(1 / (1 - kC / kPi)).epsilon(1e-10));
}
