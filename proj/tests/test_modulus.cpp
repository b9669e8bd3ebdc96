#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nondini/modulus.hpp"

using namespace nondini;

namespace {

// Composite Simpson in log variables; smooth integrands only.
double simpson(auto f, double a, double b, int n = 400) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

double nested(const ModulusSpec& spec, double r) {
  const double l2 = std::log(2.0);
  auto inner = [&](double lt) { return simpson([&](double ls) { return eval_theta(spec, std::exp(ls)); }, lt, lt + l2); };
  return simpson(inner, std::log(r), std::log(r) + l2) / (l2 * l2);
}

}  // namespace

TEST_CASE("theta families evaluate their defining formulas") {
  CHECK(eval_theta(ModulusSpec::log_inverse(), 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_theta(ModulusSpec::power(0.5), 0.09) == doctest::Approx(0.3));
  CHECK(eval_theta(ModulusSpec::constant(0.1), 1e-9) == 0.1);
  const auto tab = ModulusSpec::tabulated({0.01, 0.1, 1.0}, {0.1, 0.3, 0.5});
  CHECK(eval_theta(tab, 0.055) == doctest::Approx(0.2));
  CHECK_THROWS(eval_theta(tab, 2.0));
  CHECK_THROWS(eval_theta(ModulusSpec::log_inverse(), 0.0));
  CHECK_THROWS(eval_theta(ModulusSpec::log_inverse(), 1.0));
}

TEST_CASE("smoothed modulus matches nested quadrature and the sandwich") {
  for (const auto& spec : {ModulusSpec::log_inverse(), ModulusSpec::power(1.0), ModulusSpec::power(0.3)}) {
    const SmoothedModulus sm = make_smoothed(spec);
    for (double r : {1e-10, 1e-6, 1e-3, 0.01, 0.1, 0.2}) {
      const double t = smooth_modulus(sm, r);
      CHECK(t == doctest::Approx(nested(spec, r)).epsilon(1e-10));
      CHECK(eval_theta(spec, r) <= t + 1e-12);
      CHECK(t <= eval_theta(spec, 4 * r) + 1e-12);
    }
  }
}

TEST_CASE("smoothed derivative matches a central difference") {
  const SmoothedModulus sm = make_smoothed(ModulusSpec::log_inverse());
  for (double r : {1e-6, 1e-3, 0.05}) {
    const double h = r * 1e-5;
    const double fd = (smooth_modulus(sm, r + h) - smooth_modulus(sm, r - h)) / (2 * h);
    CHECK(smoothed_derivative(sm, r) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(smoothed_derivative(sm, r) == doctest::Approx(smoothed_derivative_quadrature(sm.base, r)).epsilon(1e-8));
  }
}

TEST_CASE("x_star and x0 for the log-inverse modulus") {
  const SmoothedModulus sm = make_smoothed(ModulusSpec::log_inverse());
  CHECK(sm.x_star == doctest::Approx(0.2207179511).epsilon(1e-9));
  CHECK(smooth_modulus(sm, sm.x_star) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(smooth_modulus(sm, 0.99 * sm.x_star) < 1.0);
  // x0 is dyadic and strictly below x_star / 4.
  CHECK(sm.x0 == 0x1p-6);
  CHECK(std::log2(sm.x0) == std::round(std::log2(sm.x0)));
  CHECK(sm.x0 < sm.x_star / 4);
}

TEST_CASE("Dini classification") {
  CHECK(classify_dini(ModulusSpec::log_inverse()) == DiniClass::NonDini);
  CHECK(classify_dini(ModulusSpec::power(1.0)) == DiniClass::Dini);
  CHECK(classify_dini(ModulusSpec::constant(0.1)) == DiniClass::NonDini);
  CHECK(std::string(to_string(DiniClass::NonDini)) == "non_dini");
}
