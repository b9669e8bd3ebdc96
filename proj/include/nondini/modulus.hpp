// Moduli of continuity, the Dini test, and the dyadic double average theta-tilde.
#pragma once

#include <limits>
#include <string>
#include <vector>

#include "nondini/quadrature.hpp"

namespace nondini {

enum class ModulusKind { LogInverse, Power, Constant, Tabulated };

struct ModulusSpec {
  ModulusKind kind = ModulusKind::LogInverse;
  double param = 0.0;  // gamma for Power, c for Constant
  std::vector<double> grid_r, grid_theta;
  double r_max = 1.0;  // LogInverse: open bound r < 1

  static ModulusSpec log_inverse();
  static ModulusSpec power(double gamma);
  static ModulusSpec constant(double c);
  static ModulusSpec tabulated(std::vector<double> r, std::vector<double> theta);

  std::string name() const;
};

double eval_theta(const ModulusSpec& spec, double r);

enum class DiniClass { Dini, NonDini, Inconclusive };
const char* to_string(DiniClass d);

DiniClass classify_dini(const ModulusSpec& spec, double tol = 1e-6);

struct SmoothedModulus {
  ModulusSpec base;
  double quad_tol = 1e-10;
  double x_star = 0.5;
  double x0 = 0.0;
  double beta = 0.5;
};

struct X0Selection {
  double x0;
  double x_star;
};

// Builds the smoothed modulus and fills in x_star and x0.
SmoothedModulus make_smoothed(const ModulusSpec& base, double beta = 0.5, double quad_tol = 1e-10);

// (1/log^2 2) int_r^{2r} (1/t) int_t^{2t} theta(s)/s ds dt.
double smooth_modulus(const SmoothedModulus& sm, double r);
// d/dr of smooth_modulus.
double smoothed_derivative(const SmoothedModulus& sm, double r);

// Literal nested quadrature of the double average, for any kind.
double smooth_modulus_nested(const ModulusSpec& spec, double r, double quad_tol = 1e-10);
double smoothed_derivative_quadrature(const ModulusSpec& spec, double r, double quad_tol = 1e-10);

// Largest r with theta-tilde < 1 (capped at 1/2).
double find_x_star(const SmoothedModulus& sm);
X0Selection select_x0(const SmoothedModulus& sm, double beta);

}  // namespace nondini
