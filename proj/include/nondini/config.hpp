// Run configuration (JSON, unknown keys rejected) and model assembly for the command line.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nondini/measure.hpp"

namespace nondini {

enum class AmplitudeRule { Geometric, Single, Flat };
const char* to_string(AmplitudeRule r);

struct TraceConfig {
  double x_lo = -2.0;
  double x_hi = 4.0;
  int base_n = 97;
  double min_scale = 0x1p-28;
  bool operator==(const TraceConfig&) const = default;
};

struct DensityConfig {
  std::vector<double> centers;  // empty: x_1..x_8 plus -1 and 3
  double r_min = 0x1p-20;
  double r_max = 0x1p-8;
  bool operator==(const DensityConfig&) const = default;
};

struct MCSettings {
  long n_walkers = 100000;
  std::uint64_t seed = 1;
  double wos_epsilon = 1e-4;
  long max_steps = 100000;
  int threads = 0;
  bool operator==(const MCSettings&) const = default;
  MCConfig to_mc() const { return {n_walkers, seed, wos_epsilon, max_steps, threads}; }
};

struct RunConfig {
  ModulusKind theta_kind = ModulusKind::LogInverse;
  double theta_param = 0.0;
  std::vector<double> theta_grid_r, theta_grid_values;  // Tabulated only
  ProfileMode mode = ProfileMode::C1;
  double c_prime_target = kPi / 4;
  AmplitudeRule amplitude = AmplitudeRule::Geometric;
  int K = 20;
  double beta = 0.5;
  double quad_tol = 1e-10;
  double tail_tol = 1e-8;
  TraceConfig trace;
  DensityConfig density;
  MCSettings mc;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
  ModulusSpec modulus() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);

// Everything built from a configuration, in dependency order.
struct Model {
  RunConfig config;
  std::shared_ptr<const Htilde> step;  // C1 only
  std::unique_ptr<HilbertEvaluator> ev;
  std::unique_ptr<ConformalMap> cm;

  const TangentProfile& profile() const { return ev->profile(); }
};

std::unique_ptr<Model> build_model(const RunConfig& c);

// Profile, smoothed modulus and bridge as a JSON document.
std::string profile_json(const Model& m);

}  // namespace nondini
