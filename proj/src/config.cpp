#include "nondini/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nondini {

using nlohmann::json;

const char* to_string(AmplitudeRule r) {
  switch (r) {
    case AmplitudeRule::Geometric: return "geometric";
    case AmplitudeRule::Single: return "single";
    case AmplitudeRule::Flat: return "flat";
  }
  return "?";
}

namespace {

const char* kind_name(ModulusKind k) {
  switch (k) {
    case ModulusKind::LogInverse: return "log_inverse";
    case ModulusKind::Power: return "power";
    case ModulusKind::Constant: return "constant";
    case ModulusKind::Tabulated: return "tabulated";
  }
  return "?";
}

template <class E>
E parse_enum(const json& j, const char* what, std::initializer_list<std::pair<const char*, E>> opts) {
  const std::string s = j.get<std::string>();
  for (const auto& [name, v] : opts)
    if (s == name) return v;
  throw std::invalid_argument(std::string("unknown ") + what + " '" + s + "'");
}

void reject_unknown(const json& j, const char* where, std::set<std::string> allowed) {
  if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw std::invalid_argument(std::string("unknown key '") + it.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void RunConfig::validate() const {
  if (!(c_prime_target > 0 && c_prime_target < kPi / 2)) throw std::invalid_argument("c_prime_target must lie in (0, pi/2)");
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (!(quad_tol > 0) || !(tail_tol > 0)) throw std::invalid_argument("tolerances must be positive");
  if (!(trace.x_lo < 0 && trace.x_hi > 0)) throw std::invalid_argument("trace window must contain 0");
  if (trace.base_n < 2) throw std::invalid_argument("trace.base_n must be >= 2");
  if (!(trace.min_scale > 0)) throw std::invalid_argument("trace.min_scale must be positive");
  if (!(density.r_min > 0 && density.r_min <= density.r_max)) throw std::invalid_argument("need 0 < r_min <= r_max");
  if (mc.n_walkers < 1 || mc.max_steps < 1 || !(mc.wos_epsilon > 0) || mc.threads < 0)
    throw std::invalid_argument("invalid Monte Carlo settings");
  if (output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
  modulus();
}

ModulusSpec RunConfig::modulus() const {
  switch (theta_kind) {
    case ModulusKind::LogInverse: return ModulusSpec::log_inverse();
    case ModulusKind::Power: return ModulusSpec::power(theta_param);
    case ModulusKind::Constant: return ModulusSpec::constant(theta_param);
    case ModulusKind::Tabulated: return ModulusSpec::tabulated(theta_grid_r, theta_grid_values);
  }
  throw std::invalid_argument("unknown modulus kind");
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    reject_unknown(j, "config", {"theta", "mode", "c_prime_target", "amplitude", "K", "beta", "quad_tol", "tail_tol",
                                 "trace", "density", "mc", "output_dir"});
    if (j.contains("theta")) {
      const json& t = j["theta"];
      reject_unknown(t, "theta", {"kind", "param", "grid_r", "grid_theta"});
      if (t.contains("kind"))
        c.theta_kind = parse_enum<ModulusKind>(t["kind"], "theta kind",
                                               {{"log_inverse", ModulusKind::LogInverse},
                                                {"power", ModulusKind::Power},
                                                {"constant", ModulusKind::Constant},
                                                {"tabulated", ModulusKind::Tabulated}});
      read(t, "param", c.theta_param);
      read(t, "grid_r", c.theta_grid_r);
      read(t, "grid_theta", c.theta_grid_values);
    }
    if (j.contains("mode"))
      c.mode = parse_enum<ProfileMode>(j["mode"], "mode", {{"lipschitz", ProfileMode::Lipschitz}, {"c1", ProfileMode::C1}});
    read(j, "c_prime_target", c.c_prime_target);
    if (j.contains("amplitude"))
      c.amplitude = parse_enum<AmplitudeRule>(j["amplitude"], "amplitude rule",
                                              {{"geometric", AmplitudeRule::Geometric},
                                               {"single", AmplitudeRule::Single},
                                               {"flat", AmplitudeRule::Flat}});
    read(j, "K", c.K);
    read(j, "beta", c.beta);
    read(j, "quad_tol", c.quad_tol);
    read(j, "tail_tol", c.tail_tol);
    if (j.contains("trace")) {
      const json& t = j["trace"];
      reject_unknown(t, "trace", {"x_lo", "x_hi", "base_n", "min_scale"});
      read(t, "x_lo", c.trace.x_lo);
      read(t, "x_hi", c.trace.x_hi);
      read(t, "base_n", c.trace.base_n);
      read(t, "min_scale", c.trace.min_scale);
    }
    if (j.contains("density")) {
      const json& t = j["density"];
      reject_unknown(t, "density", {"centers", "r_min", "r_max"});
      read(t, "centers", c.density.centers);
      read(t, "r_min", c.density.r_min);
      read(t, "r_max", c.density.r_max);
    }
    if (j.contains("mc")) {
      const json& t = j["mc"];
      reject_unknown(t, "mc", {"n_walkers", "seed", "wos_epsilon", "max_steps", "threads"});
      read(t, "n_walkers", c.mc.n_walkers);
      read(t, "seed", c.mc.seed);
      read(t, "wos_epsilon", c.mc.wos_epsilon);
      read(t, "max_steps", c.mc.max_steps);
      read(t, "threads", c.mc.threads);
    }
    read(j, "output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config has a value of the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["theta"] = {{"kind", kind_name(c.theta_kind)}, {"param", c.theta_param}};
  if (c.theta_kind == ModulusKind::Tabulated) {
    j["theta"]["grid_r"] = c.theta_grid_r;
    j["theta"]["grid_theta"] = c.theta_grid_values;
  }
  j["mode"] = c.mode == ProfileMode::C1 ? "c1" : "lipschitz";
  j["c_prime_target"] = c.c_prime_target;
  j["amplitude"] = to_string(c.amplitude);
  j["K"] = c.K;
  j["beta"] = c.beta;
  j["quad_tol"] = c.quad_tol;
  j["tail_tol"] = c.tail_tol;
  j["trace"] = {{"x_lo", c.trace.x_lo}, {"x_hi", c.trace.x_hi}, {"base_n", c.trace.base_n}, {"min_scale", c.trace.min_scale}};
  j["density"] = {{"centers", c.density.centers}, {"r_min", c.density.r_min}, {"r_max", c.density.r_max}};
  j["mc"] = {{"n_walkers", c.mc.n_walkers},
             {"seed", c.mc.seed},
             {"wos_epsilon", c.mc.wos_epsilon},
             {"max_steps", c.mc.max_steps},
             {"threads", c.mc.threads}};
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

std::unique_ptr<Model> build_model(const RunConfig& c) {
  c.validate();
  auto m = std::make_unique<Model>();
  m->config = c;
  TangentProfile p;
  switch (c.amplitude) {
    case AmplitudeRule::Flat:
      p = flat_profile();
      break;
    case AmplitudeRule::Single:
      if (c.mode == ProfileMode::C1) {
        m->step = std::make_shared<Htilde>(make_smoothed(c.modulus(), c.beta, c.quad_tol));
        p = make_profile(ProfileMode::C1, c.c_prime_target, {1.0}, {0.0}, m->step);
      } else {
        p = wedge_profile(c.c_prime_target);
      }
      break;
    case AmplitudeRule::Geometric:
      if (c.mode == ProfileMode::C1)
        m->step = std::make_shared<Htilde>(make_smoothed(c.modulus(), c.beta, c.quad_tol));
      p = default_profile(c.mode, m->step, c.K, c.c_prime_target);
      break;
  }
  p.tail_tol = c.tail_tol;
  m->ev = std::make_unique<HilbertEvaluator>(std::move(p), c.quad_tol);
  m->cm = std::make_unique<ConformalMap>(*m->ev, c.quad_tol);
  return m;
}

std::string profile_json(const Model& m) {
  const auto& p = m.profile();
  json j;
  j["mode"] = to_string(p.mode);
  j["c"] = p.c;
  j["c_prime"] = p.c_prime();
  j["a"] = p.a;
  j["x"] = p.x;
  j["tail_tol"] = p.tail_tol;
  if (m.step) {
    const auto& sm = m.step->modulus();
    const auto& br = m.step->bridge();
    j["modulus"] = {{"kind", kind_name(sm.base.kind)}, {"name", sm.base.name()}, {"param", sm.base.param},
                    {"x_star", sm.x_star}, {"x0", sm.x0}, {"beta", sm.beta}};
    j["bridge"] = {{"knots", br.knots}, {"values", br.values}, {"slopes", br.slopes}, {"g_lip", br.g_lip}};
    j["K_at_x0"] = m.ev->K_at_x0();
    j["K_at_x_star"] = m.ev->K_at_x_star();
  }
  return j.dump(2, ' ', false, json::error_handler_t::strict);
}

}  // namespace nondini
