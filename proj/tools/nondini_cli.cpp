// nondini: construct the domain, run the verification suites, and emit CSV/JSON artifacts.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "nondini/config.hpp"

using namespace nondini;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  std::string out;
  std::string mode;
  long long seed = -1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "configuration file (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output directory (overrides output_dir)");
  sub->add_option("--mode", c.mode, "profile mode")->check(CLI::IsMember({"lipschitz", "c1"}));
  sub->add_option("--seed", c.seed, "Monte Carlo seed")->check(CLI::NonNegativeNumber);
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (!c.mode.empty()) cfg.mode = c.mode == "c1" ? ProfileMode::C1 : ProfileMode::Lipschitz;
  if (c.seed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(c.seed);
  cfg.validate();
  return cfg;
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path d(cfg.output_dir);
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

BoundaryTrace make_trace(const Model& m) {
  const auto& t = m.config.trace;
  return trace_boundary(*m.cm, t.x_lo, t.x_hi, t.base_n, t.min_scale);
}

std::vector<double> dyadic_radii(double r_max, double r_min) {
  std::vector<double> r;
  for (int e = static_cast<int>(std::floor(std::log2(r_max))); std::ldexp(1.0, e) >= r_min * (1 - 1e-12); --e)
    r.push_back(std::ldexp(1.0, e));
  if (r.empty()) throw std::invalid_argument("no dyadic radius in [r_min, r_max]");
  return r;
}

std::vector<double> default_centers(const TangentProfile& p) {
  std::vector<double> c;
  for (size_t k = 0; k < p.size() && k < 8; ++k) c.push_back(p.x[k]);
  c.push_back(-1.0);
  c.push_back(3.0);
  return c;
}

// --------------------------------------------------------------------------------------------
// verify

struct Report {
  json checks = json::array();
  bool pass = true;
  void add(const std::string& name, const std::string& property, double measured, double tolerance, bool ok) {
    checks.push_back({{"name", name}, {"property", property}, {"measured", measured}, {"tolerance", tolerance},
                      {"verdict", ok ? "pass" : "fail"}});
    pass = pass && ok;
  }
};

void suite_modulus(const Model& m, Report& rep) {
  const ModulusSpec spec = m.config.modulus();
  const SmoothedModulus sm = make_smoothed(spec, m.config.beta, m.config.quad_tol);
  double worst = 0.0;
  const double hi = std::min(0.25 * spec.r_max, 1.0) * (1 - 1e-9);
  for (int j = 0; j < 200; ++j) {
    const double r = std::exp(std::log(1e-12) + (std::log(hi) - std::log(1e-12)) * j / 199.0);
    const double t = smooth_modulus(sm, r);
    worst = std::max({worst, eval_theta(spec, r) - t, t - eval_theta(spec, 4 * r)});
  }
  rep.add("modulus_sandwich", "theta(r) <= theta-tilde(r) <= theta(4r)", worst, 1e-8, worst <= 1e-8);
  const DiniClass d = classify_dini(spec);
  const bool expect_non_dini = spec.kind == ModulusKind::LogInverse;
  rep.add(std::string("dini_class_") + to_string(d), "dyadic sum test", d == DiniClass::NonDini ? 1.0 : 0.0, 0.0,
          expect_non_dini ? d == DiniClass::NonDini : d != DiniClass::NonDini);
}

void suite_hilbert(const Model& m, Report& rep) {
  const auto& p = m.profile();
  double worst = 0.0;
  for (double x : {-0.7, 0.3, 0.7, 1.9}) {
    if (distance_to_jumps(p, x) == 0) continue;
    worst = std::max(worst, std::abs(m.ev->K_profile_value(x) - pv_quadrature_oracle(p, x).value));
  }
  rep.add("kf_vs_pv_oracle", "Kf against symmetric-excision quadrature", worst, 1e-6, worst <= 1e-6);
  if (p.mode == ProfileMode::C1 && p.step) {
    int bad = 0;
    std::mt19937_64 rng(m.config.mc.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.5);
    for (int j = 0; j < 50; ++j) {
      double x = u(rng);
      if (x == 0) continue;
      const Bracket b = m.ev->region_bracket(x);
      const double v = kPi * m.ev->K_Htilde(x).value;
      if (v < b.lower - 10 * m.config.quad_tol || v > b.upper + 10 * m.config.quad_tol) ++bad;
    }
    rep.add("region_brackets", "K H-tilde region bounds", bad, 0, bad == 0);
  }
}

void suite_halfplane(const Model& m, Report& rep) {
  const auto& p = m.profile();
  std::mt19937_64 rng(m.config.mc.seed);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), ut(-6.0, 1.0);
  double worst = 0.0;
  for (int j = 0; j < 100; ++j) {
    const UpperHalfPoint z(ux(rng), std::exp(ut(rng)));
    worst = std::max(worst, std::abs(eval_G(*m.ev, z).arg));
  }
  rep.add("arg_G_bound", "|arg G| <= c'", worst, p.c_prime(), worst <= p.c_prime() + 1e-12);
  const UpperHalfPoint z(0.3, 0.2);
  const double dW = std::abs(extend_W(*m.ev, z) - extend_W_quadrature(*m.ev, z));
  rep.add("W_closed_vs_quadrature", "W = P_t * Kf", dW, 1e-7, dW <= 1e-7);
  const double h = 1e-5;
  const UpperHalfPoint c(0.8, 0.3);
  const double dWdx = (extend_W(*m.ev, {c.x + h, c.t}) - extend_W(*m.ev, {c.x - h, c.t})) / (2 * h);
  const double dVdt = (extend_V(p, {c.x, c.t + h}) - extend_V(p, {c.x, c.t - h})) / (2 * h);
  const double cr = std::abs(-dWdx - dVdt);
  rep.add("cauchy_riemann", "-W_x = V_t", cr, 1e-4, cr <= 1e-4);
}

void suite_conformal(const Model& m, Report& rep, const BoundaryTrace& tr) {
  const ConformalMap& cm = *m.cm;
  double worst = 0.0;
  for (cplx z : {cplx(1, 1), cplx(-0.5, 0.25), cplx(0.3, 2.0)}) {
    const cplx a = cm.phi(z);
    const cplx b = cm.integrate_path(PathSpec::through({cplx(0, 1), cplx(z.real(), 1.5 + z.imag()), z}));
    worst = std::max(worst, std::abs(a - b));
  }
  rep.add("path_independence", "integral of G independent of path", worst, 1e-8, worst <= 1e-8);
  const auto simple = check_polyline_simple(tr);
  rep.add("polyline_simple", "injectivity at trace resolution", simple.simple ? 0 : 1, 0, simple.simple);
  const auto inj = check_injectivity(cm, 20, m.config.mc.seed);
  rep.add("injectivity_margin", "Re int G >= cos(c') min|G|", inj.min_margin, 0.0, inj.failures == 0);
  const auto g = growth_check(cm, {16, 32, 64, 128, 256, 512, 1024});
  const double floor = 1 - m.profile().c_prime() / kPi - 0.05;
  rep.add("growth_exponent", "|Phi(z)| >~ |z|^(1 - c'/pi)", g.fitted_exponent, floor, g.fitted_exponent >= floor);
}

void suite_measure(const Model& m, Report& rep, const BoundaryTrace& tr) {
  double worst = 0.0;
  for (double x : {-1.5, -0.4, 0.37, 0.9, 2.5}) {
    const Density d = density_at(*m.ev, x);
    const GValue g = eval_G_boundary(*m.ev, x);
    if (d.singular || g.infinite) continue;
    worst = std::max(worst, std::abs(d.value * std::abs(g.value) - 1.0));
  }
  rep.add("density_reciprocal", "density * |G| = 1", worst, 1e-10, worst <= 1e-10);
  double dev = 0.0;
  for (double x : {-1.0, 3.0}) {
    const auto mr = measure_ratio(*m.cm, tr, x, std::ldexp(1.0, -16));
    dev = std::max(dev, std::abs(mr.ratio - density_at(*m.ev, x).value));
  }
  rep.add("control_ratio_limit", "omega/H1 -> density at regular points", dev, 1e-3, dev <= 1e-3);
}

void suite_appendix(Report& rep) {
  std::vector<double> eps;
  for (int j = 4; j <= 14; ++j) eps.push_back(std::ldexp(1.0, -j));
  std::vector<double> b3;
  for (int k = 1; k <= 6; ++k) b3.push_back(std::ldexp(1.0, -4 - k));
  for (const auto& b : std::vector<std::vector<double>>{{0.25}, {0.125, 0.125}, b3}) {
    double sb = 0;
    for (double v : b) sb += v;
    const auto o = appendix_product_integral(b, eps, FactorPlacement::Origin);
    const auto d = appendix_product_integral(b, eps, FactorPlacement::Dyadic);
    const std::string tag = "n" + std::to_string(b.size());
    rep.add("appendix_slope_origin_" + tag, "slope = 1 - sum b", o.fitted_slope, 0.05,
            std::abs(o.fitted_slope - (1 - sb)) <= 0.05 && o.bound_ok && o.left_bound_ok);
    rep.add("appendix_dyadic_" + tag, "slope in [1 - sum b - 0.05, 1] and left bound", d.fitted_slope, 0.05,
            d.fitted_slope >= 1 - sb - 0.05 && d.fitted_slope <= 1 + 1e-3 && d.bound_ok && d.left_bound_ok);
  }
}

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
  const bool all = suite == "all";
  Report rep;
  std::unique_ptr<Model> m;
  auto model = [&]() -> const Model& {
    if (!m) m = build_model(cfg);
    return *m;
  };
  std::unique_ptr<BoundaryTrace> tr;
  auto trace = [&]() -> const BoundaryTrace& {
    if (!tr) tr = std::make_unique<BoundaryTrace>(make_trace(model()));
    return *tr;
  };
  if (all || suite == "modulus") suite_modulus(model(), rep);
  if (all || suite == "hilbert") suite_hilbert(model(), rep);
  if (all || suite == "halfplane") suite_halfplane(model(), rep);
  if (all || suite == "conformal") suite_conformal(model(), rep, trace());
  if (all || suite == "measure") suite_measure(model(), rep, trace());
  if (all || suite == "appendix") suite_appendix(rep);
  json out = {{"suite", suite}, {"config", json::parse(serialize_config(cfg))}, {"checks", rep.checks},
              {"pass", rep.pass}};
  write_file(out_dir(cfg) / "report.json", out.dump(2) + "\n");
  for (const auto& c : rep.checks)
    std::printf("%-34s %s  measured=%.6g tol=%.3g\n", c["name"].get<std::string>().c_str(),
                c["verdict"].get<std::string>().c_str(), c["measured"].get<double>(), c["tolerance"].get<double>());
  std::printf("overall: %s\n", rep.pass ? "pass" : "fail");
  return rep.pass ? 0 : 1;
}

int cmd_construct(const RunConfig& cfg) {
  auto m = build_model(cfg);
  const auto d = out_dir(cfg);
  write_file(d / "profile.json", profile_json(*m) + "\n");
  const BoundaryTrace tr = make_trace(*m);
  std::ofstream f(d / "boundary.csv");
  tr.write_csv(f);
  std::printf("wrote %s and %s (%zu samples)\n", (d / "profile.json").c_str(), (d / "boundary.csv").c_str(), tr.size());
  return 0;
}

int cmd_density(RunConfig cfg, const std::vector<double>& centers, double r_min, double r_max) {
  if (r_min > 0) cfg.density.r_min = r_min;
  if (r_max > 0) cfg.density.r_max = r_max;
  if (!centers.empty()) cfg.density.centers = centers;
  cfg.validate();
  auto m = build_model(cfg);
  const BoundaryTrace tr = make_trace(*m);
  const auto cs = cfg.density.centers.empty() ? default_centers(m->profile()) : cfg.density.centers;
  const auto rep = singular_set_scan(*m->cm, tr, cs, dyadic_radii(cfg.density.r_max, cfg.density.r_min));
  const auto d = out_dir(cfg);
  std::ofstream f(d / "density.csv");
  rep.write_csv(f);
  write_file(d / "report.json", rep.summary_json() + "\n");
  std::printf("wrote %s (%zu centers)\n", (d / "density.csv").c_str(), rep.centers.size());
  return 0;
}

int cmd_mc(const RunConfig& cfg) {
  auto m = build_model(cfg);
  const BoundaryTrace tr = make_trace(*m);
  // Pole at Phi(i) = 0: exact pullback is the half-plane Poisson mass seen from i.
  const std::vector<std::pair<double, double>> arcs{{-1, 0}, {0, 1}, {1, 2}};
  const WosResult w = wos_harmonic_measure(tr, cplx(0, 0), arcs, cfg.mc.to_mc());
  json j = {{"walkers", w.walkers}, {"timeouts", w.timeouts}, {"outside", w.outside},
            {"polyline_error", w.polyline_error}, {"seed", cfg.mc.seed}};
  j["arcs"] = json::array();
  for (const auto& h : w.arcs) {
    const double exact = (std::atan(h.hi) - std::atan(h.lo)) / kPi;
    j["arcs"].push_back({{"lo", h.lo}, {"hi", h.hi}, {"hits", h.hits}, {"frequency", h.frequency},
                         {"sigma", h.sigma}, {"exact", exact}});
    std::printf("[%g, %g]  %.5f +- %.5f  exact %.5f\n", h.lo, h.hi, h.frequency, h.sigma, exact);
  }
  write_file(out_dir(cfg) / "mc.json", j.dump(2) + "\n");
  return 0;
}

int cmd_appendix(const RunConfig& cfg) {
  Report rep;
  suite_appendix(rep);
  write_file(out_dir(cfg) / "appendix.json", json({{"checks", rep.checks}, {"pass", rep.pass}}).dump(2) + "\n");
  for (const auto& c : rep.checks)
    std::printf("%-30s %s  slope=%.6f\n", c["name"].get<std::string>().c_str(),
                c["verdict"].get<std::string>().c_str(), c["measured"].get<double>());
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Dini domain construction and verification"};
  app.require_subcommand(1);

  Common c_construct, c_verify, c_density, c_mc, c_appendix;
  auto* construct = app.add_subcommand("construct", "write profile.json and boundary.csv");
  add_common(construct, c_construct);

  auto* verify = app.add_subcommand("verify", "run a verification suite and write report.json");
  add_common(verify, c_verify);
  std::string suite = "all";
  verify->add_option("--suite", suite, "suite name")
      ->check(CLI::IsMember({"modulus", "hilbert", "halfplane", "conformal", "measure", "appendix", "all"}));

  auto* density = app.add_subcommand("density", "surface-ball ratio curves; writes density.csv");
  add_common(density, c_density);
  std::vector<double> centers;
  double r_min = -1, r_max = -1;
  density->add_option("--centers", centers, "center parameters");
  density->add_option("--r-min", r_min, "smallest radius");
  density->add_option("--r-max", r_max, "largest radius");

  auto* mc = app.add_subcommand("mc-oracle", "walk-on-spheres harmonic measure; writes mc.json");
  add_common(mc, c_mc);

  auto* appendix = app.add_subcommand("appendix-check", "product-integral bound; writes appendix.json");
  add_common(appendix, c_appendix);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*construct) return cmd_construct(resolve(c_construct));
    if (*verify) return cmd_verify(resolve(c_verify), suite);
    if (*density) return cmd_density(resolve(c_density), centers, r_min, r_max);
    if (*mc) return cmd_mc(resolve(c_mc));
    if (*appendix) return cmd_appendix(resolve(c_appendix));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "nondini: %s\n", e.what());
    return 2;
  }
  return 0;
}
