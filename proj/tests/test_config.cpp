#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"
#include "nondini/config.hpp"

using namespace nondini;

TEST_CASE("defaults validate and survive a round trip") {
  const RunConfig d;
  CHECK_NOTHROW(d.validate());
  CHECK(parse_config(serialize_config(d)) == d);
  RunConfig c;
  c.mode = ProfileMode::Lipschitz;
  c.amplitude = AmplitudeRule::Single;
  c.theta_kind = ModulusKind::Tabulated;
  c.theta_grid_r = {1e-6, 1e-3, 0.5};
  c.theta_grid_values = {0.05, 0.1, 0.2};
  c.density.centers = {0.5, -1.0};
  c.mc.seed = 0xFFFFFFFFFFull;
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(parse_config("{}") == d);
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(parse_config(R"({"c_prime_target": 2.0})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"trace": {"x_lo": -1, "typo": 3}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"mc": {"n_walkers": "many"}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"mode": "smooth"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"K": 0})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"density": {"r_min": 1, "r_max": 0.5}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"trace": {"x_lo": 0.5}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("not json"), std::invalid_argument);
  CHECK_THROWS(load_config("/nonexistent/config.json"));
}

TEST_CASE("model assembly for every amplitude rule") {
  RunConfig c;
  c.mode = ProfileMode::Lipschitz;
  auto m = build_model(c);
  CHECK(m->profile().size() == 20);
  CHECK(m->profile().c_prime() == doctest::Approx(kPi / 4));
  CHECK_FALSE(m->step);

  c.amplitude = AmplitudeRule::Single;
  CHECK(build_model(c)->profile().size() == 1);
  c.amplitude = AmplitudeRule::Flat;
  CHECK(build_model(c)->profile().c_prime() == 0.0);

  c = RunConfig{};
  c.K = 5;
  m = build_model(c);
  REQUIRE(m->step);
  const auto j = nlohmann::json::parse(profile_json(*m));
  CHECK(j["mode"] == "c1");
  CHECK(j["a"].size() == 5);
  CHECK(j["modulus"]["x_star"].get<double>() == doctest::Approx(0.2207179511));
  CHECK(j["bridge"]["g_lip"].get<double>() > 0);
}
