#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>

#include "rocpost/config.hpp"
#include "rocpost/errors.hpp"

using namespace rocpost;

namespace {

RunConfig parse_text(const std::string& text,
                     const std::string& origin = "cfg.ini") {
  std::istringstream ss(text);
  return parse_config(ss, origin);
}

std::string error_of(const std::string& text) {
  try {
    parse_text(text);
  } catch (const InputError& e) {
    return e.what();
  }
  REQUIRE(false);
  return "";
}

}  // namespace

TEST_CASE("an empty config file means all defaults") {
  const RunConfig cfg = parse_text("");
  CHECK(cfg.split.train == 0.30);
  CHECK(cfg.split.post == 0.35);
  CHECK(cfg.split.test == 0.35);
  CHECK(cfg.seed == 0);
  CHECK(cfg.repeat == 1);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.epsilon == 1e-7);
  CHECK(cfg.construct.mechanism == Mechanism::AntiDiagonal);
  REQUIRE(cfg.constraints.size() == 4);
  CHECK(cfg.constraints[0].metric == Metric::DemographicParity);
  CHECK(cfg.constraints[3].metric == Metric::PredictiveParity);
  CHECK(cfg.constraints[0].delta == 0.05);
  CHECK(cfg.synth.groups.empty());
  CHECK(config_text(cfg) == config_text(RunConfig{}));
}

TEST_CASE("canonical emit round-trips byte for byte") {
  RunConfig c;
  SUBCASE("defaults") {}
  SUBCASE("everything customized") {
    c.input = "scores.csv";
    c.post_input = "post.csv";
    c.test_input = "test.csv";
    c.schema.score_col = "s";
    c.schema.group_col = "g";
    c.schema.label_col = "y";
    c.out_dir = "artifacts";
    c.split = {0.2, 0.3, 0.5};
    c.seed = 18446744073709551615ULL;
    c.repeat = 7;
    c.constraints = {{Metric::AccuracyParity, 0.1},
                     {Metric::ForParity, 1.0 / 3.0},
                     {Metric::DemographicParity, 1e-3}};
    c.epsilon = 1e-9;
    c.region.grid_single = 33;
    c.region.grid_multi = 17;
    c.region.tau_alpha = 0.005;
    c.region.alpha_cap = 12.5;
    c.construct.mechanism = Mechanism::LabelFlipping;
    c.construct.snap_xi = 0.1;
    c.construct.coarse_points = 11;
    c.construct.golden_tol = 1e-6;
    c.construct.golden_max_iter = 9;
    c.diagnostics = true;
    c.lp_dump = true;
    c.synth.groups = {{"A", {120, 2.5, 1.0 / 3.0}, {80, 1.0, 4.0}},
                      {"B", {60, 0.7, 0.7}, {90, 3.0, 2.0}}};
  }

  const std::string text1 = config_text(c);
  const RunConfig c2 = parse_text(text1);
  const std::string text2 = config_text(c2);
  CHECK(text1 == text2);
  CHECK(config_hash(c) == config_hash(c2));
}

TEST_CASE("keys land in their fields, whitespace and comments ignored") {
  const RunConfig cfg = parse_text(
      "# run setup\n"
      "[io]\n"
      "input = data/all.csv\n"
      "  score_col =\traw_score  \n"
      "\n"
      "[split]\n"
      "train = 0.5\n"
      "post = 0.25\n"
      "test = 0.25\n"
      "[run]\n"
      "seed = 31337\n"
      "repeat = 3\n"
      "mechanism = lf\n"
      "diagnostics = true\n"
      "lp_dump = 1\n"
      "[constraints]\n"
      "active = eopp:0.02\n"
      "epsilon = 1e-6\n"
      "[region]\n"
      "grid_single = 501\n"
      "grid_multi = 41\n"
      "tau_alpha = 0.02\n"
      "alpha_cap = 50\n"
      "[construct]\n"
      "snap_xi = 1.5\n"
      "coarse_points = 51\n"
      "golden_tol = 1e-4\n"
      "golden_max_iter = 20\n");
  CHECK(cfg.input == "data/all.csv");
  CHECK(cfg.schema.score_col == "raw_score");
  CHECK(cfg.split.train == 0.5);
  CHECK(cfg.seed == 31337);
  CHECK(cfg.repeat == 3);
  CHECK(cfg.construct.mechanism == Mechanism::LabelFlipping);
  CHECK(cfg.diagnostics);
  CHECK(cfg.lp_dump);
  REQUIRE(cfg.constraints.size() == 1);
  CHECK(cfg.constraints[0].metric == Metric::EqualOpportunity);
  CHECK(cfg.constraints[0].delta == 0.02);
  CHECK(cfg.epsilon == 1e-6);
  CHECK(cfg.region.grid_single == 501);
  CHECK(cfg.region.grid_multi == 41);
  CHECK(cfg.region.tau_alpha == 0.02);
  CHECK(cfg.region.alpha_cap == 50.0);
  CHECK(cfg.construct.snap_xi == 1.5);
  CHECK(cfg.construct.coarse_points == 51);
  CHECK(cfg.construct.golden_tol == 1e-4);
  CHECK(cfg.construct.golden_max_iter == 20);
}

TEST_CASE("constraint lists parse with spaces and keep order") {
  const RunConfig cfg = parse_text(
      "[constraints]\n"
      "active = dp:0.05, eopp:0.1 ,pp:0.02\n");
  REQUIRE(cfg.constraints.size() == 3);
  CHECK(cfg.constraints[0].metric == Metric::DemographicParity);
  CHECK(cfg.constraints[1].metric == Metric::EqualOpportunity);
  CHECK(cfg.constraints[1].delta == 0.1);
  CHECK(cfg.constraints[2].metric == Metric::PredictiveParity);

  SUBCASE("an explicitly empty list parses but cannot be used") {
    const RunConfig none = parse_text("[constraints]\nactive = \n");
    CHECK(none.constraints.empty());
    GroupStats stats;
    CHECK_THROWS_AS(active_specs(none, stats), InputError);
  }

  SUBCASE("malformed entries") {
    CHECK_THROWS_AS(parse_text("[constraints]\nactive = dp\n"), InputError);
    CHECK_THROWS_AS(parse_text("[constraints]\nactive = zz:0.1\n"),
                    InputError);
    CHECK_THROWS_AS(parse_text("[constraints]\nactive = dp:1.5\n"),
                    InputError);
    CHECK_THROWS_AS(parse_text("[constraints]\nactive = dp:-0.1\n"),
                    InputError);
  }
}

TEST_CASE("synth cells merge into groups by name, order of first mention") {
  const RunConfig cfg = parse_text(
      "[synth]\n"
      "cell = A pos 120 2.0 1.0\n"
      "cell = B pos 50 1.5 1.5\n"
      "cell = A neg 200 1.0 3.0\n"
      "cell = B neg 75 2.0 2.0\n");
  REQUIRE(cfg.synth.groups.size() == 2);
  CHECK(cfg.synth.groups[0].name == "A");
  CHECK(cfg.synth.groups[0].pos.count == 120);
  CHECK(cfg.synth.groups[0].neg.count == 200);
  CHECK(cfg.synth.groups[0].neg.beta == 3.0);
  CHECK(cfg.synth.groups[1].name == "B");
  CHECK(cfg.synth.groups[1].pos.alpha == 1.5);

  CHECK_THROWS_AS(parse_text("[synth]\ncell = A mid 5 1 1\n"), InputError);
  CHECK_THROWS_AS(parse_text("[synth]\ncell = A pos x 1 1\n"), InputError);
}

TEST_CASE("parse errors carry origin and line number") {
  CHECK(error_of("[io]\ninput = a\nbogus_key = 1\n").find("cfg.ini:3") !=
        std::string::npos);
  CHECK(error_of("[nope]\n").find("unknown section") != std::string::npos);
  CHECK(error_of("x = 1\n").find("outside any section") != std::string::npos);
  CHECK(error_of("[split]\ntrain = abc\n").find("bad number") !=
        std::string::npos);
  CHECK(error_of("[run]\nseed = -1x\n").find("bad seed") != std::string::npos);
  CHECK(error_of("[io]\njust a line\n").find("expected key = value") !=
        std::string::npos);
  CHECK(error_of("[run]\ndiagnostics = maybe\n").find("bad flag") !=
        std::string::npos);
  CHECK(error_of("[run]\nmechanism = coin\n").find("unknown mechanism") !=
        std::string::npos);
}

TEST_CASE("cross-field validation happens after parsing") {
  CHECK_THROWS_AS(parse_text("[split]\ntrain = 0.2\npost = 0.2\ntest = 0.2\n"),
                  InputError);
  CHECK_THROWS_AS(parse_text("[region]\ngrid_single = 1\n"), InputError);
  CHECK_THROWS_AS(parse_text("[region]\ntau_alpha = 0\n"), InputError);
  CHECK_THROWS_AS(parse_text("[region]\nalpha_cap = 0.5\n"), InputError);
  CHECK_THROWS_AS(parse_text("[construct]\nsnap_xi = 0\n"), InputError);
  CHECK_THROWS_AS(parse_text("[construct]\ngolden_max_iter = 0\n"),
                  InputError);
  CHECK_THROWS_AS(parse_text("[run]\nrepeat = 0\n"), InputError);
  CHECK_THROWS_AS(parse_text("[constraints]\nepsilon = 0\n"), InputError);
}

TEST_CASE("config hash: 16 hex chars, stable, sensitive") {
  const RunConfig a = parse_text("[run]\nseed = 7\n");
  const RunConfig b = parse_text("[run]\nseed = 7\n");
  const RunConfig c = parse_text("[run]\nseed = 8\n");
  const std::string ha = config_hash(a);
  CHECK(ha.size() == 16);
  CHECK(ha.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(ha == config_hash(b));
  CHECK(ha != config_hash(c));
}

TEST_CASE("missing config file is a clean input error") {
  CHECK_THROWS_AS(load_config("/nonexistent/rocpost.ini"), InputError);
}
