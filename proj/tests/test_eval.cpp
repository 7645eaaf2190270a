#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "rocpost/errors.hpp"
#include "rocpost/eval.hpp"

using namespace rocpost;

namespace {

// Fourteen samples over two groups with unique scores; thresholding at
// 0.6 (A) and 0.65 (B) gives counts small enough to verify by hand.
Dataset worked_dataset() {
  return testutil::make_dataset({
      {0.9, 0, 1},
      {0.8, 0, 1},
      {0.7, 0, 0},
      {0.6, 0, 1},
      {0.4, 0, 0},
      {0.2, 0, 0},
      {0.85, 1, 1},
      {0.75, 1, 0},
      {0.65, 1, 1},
      {0.55, 1, 0},
      {0.45, 1, 0},
      {0.35, 1, 1},
      {0.25, 1, 0},
      {0.15, 1, 0},
  });
}

std::optional<double> group_value(const EvalReport& rep,
                                  const std::string& metric,
                                  const std::string& group) {
  for (const auto& m : rep.metrics) {
    if (m.name != metric) continue;
    for (std::size_t a = 0; a < rep.group_names.size(); ++a)
      if (rep.group_names[a] == group) return m.per_group[a];
  }
  REQUIRE(false);
  return std::nullopt;
}

std::optional<double> gap_value(const EvalReport& rep,
                                const std::string& metric) {
  for (const auto& m : rep.metrics)
    if (m.name == metric) return m.gap;
  REQUIRE(false);
  return std::nullopt;
}

}  // namespace

TEST_CASE("vertex recipes reduce to plain thresholding, verified by hand") {
  const Dataset d = worked_dataset();
  const auto hulls = build_hulls(d);
  // group A hull contains (tpr=1, fpr=1/3), group B (tpr=2/3, fpr=1/5)
  const std::vector<RatePoint> targets = {{1.0, 1.0 / 3.0},
                                          {2.0 / 3.0, 0.2}};
  const Recipe recipe =
      build_recipe(hulls, targets, d.group_names, ConstructConfig{}, 5, "h");
  REQUIRE(recipe.groups[0].snapped);
  REQUIRE(recipe.groups[1].snapped);

  const EvalReport rep = evaluate_recipe(recipe, d);
  REQUIRE(rep.counts.size() == 2);
  CHECK(rep.counts[0].tp == 3);
  CHECK(rep.counts[0].fp == 1);
  CHECK(rep.counts[0].tn == 2);
  CHECK(rep.counts[0].fn == 0);
  CHECK(rep.counts[1].tp == 2);
  CHECK(rep.counts[1].fp == 1);
  CHECK(rep.counts[1].tn == 4);
  CHECK(rep.counts[1].fn == 1);

  CHECK(rep.accuracy == doctest::Approx(11.0 / 14.0));
  CHECK(rep.intervention_sampled == 0.0);
  CHECK(rep.intervention_expected == doctest::Approx(0.0));

  CHECK(*group_value(rep, "dp", "A") == doctest::Approx(4.0 / 6.0));
  CHECK(*group_value(rep, "dp", "B") == doctest::Approx(3.0 / 8.0));
  CHECK(*gap_value(rep, "dp") == doctest::Approx(2.0 / 3.0 - 3.0 / 8.0));
  CHECK(*group_value(rep, "eopp", "A") == doctest::Approx(1.0));
  CHECK(*gap_value(rep, "eopp") == doctest::Approx(1.0 / 3.0));
  CHECK(*group_value(rep, "peq", "A") == doctest::Approx(1.0 / 3.0));
  CHECK(*group_value(rep, "peq", "B") == doctest::Approx(0.2));
  CHECK(*group_value(rep, "pp", "A") == doctest::Approx(0.75));
  CHECK(*group_value(rep, "pp", "B") == doctest::Approx(2.0 / 3.0));
  CHECK(*group_value(rep, "forp", "A") == doctest::Approx(0.0));
  CHECK(*group_value(rep, "forp", "B") == doctest::Approx(0.2));

  SUBCASE("report text carries every number") {
    std::ostringstream ss;
    write_report(ss, rep);
    const std::string text = ss.str();
    CHECK(text.find("rocpost-report v1") == 0);
    CHECK(text.find("counts_A = 3,1,2,0") != std::string::npos);
    CHECK(text.find("counts_B = 2,1,4,1") != std::string::npos);
    CHECK(text.find("gap_dp = ") != std::string::npos);
    CHECK(text.find("recipe   0.7857") != std::string::npos);
  }

  SUBCASE("evaluation is reproducible") {
    const EvalReport again = evaluate_recipe(recipe, d);
    std::ostringstream a, b;
    write_report(a, rep);
    write_report(b, again);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("metrics with empty denominators drop out of the gaps") {
  const Dataset d = worked_dataset();
  const auto hulls = build_hulls(d);
  // group A pinned to the reject-everything vertex: no predicted positives
  const std::vector<RatePoint> targets = {{0.0, 0.0}, {2.0 / 3.0, 0.2}};
  const Recipe recipe =
      build_recipe(hulls, targets, d.group_names, ConstructConfig{}, 5, "h");
  const EvalReport rep = evaluate_recipe(recipe, d);

  CHECK(rep.counts[0].tp + rep.counts[0].fp == 0);
  CHECK_FALSE(group_value(rep, "pp", "A").has_value());
  CHECK(group_value(rep, "pp", "B").has_value());
  CHECK_FALSE(gap_value(rep, "pp").has_value());  // one defined value only
  CHECK(gap_value(rep, "dp").has_value());

  std::ostringstream ss;
  write_report(ss, rep);
  CHECK(ss.str().find("gap_pp = undefined") != std::string::npos);
  CHECK(ss.str().find("pp_A = undefined") != std::string::npos);
}

TEST_CASE("a single group has values but no gaps") {
  Dataset d;
  d.group_names = {"only"};
  testutil::Rng rng(8, 0);
  for (int i = 0; i < 40; ++i)
    d.samples.push_back({rng.uniform(), 0, rng.bernoulli(0.5) ? 1 : 0});
  const auto hulls = build_hulls(d);
  const auto& v = hulls[0].supports[1];
  const Recipe recipe = build_recipe(hulls, {{v.tpr(), v.fpr}}, {"only"},
                                     ConstructConfig{}, 3, "");
  const EvalReport rep = evaluate_recipe(recipe, d);
  for (const auto& m : rep.metrics) CHECK_FALSE(m.gap.has_value());
  CHECK(group_value(rep, "dp", "only").has_value());
}

TEST_CASE("groups are matched to recipe entries by name") {
  const Dataset d = worked_dataset();
  const auto hulls = build_hulls(d);
  const std::vector<RatePoint> targets = {{1.0, 1.0 / 3.0},
                                          {2.0 / 3.0, 0.2}};
  const Recipe recipe =
      build_recipe(hulls, targets, d.group_names, ConstructConfig{}, 5, "h");

  // same samples, but group B re-indexed first
  Dataset swapped;
  swapped.group_names = {"B", "A"};
  for (const auto& s : d.samples)
    swapped.samples.push_back({s.score, 1 - s.group, s.label});

  const EvalReport rep = evaluate_recipe(recipe, swapped);
  CHECK(rep.group_names[0] == "B");
  CHECK(rep.counts[0].tp == 2);  // B's counts now sit in slot 0
  CHECK(rep.counts[1].tp == 3);
  CHECK(*group_value(rep, "dp", "A") == doctest::Approx(4.0 / 6.0));

  Dataset alien = d;
  alien.group_names = {"A", "Z"};
  CHECK_THROWS_AS(evaluate_recipe(recipe, alien), InputError);
}

TEST_CASE("expected and sampled intervention agree on a large sample") {
  GroupHull h = testutil::make_hull({{1.0, 0.0}, {0.4, 0.1}, {0.0, 1.0}}, 0.5);
  h.supports[1].threshold = 0.6;
  h.supports[2].threshold = 0.2;
  const Recipe recipe =
      build_recipe({h}, {{0.5, 0.2}}, {"A"}, ConstructConfig{}, 99, "");
  REQUIRE_FALSE(recipe.groups[0].snapped);

  Dataset d;
  d.group_names = {"A"};
  testutil::Rng rng(66, 2);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const bool pos = rng.bernoulli(0.5);
    const double score = pos ? (rng.bernoulli(0.6) ? rng.uniform(0.61, 1.0)
                                                   : rng.uniform(0.21, 0.59))
                             : (rng.bernoulli(0.1) ? rng.uniform(0.61, 1.0)
                                                   : rng.uniform(0.21, 0.59));
    d.samples.push_back({score, 0, pos ? 1 : 0});
  }

  const EvalReport rep = evaluate_recipe(recipe, d);
  CHECK(rep.intervention_expected > 0.01);
  const double se = std::sqrt(rep.intervention_expected *
                              (1.0 - rep.intervention_expected) / n);
  CHECK(std::fabs(rep.intervention_sampled - rep.intervention_expected) <=
        4.0 * se + 1e-3);
}

TEST_CASE("aggregation with textbook mean and n-1 deviation") {
  auto make = [](double acc, std::optional<double> dp_gap, double alpha) {
    EvalReport r;
    r.accuracy = acc;
    r.alpha = alpha;
    MetricReport dp;
    dp.name = "dp";
    dp.gap = dp_gap;
    MetricReport eopp;
    eopp.name = "eopp";
    eopp.gap = 0.1;
    r.metrics = {dp, eopp};
    return r;
  };

  SUBCASE("three runs") {
    const AggregateReport agg = aggregate(
        {make(0.8, 0.1, 1.0), make(0.9, 0.2, 1.0), make(0.7, 0.3, 2.0)});
    CHECK(agg.runs == 3);
    CHECK(agg.accuracy_mean == doctest::Approx(0.8));
    CHECK(agg.accuracy_sd == doctest::Approx(0.1));
    REQUIRE(agg.gap_mean[0].has_value());
    CHECK(*agg.gap_mean[0] == doctest::Approx(0.2));
    CHECK(*agg.gap_sd[0] == doctest::Approx(0.1));
    CHECK(agg.alpha_mean == doctest::Approx(4.0 / 3.0));
    CHECK(agg.alpha_sd == doctest::Approx(std::sqrt(1.0 / 3.0)));

    std::ostringstream ss;
    write_aggregate(ss, agg);
    CHECK(ss.str().find("runs = 3") != std::string::npos);
    CHECK(ss.str().find("gap_dp_mean = ") != std::string::npos);
    CHECK(ss.str().find("mean+-sd") != std::string::npos);
  }

  SUBCASE("one undefined gap spoils that metric only") {
    const AggregateReport agg =
        aggregate({make(0.8, 0.1, 1.0), make(0.9, std::nullopt, 1.0)});
    CHECK_FALSE(agg.gap_mean[0].has_value());
    REQUIRE(agg.gap_mean[1].has_value());
    CHECK(*agg.gap_mean[1] == doctest::Approx(0.1));
    std::ostringstream ss;
    write_aggregate(ss, agg);
    CHECK(ss.str().find("gap_dp_mean = undefined") != std::string::npos);
  }

  SUBCASE("a single run has zero deviation") {
    const AggregateReport agg = aggregate({make(0.8, 0.1, 1.0)});
    CHECK(agg.accuracy_sd == 0.0);
    CHECK(*agg.gap_sd[0] == 0.0);
  }
}
