#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "rocpost/constraints.hpp"
#include "rocpost/errors.hpp"

using namespace rocpost;

namespace {

GroupStats two_group_stats(double pi0, double pi1, double p0 = 0.5) {
  GroupStats st;
  st.n = {1000, 1000};
  st.n_pos = {static_cast<long>(1000 * pi0), static_cast<long>(1000 * pi1)};
  st.n_neg = {1000 - st.n_pos[0], 1000 - st.n_pos[1]};
  st.prevalence = {pi0, pi1};
  st.proportion = {p0, 1.0 - p0};
  return st;
}

}  // namespace

TEST_CASE("built-in coefficient tables at pi = 0.5") {
  const GroupStats st = two_group_stats(0.5, 0.5);

  const auto dp = builtin_spec(Metric::DemographicParity, st, 0.05);
  CHECK(dp.linear);
  CHECK(dp.u[0] == Coeff3{0.5, 0.5, 0.0});
  CHECK(dp.v[0] == Coeff3{0.0, 0.0, 1.0});

  const auto eopp = builtin_spec(Metric::EqualOpportunity, st, 0.05);
  CHECK(eopp.linear);
  CHECK(eopp.u[0] == Coeff3{1.0, 0.0, 0.0});

  const auto peq = builtin_spec(Metric::PredictiveEquality, st, 0.05);
  CHECK(peq.u[0] == Coeff3{0.0, 1.0, 0.0});

  const auto pp = builtin_spec(Metric::PredictiveParity, st, 0.05);
  CHECK(!pp.linear);
  CHECK(pp.u[0] == Coeff3{0.5, 0.0, 0.0});
  CHECK(pp.v[0] == Coeff3{0.5, 0.5, 0.0});

  const auto forp = builtin_spec(Metric::ForParity, st, 0.05);
  CHECK(!forp.linear);
  CHECK(forp.u[0] == Coeff3{-0.5, 0.0, 0.5});
  CHECK(forp.v[0] == Coeff3{-0.5, -0.5, 1.0});

  const auto acc = builtin_spec(Metric::AccuracyParity, st, 0.05);
  CHECK(acc.linear);
  CHECK(acc.u[0] == Coeff3{0.5, -0.5, 0.5});
}

TEST_CASE("metric evaluation at a reference point") {
  const GroupStats st = two_group_stats(0.5, 0.3);
  const RatePoint rho{0.8, 0.2};

  CHECK(evaluate(builtin_spec(Metric::DemographicParity, st, 0.1), 0, rho) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(evaluate(builtin_spec(Metric::EqualOpportunity, st, 0.1), 0, rho) ==
        doctest::Approx(0.8).epsilon(1e-15));
  CHECK(evaluate(builtin_spec(Metric::PredictiveEquality, st, 0.1), 0, rho) ==
        doctest::Approx(0.2).epsilon(1e-15));
  CHECK(evaluate(builtin_spec(Metric::PredictiveParity, st, 0.1), 0, rho) ==
        doctest::Approx(0.8).epsilon(1e-15));
  // false omission rate: pi*fnr / (pi*fnr + (1-pi)*(1-fpr))
  CHECK(evaluate(builtin_spec(Metric::ForParity, st, 0.1), 0, rho) ==
        doctest::Approx(0.1 / 0.5).epsilon(1e-12));
  CHECK(evaluate(builtin_spec(Metric::AccuracyParity, st, 0.1), 0, rho) ==
        doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("metric values agree with direct confusion-count arithmetic") {
  // 40-sample dataset evaluated at a hull vertex: group value from the
  // coefficient form must equal the count ratio.
  testutil::Rng rng(5, 0);
  Dataset d;
  d.group_names = {"A", "B"};
  for (int i = 0; i < 40; ++i) {
    const int g = i % 2;
    d.samples.push_back({rng.uniform(), g, rng.bernoulli(g ? 0.3 : 0.6) ? 1 : 0});
  }
  const GroupStats st = compute_stats(d);
  const auto hulls = build_hulls(d);

  for (int a = 0; a < 2; ++a) {
    for (const auto& s : hulls[a].supports) {
      long tp = 0, fp = 0, tn = 0, fn = 0;
      for (const auto& row : d.samples) {
        if (row.group != a) continue;
        const bool pos = !s.above_all && row.score >= s.threshold;
        if (pos && row.label) ++tp;
        if (pos && !row.label) ++fp;
        if (!pos && row.label) ++fn;
        if (!pos && !row.label) ++tn;
      }
      const RatePoint rho{s.tpr(), s.fpr};
      const double n_a = static_cast<double>(tp + fp + tn + fn);

      const auto dp = builtin_spec(Metric::DemographicParity, st, 0.1);
      CHECK(evaluate(dp, a, rho) ==
            doctest::Approx((tp + fp) / n_a).epsilon(1e-12));

      if (tp + fp > 0) {
        const auto pp = builtin_spec(Metric::PredictiveParity, st, 0.1);
        CHECK(evaluate(pp, a, rho) ==
              doctest::Approx(double(tp) / (tp + fp)).epsilon(1e-12));
      }
      if (fn + tn > 0) {
        const auto forp = builtin_spec(Metric::ForParity, st, 0.1);
        CHECK(evaluate(forp, a, rho) ==
              doctest::Approx(double(fn) / (fn + tn)).epsilon(1e-12));
      }
      const auto acc = builtin_spec(Metric::AccuracyParity, st, 0.1);
      CHECK(evaluate(acc, a, rho) ==
            doctest::Approx((tp + tn) / n_a).epsilon(1e-12));
    }
  }
}

TEST_CASE("fractional metrics guard their denominator") {
  const GroupStats st = two_group_stats(0.5, 0.5);
  const auto pp = builtin_spec(Metric::PredictiveParity, st, 0.05);
  CHECK_THROWS_AS(evaluate(pp, 0, RatePoint{0.0, 0.0}), DenominatorError);
  // FOR at the all-positive corner: nothing is ever omitted
  const auto forp = builtin_spec(Metric::ForParity, st, 0.05);
  CHECK_THROWS_AS(evaluate(forp, 0, RatePoint{1.0, 1.0}), DenominatorError);
}

TEST_CASE("misclassification loss identities") {
  const GroupStats st = two_group_stats(0.6, 0.3, 0.4);
  const LossSpec loss = misclassification_loss(st);

  // perfect prediction in both groups: zero loss
  CHECK(loss_value(loss, {{1.0, 0.0}, {1.0, 0.0}}) ==
        doctest::Approx(0.0).epsilon(1e-15));
  // all-negative: loss = weighted prevalence
  CHECK(loss_value(loss, {{0.0, 0.0}, {0.0, 0.0}}) ==
        doctest::Approx(0.4 * 0.6 + 0.6 * 0.3).epsilon(1e-12));
  // all-positive: loss = weighted (1 - prevalence)
  CHECK(loss_value(loss, {{1.0, 1.0}, {1.0, 1.0}}) ==
        doctest::Approx(0.4 * 0.4 + 0.6 * 0.7).epsilon(1e-12));
  // general point: pi*(1-tpr) + (1-pi)*fpr, weighted
  const double expect =
      0.4 * (0.6 * 0.25 + 0.4 * 0.1) + 0.6 * (0.3 * 0.5 + 0.7 * 0.2);
  CHECK(loss_value(loss, {{0.75, 0.1}, {0.5, 0.2}}) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("disparity report covers all pairs via max-min") {
  const GroupStats st = two_group_stats(0.5, 0.5);
  std::vector<ConstraintSpec> specs{
      builtin_spec(Metric::EqualOpportunity, st, 0.05),
      builtin_spec(Metric::PredictiveEquality, st, 0.05)};
  const std::vector<RatePoint> rates{{0.9, 0.3}, {0.7, 0.25}};
  const auto reps = disparities(specs, rates);
  REQUIRE(reps.size() == 2);
  CHECK(reps[0].gap == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(reps[1].gap == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(reps[0].values[0] == doctest::Approx(0.9));
}

TEST_CASE("spec validation rejects malformed input") {
  const GroupStats st = two_group_stats(0.5, 0.5);
  ConstraintSpec bad = builtin_spec(Metric::DemographicParity, st, 0.05);
  bad.delta = 1.5;
  CHECK_THROWS_AS(validate_spec(bad, 2), InputError);
  bad.delta = 0.05;
  bad.u.pop_back();
  CHECK_THROWS_AS(validate_spec(bad, 2), InputError);

  ConstraintSpec lies = builtin_spec(Metric::PredictiveParity, st, 0.05);
  lies.linear = true;  // claims linear with a real denominator
  CHECK_THROWS_AS(validate_spec(lies, 2), InputError);
}
