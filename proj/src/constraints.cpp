#include "rocpost/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "rocpost/errors.hpp"

namespace rocpost {

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::DemographicParity: return "dp";
    case Metric::EqualOpportunity: return "eopp";
    case Metric::PredictiveEquality: return "peq";
    case Metric::PredictiveParity: return "pp";
    case Metric::ForParity: return "forp";
    case Metric::AccuracyParity: return "acc";
    case Metric::Custom: return "custom";
  }
  return "custom";
}

std::optional<Metric> metric_from_name(const std::string& name) {
  if (name == "dp") return Metric::DemographicParity;
  if (name == "eopp") return Metric::EqualOpportunity;
  if (name == "peq") return Metric::PredictiveEquality;
  if (name == "pp") return Metric::PredictiveParity;
  if (name == "forp") return Metric::ForParity;
  if (name == "acc") return Metric::AccuracyParity;
  return std::nullopt;
}

ConstraintSpec builtin_spec(Metric metric, const GroupStats& stats,
                            double delta, double epsilon) {
  ConstraintSpec spec;
  spec.metric = metric;
  spec.name = metric_name(metric);
  spec.delta = delta;
  spec.epsilon = epsilon;
  const int k = stats.group_count();
  spec.u.resize(k);
  spec.v.resize(k);
  for (int a = 0; a < k; ++a) {
    const double pi = stats.prevalence[a];
    switch (metric) {
      case Metric::DemographicParity:
        spec.linear = true;
        spec.u[a] = {pi, 1.0 - pi, 0.0};
        spec.v[a] = {0.0, 0.0, 1.0};
        break;
      case Metric::EqualOpportunity:
        spec.linear = true;
        spec.u[a] = {1.0, 0.0, 0.0};
        spec.v[a] = {0.0, 0.0, 1.0};
        break;
      case Metric::PredictiveEquality:
        spec.linear = true;
        spec.u[a] = {0.0, 1.0, 0.0};
        spec.v[a] = {0.0, 0.0, 1.0};
        break;
      case Metric::PredictiveParity:
        spec.linear = false;
        spec.u[a] = {pi, 0.0, 0.0};
        spec.v[a] = {pi, 1.0 - pi, 0.0};
        break;
      case Metric::ForParity:
        spec.linear = false;
        spec.u[a] = {-pi, 0.0, pi};
        spec.v[a] = {-pi, -(1.0 - pi), 1.0};
        break;
      case Metric::AccuracyParity:
        spec.linear = true;
        spec.u[a] = {pi, -(1.0 - pi), 1.0 - pi};
        spec.v[a] = {0.0, 0.0, 1.0};
        break;
      case Metric::Custom:
        throw InputError("custom constraints need explicit coefficients");
    }
  }
  validate_spec(spec, k);
  return spec;
}

LossSpec misclassification_loss(const GroupStats& stats) {
  LossSpec loss;
  const int k = stats.group_count();
  loss.gamma.resize(k);
  for (int a = 0; a < k; ++a) {
    const double p = stats.proportion[a];
    const double pi = stats.prevalence[a];
    loss.gamma[a] = {-p * pi, p * (1.0 - pi), p * pi};
  }
  return loss;
}

double loss_value(const LossSpec& loss, const std::vector<RatePoint>& rates) {
  if (loss.gamma.size() != rates.size())
    throw InternalError("loss/rates group count mismatch");
  double total = 0.0;
  for (std::size_t a = 0; a < rates.size(); ++a)
    total += dot3(loss.gamma[a], rates[a]);
  return total;
}

double evaluate(const ConstraintSpec& spec, int group, const RatePoint& rate) {
  if (group < 0 || group >= static_cast<int>(spec.u.size()))
    throw InternalError("constraint group out of range");
  const double num = dot3(spec.u[group], rate);
  if (spec.linear) return num;
  const double den = dot3(spec.v[group], rate);
  if (den < spec.epsilon)
    throw DenominatorError("metric '" + spec.name + "' undefined for group " +
                           std::to_string(group) + " (denominator " +
                           std::to_string(den) + ")");
  return num / den;
}

std::vector<DisparityReport> disparities(
    const std::vector<ConstraintSpec>& specs,
    const std::vector<RatePoint>& rates) {
  std::vector<DisparityReport> out;
  for (const auto& spec : specs) {
    DisparityReport rep;
    rep.name = spec.name;
    for (std::size_t a = 0; a < rates.size(); ++a)
      rep.values.push_back(evaluate(spec, static_cast<int>(a), rates[a]));
    const auto [lo, hi] =
        std::minmax_element(rep.values.begin(), rep.values.end());
    rep.gap = *hi - *lo;
    out.push_back(std::move(rep));
  }
  return out;
}

void validate_spec(const ConstraintSpec& spec, int group_count) {
  if (static_cast<int>(spec.u.size()) != group_count ||
      static_cast<int>(spec.v.size()) != group_count)
    throw InputError("constraint '" + spec.name +
                     "' has wrong per-group coefficient count");
  if (!(spec.delta >= 0.0 && spec.delta <= 1.0))
    throw InputError("constraint '" + spec.name + "' delta outside [0,1]");
  if (!(spec.epsilon > 0.0))
    throw InputError("constraint '" + spec.name + "' epsilon must be > 0");
  if (spec.linear) {
    for (const auto& v : spec.v)
      if (v[0] != 0.0 || v[1] != 0.0 || v[2] != 1.0)
        throw InputError("constraint '" + spec.name +
                         "' marked linear but has a nontrivial denominator");
  }
}

}  // namespace rocpost
