#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rocpost/data.hpp"
#include "rocpost/roc.hpp"

namespace rocpost {

// Coefficient vectors act on the lifted rate vector rho = (TPR, FPR, 1).
using Coeff3 = std::array<double, 3>;

inline double dot3(const Coeff3& c, const RatePoint& r) {
  return c[0] * r.tpr + c[1] * r.fpr + c[2];
}

enum class Metric {
  DemographicParity,
  EqualOpportunity,
  PredictiveEquality,
  PredictiveParity,
  ForParity,  // false omission rate parity
  AccuracyParity,
  Custom,
};

std::string metric_name(Metric m);   // short key: dp, eopp, peq, pp, forp, acc
std::optional<Metric> metric_from_name(const std::string& name);

// One group-fairness constraint: |G_a - G_a'| <= delta for all group pairs,
// where G_a(rho) = <u_a, rho> / <v_a, rho>. Linear metrics have v = (0,0,1).
struct ConstraintSpec {
  Metric metric = Metric::Custom;
  std::string name;                // reporting key
  bool linear = true;              // v == (0,0,1) for every group
  std::vector<Coeff3> u;           // per group
  std::vector<Coeff3> v;           // per group
  double delta = 0.05;             // tolerance in [0,1]
  double epsilon = 1e-7;           // denominator floor for fractional metrics
};

// Per-group objective coefficients; the pipeline uses the misclassification
// loss gamma_a = (-p_a pi_a, p_a (1-pi_a), p_a pi_a).
struct LossSpec {
  std::vector<Coeff3> gamma;
};

ConstraintSpec builtin_spec(Metric metric, const GroupStats& stats,
                            double delta, double epsilon = 1e-7);

LossSpec misclassification_loss(const GroupStats& stats);

double loss_value(const LossSpec& loss, const std::vector<RatePoint>& rates);

// G value for one group at the given rates. Throws DenominatorError when a
// fractional denominator falls below epsilon.
double evaluate(const ConstraintSpec& spec, int group, const RatePoint& rate);

struct DisparityReport {
  std::string name;
  std::vector<double> values;  // per group
  double gap = 0.0;            // max - min
};

// Per-constraint group values and gaps; propagates DenominatorError.
std::vector<DisparityReport> disparities(
    const std::vector<ConstraintSpec>& specs,
    const std::vector<RatePoint>& rates);

void validate_spec(const ConstraintSpec& spec, int group_count);

}  // namespace rocpost
